#!/usr/bin/env python3
"""Independent recomputation of the bracket-frame constants frozen in the
C++ tests: the tangential generator, the commutator table, the dual
structure equations and the classification samples.

Run: python3 frame_constants.py   (needs sympy; exits nonzero on mismatch)
"""

import sympy as sp
from sympy import I, Rational as Q

z, zb = sp.symbols("z zb")
a, ab, b = sp.symbols("a ab b")

P = [
    2 * I * z * zb,
    2 * I * (z**2 * zb + z * zb**2),
    2 * (z**2 * zb - z * zb**2),
    2 * I * (a * z**3 * zb + ab * z * zb**3) + 2 * I * b * z**2 * zb**2,
]

SWAP = {z: zb, zb: z, a: ab, ab: a}
COORDS = ["z", "zb", "u1", "u2", "u3", "u4"]

checks = 0


def ok(cond, what):
    global checks
    assert cond, what
    checks += 1


def cnj(e):
    return sp.expand(sp.sympify(e).xreplace(SWAP).subs(I, -I))


# the right sides are imaginary parts twice over: conj(P) = -P
for j, p in enumerate(P):
    ok(sp.simplify(cnj(p) + p) == 0, f"P{j + 1} reality")

# fields are dicts coordinate -> coefficient; coefficients involve z, zb only
def apply(X, f):
    return sp.expand(X["z"] * sp.diff(f, z) + X["zb"] * sp.diff(f, zb))


def bracket(X, Y):
    return {c: sp.expand(apply(X, Y[c]) - apply(Y, X[c])) for c in COORDS}


def scale(X, s):
    return {c: sp.expand(s * v) for c, v in X.items()}


def field_conj(X):
    out = {c: cnj(v) for c, v in X.items()}
    out["z"], out["zb"] = out["zb"], out["z"]
    return out


def is_zero(X):
    return all(sp.simplify(v) == 0 for v in X.values())


def equal(X, Y):
    return all(sp.simplify(X[c] - Y[c]) == 0 for c in COORDS)


L = {c: sp.Integer(0) for c in COORDS}
L["z"] = sp.Integer(1)
for j in range(4):
    L[f"u{j + 1}"] = sp.expand(Q(1, 2) * sp.diff(P[j], z))

Lb = field_conj(L)
T = scale(bracket(L, Lb), I)
S = bracket(L, T)
Sb = bracket(Lb, T)
U = {c: sp.Integer(0) for c in COORDS}
U["u4"] = sp.Integer(12)

ok(sp.simplify(L["u1"] - I * zb) == 0, "L hits u1 with i conj(z)")
ok(equal(Sb, field_conj(S)), "Sbar is the conjugate of S")
ok(equal(field_conj(T), T), "T is real")

# commutator table: [L, Lbar] = -iT, [L, T] = S, [Lbar, T] = Sbar,
# [L, S] = aU, [L, Sbar] = (2/3)b U = [Lbar, S], [Lbar, Sbar] = conj(a) U
ok(equal(bracket(L, Lb), scale(T, -I)), "[L, Lbar] = -iT")
ok(equal(bracket(L, T), S), "[L, T] = S")
ok(equal(bracket(Lb, T), Sb), "[Lbar, T] = Sbar")
ok(equal(bracket(L, S), scale(U, a)), "[L, S] = a U")
ok(equal(bracket(L, Sb), scale(U, Q(2, 3) * b)), "[L, Sbar] = (2/3) b U")
ok(equal(bracket(Lb, S), scale(U, Q(2, 3) * b)), "[Lbar, S] = (2/3) b U")
ok(equal(bracket(Lb, Sb), scale(U, ab)), "[Lbar, Sbar] = conj(a) U")
for X in (L, Lb, T, S, Sb):
    ok(is_zero(bracket(X, U)), "U is central")
for X, Y in ((T, S), (T, Sb), (S, Sb)):
    ok(is_zero(bracket(X, Y)), "higher brackets vanish")

# spot values at a = 1+i, b = 2 match the printed frame
num = {a: 1 + I, ab: 1 - I, b: 2}
ok(sp.expand(T["u4"].subs(num) - ((6 + 6 * I) * z**2 + 16 * z * zb + (6 - 6 * I) * zb**2)) == 0,
   "T u4 coefficient at (1+i, 2)")
ok(sp.expand(S["u4"].subs(num) - ((12 + 12 * I) * z + 16 * zb)) == 0,
   "S u4 coefficient at (1+i, 2)")

# dual equations: with the frame order (U, S, Sbar, T, L, Lbar) dualized to
# (mu0, sigma0, sigmabar0, rho0, zeta0, zetabar0),
# d xi^k (X_i, X_j) = -xi^k([X_i, X_j]) gives
#   d mu0  = a sigma0^zeta0 + (2/3)b sigma0^zetabar0
#          + (2/3)b sigmabar0^zeta0 + conj(a) sigmabar0^zetabar0
#   d sigma0 = rho0^zeta0,  d sigmabar0 = rho0^zetabar0,
#   d rho0 = i zeta0^zetabar0,  d zeta0 = d zetabar0 = 0
basis = [U, S, Sb, T, L, Lb]


def dual_coeff(k, i, j):
    # expand [basis_i, basis_j] over the basis and return -coefficient_k
    w = bracket(basis[i], basis[j])
    # solve sum_m c_m basis_m = w exactly
    syms = sp.symbols("c0:6")
    eqs = []
    for c in COORDS:
        eqs.append(sp.Eq(sum(syms[m] * basis[m][c] for m in range(6)), w[c]))
    sol = sp.solve(eqs, syms, dict=True)
    assert len(sol) == 1, f"bracket ({i},{j}) not in the span"
    return sp.simplify(-sol[0].get(syms[k], 0))


expected_mu = {(1, 4): a, (1, 5): Q(2, 3) * b, (2, 4): Q(2, 3) * b, (2, 5): ab}
for i in range(6):
    for j in range(i + 1, 6):
        want = expected_mu.get((i, j), 0)
        ok(sp.simplify(dual_coeff(0, i, j) - want) == 0, f"d mu0 at ({i},{j})")
ok(sp.simplify(dual_coeff(1, 3, 4) - 1) == 0, "d sigma0 = rho0^zeta0")
ok(sp.simplify(dual_coeff(2, 3, 5) - 1) == 0, "d sigmabar0 = rho0^zetabar0")
ok(sp.simplify(dual_coeff(3, 4, 5) - I) == 0, "d rho0 = i zeta0^zetabar0")

# classification samples: R = a conj(a) / b^2 on the generic branch
samples = [
    (1 + I, 2, Q(1, 2)),
    (1, 2, Q(1, 4)),
    (2, 4, Q(1, 4)),
    (2, 3, Q(4, 9)),
    (2 + I, 3, Q(5, 9)),
    (3 + I, 4, Q(5, 8)),
    (4 + I, 5, Q(17, 25)),
    (5 + I, 6, Q(13, 18)),
    (1, 1, 1),
]
for av, bv, want in samples:
    got = sp.simplify(av * sp.conjugate(av) / bv**2)
    ok(got == want, f"R({av},{bv}) = {want}")

print(f"frame_constants: {checks} checks passed")
