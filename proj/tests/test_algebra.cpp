#include <doctest.h>

#include <random>

#include "crmoduli/algebra.hpp"

using namespace crmoduli;

namespace {

// Deterministic random polynomials over a small parameter pool.
struct Rng {
  std::mt19937_64 g;
  explicit Rng(uint64_t seed) : g(seed) {}
  int uniform(int lo, int hi) {
    return static_cast<int>(std::uniform_int_distribution<int>(lo, hi)(g));
  }
  GaussianRational coeff() {
    return {BigRat(uniform(-5, 5), uniform(1, 4)), BigRat(uniform(-5, 5), uniform(1, 4))};
  }
  PPoly poly(int terms, bool with_sign = true) {
    static const ParamId pool[] = {param::a,  param::a_bar, param::b,  param::a1,
                                   param::a2, param::a3_bar, param::eps};
    PPoly p;
    for (int t = 0; t < terms; ++t) {
      Monomial m;
      int nf = uniform(0, 3);
      for (int k = 0; k < nf; ++k) {
        ParamId id = pool[uniform(0, with_sign ? 6 : 5)];
        m = m.times(Monomial::var(id, uniform(1, 2)));
      }
      p.add_term(m, coeff());
    }
    return p;
  }
  // Denominators stay low-degree: the engine's fractions only ever carry
  // monomial denominators, so adversarially dense ones are out of scope.
  Scalar scalar() {
    PPoly d;
    d.add_term(Monomial::var(param::a1, uniform(0, 2)), coeff());
    if (uniform(0, 1)) d.add_term(Monomial::var(param::b, uniform(0, 1)), coeff());
    while (d.is_zero()) d.add_term(Monomial(), coeff());
    return Scalar(poly(3), d);
  }
};

}  // namespace

TEST_CASE("gaussian rational arithmetic and literals") {
  GaussianRational x(BigRat(1, 2), BigRat(-3, 4));
  CHECK(x * x.inverse() == GaussianRational(1));
  CHECK(x.conj().conj() == x);
  CHECK((x * x.conj()).is_real());
  CHECK(GaussianRational::parse("1/2").str() == "1/2");
  CHECK(GaussianRational::parse("1+1i").str() == "1+1i");
  CHECK(GaussianRational::parse("-i") == -GaussianRational::i());
  CHECK(GaussianRational::parse("3/4i") == GaussianRational(BigRat(0), BigRat(3, 4)));
  CHECK(GaussianRational::parse("2-2/3i") == GaussianRational(BigRat(2), BigRat(-2, 3)));
  CHECK_THROWS_AS(GaussianRational(0).inverse(), Error);
}

TEST_CASE("monomial order is lexicographic in the parameter order") {
  Monomial a = Monomial::var(param::a);
  Monomial b2 = Monomial::var(param::b, 2);
  Monomial ab = a.times(Monomial::var(param::a_bar));
  CHECK(Monomial::cmp_lex(a, b2) > 0);
  CHECK(Monomial::cmp_lex(ab, a) > 0);
  CHECK(Monomial::cmp_lex(a, a) == 0);
  CHECK(a.times(b2).exponent(param::b) == 2);
}

TEST_CASE("conjugation is an involution and distributes") {
  Rng rng(17);
  for (int k = 0; k < 200; ++k) {
    PPoly p = rng.poly(3), q = rng.poly(3);
    CHECK(p.conj().conj() == p);
    CHECK((p + q).conj() == p.conj() + q.conj());
    CHECK((p * q).conj() == p.conj() * q.conj());
  }
  for (int k = 0; k < 50; ++k) {
    Scalar s = rng.scalar(), t = rng.scalar();
    CHECK(s.conj().conj() == s);
    CHECK((s * t).conj() == s.conj() * t.conj());
    CHECK((s + t).conj() == s.conj() + t.conj());
  }
}

TEST_CASE("sign parameter squares to one") {
  Scalar eps = Scalar::param(param::eps);
  CHECK(eps * eps == Scalar(1));
  CHECK(eps.pow(7) == eps);
  CHECK(Scalar(1) / eps == eps);
}

TEST_CASE("canonical fractions agree exactly when cross products do") {
  Rng rng(23);
  for (int k = 0; k < 50; ++k) {
    Scalar s = rng.scalar();
    PPoly m = rng.poly(2, false);
    if (m.is_zero()) continue;
    Scalar blown(s.num() * m, s.den() * m);
    CHECK(blown == s);
  }
  Scalar lhs(PPoly::var(param::a1, 2) - PPoly::var(param::a2, 2),
             PPoly::var(param::a1) - PPoly::var(param::a2));
  CHECK(lhs == Scalar(PPoly::var(param::a1) + PPoly::var(param::a2)));
}

TEST_CASE("denominators stay sign-free and monic") {
  Scalar x(PPoly(1), PPoly::var(param::eps) * PPoly::var(param::a1));
  Scalar expect(PPoly::var(param::eps), PPoly::var(param::a1));
  CHECK(x == expect);
  CHECK_FALSE(x.den().has_sign_params());

  Scalar half_a(PPoly::var(param::a), PPoly::var(param::b).scale(GaussianRational(2)));
  CHECK(half_a.den() == PPoly::var(param::b));
  CHECK(half_a.str() == "1/2*a/(b)");
}

TEST_CASE("conjugate relation rewrite is idempotent") {
  Scalar a1 = Scalar::param(param::a1);
  Scalar a1b = Scalar::param(param::a1_bar);
  Scalar eps = Scalar::param(param::eps);
  Scalar prod = (a1 * a1b).rewrite_a1bar();
  CHECK(prod == eps * a1 * a1);
  CHECK(prod.rewrite_a1bar() == prod);
  Scalar inv = (Scalar(1) / a1b).rewrite_a1bar();
  CHECK(inv == eps / a1);
}

TEST_CASE("modulus relation rewrite is idempotent") {
  Scalar r = Scalar::param(param::r);
  Scalar a = Scalar::param(param::a);
  Scalar ab = Scalar::param(param::a_bar);
  CHECK((r * r).rewrite_r_square() == a * ab);
  CHECK(r.pow(5).rewrite_r_square() == a.pow(2) * ab.pow(2) * r);
  CHECK((r * r).rewrite_r_square().rewrite_r_square() == a * ab);
}

TEST_CASE("substitution respects reality types") {
  Scalar norm = Scalar::param(param::a) * Scalar::param(param::a_bar);
  std::map<ParamId, Scalar> sigma{{param::a, Scalar(GaussianRational(BigRat(1), BigRat(1)))}};
  CHECK(norm.substitute(sigma) == Scalar(2));

  std::map<ParamId, Scalar> bad{{param::b, Scalar::i()}};
  CHECK_THROWS_AS(Scalar::param(param::b).substitute(bad), Error);

  std::map<ParamId, Scalar> bad_sign{{param::eps, Scalar(2)}};
  CHECK_THROWS_AS(Scalar::param(param::eps).substitute(bad_sign), Error);

  std::map<ParamId, Scalar> branches{{param::eps, Scalar(-1)}};
  Scalar e = Scalar::param(param::eps);
  CHECK((e * e).substitute(branches) == Scalar(1));

  std::map<ParamId, Scalar> zero_den{{param::b, Scalar(0)}};
  CHECK_THROWS_AS((Scalar(1) / Scalar::param(param::b)).substitute(zero_den), Error);
}

TEST_CASE("substitution is a homomorphism") {
  Rng rng(41);
  std::map<ParamId, Scalar> sigma{
      {param::a, Scalar(GaussianRational(BigRat(2), BigRat(1)))},
      {param::b, Scalar(GaussianRational(BigRat(-3, 2)))},
      {param::a1, Scalar::param(param::a2)},
      {param::a2, Scalar(GaussianRational(BigRat(1), BigRat(-1)))},
      {param::a3, Scalar::param(param::a3)},
  };
  for (int k = 0; k < 40; ++k) {
    PPoly p = rng.poly(3), q = rng.poly(3);
    CHECK(Scalar(p * q).substitute(sigma) ==
          Scalar(p).substitute(sigma) * Scalar(q).substitute(sigma));
    CHECK(Scalar(p + q).substitute(sigma) ==
          Scalar(p).substitute(sigma) + Scalar(q).substitute(sigma));
  }
}

TEST_CASE("rendering round trips through the parser") {
  Rng rng(59);
  for (int k = 0; k < 60; ++k) {
    Scalar s = rng.scalar();
    CHECK(parse_scalar(s.str()) == s);
  }
  CHECK(parse_scalar("a*conj(a)/(b^2)").str() == "a*conj(a)/(b^2)");
  CHECK(parse_scalar("(1+1i)*a - i*b").conj() == parse_scalar("(1-1i)*conj(a) + i*b"));
  CHECK_THROWS_AS(parse_scalar("a +* b"), Error);
  CHECK_THROWS_AS(parse_scalar("nosuch"), Error);
  CHECK_THROWS_AS(parse_scalar("1/0"), Error);
}

TEST_CASE("division by a vanishing scalar fails loudly") {
  Scalar z(0);
  CHECK_THROWS_AS(Scalar(1) / z, Error);
  Scalar eps = Scalar::param(param::eps);
  CHECK_THROWS_AS(Scalar(1) / (Scalar(1) + eps), Error);
}

TEST_CASE("unit stripping for invariant comparison") {
  Scalar R = Scalar::param(param::a) * Scalar::param(param::a_bar) /
             Scalar::param(param::b).pow(2);
  CHECK((Scalar::i() * R).drop_unit() == R);
  CHECK((Scalar(GaussianRational(BigRat(9, 4))) * R).drop_unit() == R);
  CHECK(R.drop_unit() == R);
}
