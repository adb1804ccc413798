#include <doctest.h>

#include <memory>
#include <random>

#include "crmoduli/coordring.hpp"

using namespace crmoduli;

namespace {

CoordSpacePtr model_space() {
  auto sp = std::make_shared<CoordSpace>();
  sp->add_pair("z", "conj(z)", 1);
  sp->add_real("u1", 2);
  sp->add_real("u2", 3);
  sp->add_real("u3", 3);
  sp->add_real("u4", 4);
  return sp;
}

struct Rng {
  std::mt19937_64 g;
  explicit Rng(uint64_t seed) : g(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
  CoordPoly poly(const CoordSpacePtr& sp, int terms) {
    CoordPoly p(sp);
    for (int t = 0; t < terms; ++t) {
      Monomial m;
      int nf = uniform(0, 2);
      for (int k = 0; k < nf; ++k)
        m = m.times(Monomial::var(uniform(0, sp->size() - 1), uniform(1, 2)));
      Scalar c(GaussianRational(BigRat(uniform(-4, 4)), BigRat(uniform(-4, 4))));
      if (uniform(0, 3) == 0) c = c * Scalar::param(param::a);
      p.add_term(m, c);
    }
    return p;
  }
};

}  // namespace

TEST_CASE("mixed partial derivatives commute") {
  auto sp = model_space();
  Rng rng(101);
  for (int k = 0; k < 200; ++k) {
    CoordPoly p = rng.poly(sp, 4);
    int i = rng.uniform(0, sp->size() - 1), j = rng.uniform(0, sp->size() - 1);
    CHECK(p.diff(i).diff(j) == p.diff(j).diff(i));
  }
}

TEST_CASE("derivations satisfy the Leibniz rule") {
  auto sp = model_space();
  Rng rng(103);
  for (int k = 0; k < 200; ++k) {
    CoordPoly p = rng.poly(sp, 3), q = rng.poly(sp, 3);
    int i = rng.uniform(0, sp->size() - 1);
    CHECK((p * q).diff(i) == p.diff(i) * q + p * q.diff(i));
  }
}

TEST_CASE("conjugation swaps paired coordinates") {
  auto sp = model_space();
  int z = sp->index("z"), zb = sp->index("conj(z)");
  CoordPoly p = CoordPoly::coord(sp, z, 2).scale(Scalar::i()) + CoordPoly::coord(sp, zb);
  CoordPoly expect = CoordPoly::coord(sp, zb, 2).scale(-Scalar::i()) + CoordPoly::coord(sp, z);
  CHECK(p.conj() == expect);
  CHECK(p.conj().conj() == p);
}

TEST_CASE("conjugation units propagate through powers") {
  auto sp = std::make_shared<CoordSpace>();
  sp->add_unit_real("a1", Scalar::param(param::eps));
  auto spc = CoordSpacePtr(sp);
  CoordPoly p = CoordPoly::coord(spc, 0, 3);
  // conj(a1^3) = eps^3 * a1^3 = eps * a1^3.
  CHECK(p.conj() == p.scale(Scalar::param(param::eps)));
  CoordPoly sq = CoordPoly::coord(spc, 0, 2);
  CHECK(sq.conj() == sq);
}

TEST_CASE("substitution is functorial") {
  auto sp = model_space();
  int z = sp->index("z"), zb = sp->index("conj(z)"), u1 = sp->index("u1");
  // First substitute z -> z + u1, then evaluate; equals direct evaluation.
  std::map<int, CoordRat> sigma{
      {z, CoordRat(CoordPoly::coord(sp, z) + CoordPoly::coord(sp, u1))}};
  Rng rng(107);
  for (int k = 0; k < 40; ++k) {
    CoordPoly p = rng.poly(sp, 3);
    CoordRat q = p.substitute(sigma, sp);
    std::map<int, Scalar> pt;
    pt[z] = Scalar(GaussianRational(BigRat(2), BigRat(1)));
    pt[zb] = Scalar(GaussianRational(BigRat(1), BigRat(3)));
    pt[u1] = Scalar(GaussianRational(BigRat(-1)));
    for (int i = 0; i < sp->size(); ++i)
      if (!pt.count(i)) pt[i] = Scalar(GaussianRational(BigRat(i)));
    std::map<int, Scalar> shifted = pt;
    shifted[z] = pt[z] + pt[u1];
    CHECK(q.eval(pt) == p.eval(shifted));
  }
}

TEST_CASE("rational functions reduce and differentiate") {
  auto sp = model_space();
  int z = sp->index("z"), zb = sp->index("conj(z)");
  CoordPoly zz = CoordPoly::coord(sp, z), zzb = CoordPoly::coord(sp, zb);
  CoordRat frac(zz * zz - zzb * zzb, zz - zzb);
  CHECK(frac == CoordRat(zz + zzb));
  CoordRat inv = CoordRat(sp, Scalar(1)) / CoordRat(zz);
  CoordRat dinv = inv.diff(z);
  CHECK(dinv == -CoordRat(CoordPoly(sp, Scalar(1)), zz * zz));
  CHECK_THROWS_AS(CoordRat(sp, Scalar(1)) / CoordRat(sp), Error);
}

TEST_CASE("weights mark the defining polynomials as homogeneous") {
  auto sp = model_space();
  int z = sp->index("z"), zb = sp->index("conj(z)");
  CoordPoly p1 = (CoordPoly::coord(sp, z) * CoordPoly::coord(sp, zb)).scale(Scalar::i() * Scalar(2));
  CHECK(p1.homogeneous_weight() == 2);
  CoordPoly p4 = CoordPoly::coord(sp, z, 3) * CoordPoly::coord(sp, zb) +
                 CoordPoly::coord(sp, z, 2) * CoordPoly::coord(sp, zb, 2);
  CHECK(p4.homogeneous_weight() == 4);
  CoordPoly mixed = CoordPoly::coord(sp, z) + CoordPoly::coord(sp, sp->index("u1"));
  CHECK_FALSE(mixed.homogeneous_weight().has_value());
}
