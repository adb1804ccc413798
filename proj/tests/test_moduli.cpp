#include <doctest.h>

#include <json.hpp>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "crmoduli/moduli.hpp"

using namespace crmoduli;

namespace {

CoordRat kc(const Scalar& s) { return CoordRat(CoordSpacePtr(), s); }
Scalar frac(long n, long d = 1) { return Scalar(GaussianRational(BigRat(n, d))); }
Scalar gauss(long re, long im, long den = 1) {
  return Scalar(GaussianRational(BigRat(re, den), BigRat(im, den)));
}
Scalar pa(ParamId id) { return Scalar::param(id); }

CRModel model(const Scalar& a, const Scalar& b) { return builtin_m14(a, b); }
Scalar ratio(const Scalar& a, const Scalar& b) { return a * a.conj() / (b * b); }

long draw(std::mt19937_64& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<unsigned long long>(hi - lo + 1));
}

// A type (1,4) model outside the built-in family: the third row is doubled.
CRModel off_family() {
  CRModel base = builtin_m14(frac(1), frac(2));
  std::vector<CoordPoly> rhs = {base.rhs(1), base.rhs(2), base.rhs(3).scale(frac(2)),
                                base.rhs(4)};
  return CRModel(base.name(), 1, 4, base.params(), base.space(), rhs);
}

}  // namespace

TEST_CASE("both pipelines compute the same invariant on random models") {
  ParamTable::instance().reset_to_builtin();
  std::mt19937_64 rng(20260816);
  for (int k = 0; k < 10; ++k) {
    Scalar a = gauss(draw(rng, -6, 6), draw(rng, -6, 6), draw(rng, 1, 4));
    if (a.is_zero()) a = gauss(1, 1);
    long sign = draw(rng, 0, 1) == 0 ? 1 : -1;
    Scalar b = frac(sign * draw(rng, 1, 9), draw(rng, 1, 4));
    CRModel m = model(a, b);

    InvariantReport rc = invariant(m, Pipeline::Cartan);
    InvariantReport rl = invariant(m, Pipeline::Lie);
    CHECK(rc.cls == InvariantClass::Generic);
    CHECK(rc == rl);
    CHECK(rc.invariant == ratio(a, b));
    CHECK(rl.invariant == ratio(a, b));
  }
}

TEST_CASE("classification lands each model on its branch") {
  ParamTable::instance().reset_to_builtin();

  InvariantReport gen = invariant(model(gauss(1, 1), frac(2)), Pipeline::Lie);
  CHECK(gen.cls == InvariantClass::Generic);
  CHECK(gen.invariant == frac(1, 2));

  InvariantReport b0c = invariant(model(frac(3), frac(0)), Pipeline::Cartan);
  InvariantReport b0l = invariant(model(frac(3), frac(0)), Pipeline::Lie);
  CHECK(b0c.cls == InvariantClass::B0);
  CHECK(b0l.cls == InvariantClass::B0);
  CHECK(b0c == b0l);
  CHECK(invariant(model(gauss(0, 5), frac(0)), Pipeline::Lie).cls == InvariantClass::B0);

  InvariantReport m01 = invariant(model(frac(0), frac(7)), Pipeline::Cartan);
  CHECK(m01.cls == InvariantClass::M01);
  CHECK(m01 == invariant(model(frac(0), frac(7)), Pipeline::Lie));
  CHECK(invariant(model(frac(0), frac(-2)), Pipeline::Lie).cls == InvariantClass::M01);

  InvariantReport sym = invariant(builtin_m14(), Pipeline::Lie);
  CHECK(sym.cls == InvariantClass::Generic);
  CHECK(sym.invariant == pa(param::a) * pa(param::a_bar) / (pa(param::b) * pa(param::b)));

  CHECK_THROWS_WITH_AS(invariant(model(frac(0), frac(0))),
                       doctest::Contains("DegenerateModel"), Error);
  CHECK_THROWS_WITH_AS(invariant(off_family()), doctest::Contains("DegenerateModel"),
                       Error);
}

TEST_CASE("report equality compares class and value, nothing else") {
  ParamTable::instance().reset_to_builtin();
  InvariantReport rc = invariant(model(gauss(1, 1), frac(2)), Pipeline::Cartan);
  InvariantReport rl = invariant(model(gauss(1, 1), frac(2)), Pipeline::Lie);
  CHECK(rc.pipeline != rl.pipeline);
  CHECK(rc == rl);

  CHECK(invariant(model(frac(1), frac(1)), Pipeline::Lie) !=
        invariant(model(frac(1), frac(2)), Pipeline::Lie));
  CHECK(invariant(model(frac(3), frac(0)), Pipeline::Lie) !=
        invariant(model(frac(0), frac(3)), Pipeline::Lie));
  CHECK(invariant(model(frac(3), frac(0)), Pipeline::Lie) !=
        invariant(model(frac(1), frac(2)), Pipeline::Lie));

  // B0 reports agree regardless of which model produced them.
  CHECK(invariant(model(frac(3), frac(0)), Pipeline::Lie) ==
        invariant(model(gauss(0, 5), frac(0)), Pipeline::Lie));
}

TEST_CASE("the report serializes compactly and stably") {
  ParamTable::instance().reset_to_builtin();
  CHECK(invariant(model(gauss(1, 1), frac(2))).json() ==
        R"({"class":"generic","invariant":"1/2"})");
  CHECK(invariant(model(frac(3), frac(0)), Pipeline::Lie).json() == R"({"class":"B0"})");
  CHECK(invariant(model(frac(0), frac(7)), Pipeline::Lie).json() == R"({"class":"M01"})");

  std::string text = invariant(model(gauss(1, 1), frac(2))).str();
  CHECK(text.find("class: generic") != std::string::npos);
  CHECK(text.find("invariant: 1/2") != std::string::npos);
  CHECK(text.find("R = 1/2") != std::string::npos);

  std::string none = invariant(model(frac(3), frac(0)), Pipeline::Lie).str();
  CHECK(none.find("invariant: none") != std::string::npos);
}

TEST_CASE("rotations move the cubic coefficient around the circle") {
  ParamTable::instance().reset_to_builtin();
  ModelTransform rot = rotation_from_pythagorean(2, 1);
  CHECK(rot.value == gauss(3, 4, 5));
  CHECK(rot.value * rot.value.conj() == frac(1));

  CRModel m = model(gauss(1, 1), frac(2));
  CRModel mr = transform_model(m, rot);
  auto fam = family_parameters(mr);
  REQUIRE(fam.has_value());
  CHECK(fam->first == rot.value * gauss(1, 1));
  CHECK(fam->second == frac(2));
  for (int j = 1; j <= 3; ++j) CHECK(mr.rhs(j) == m.rhs(j));
  CHECK(invariant(mr, Pipeline::Lie) == invariant(m, Pipeline::Lie));

  // Two rotations compose: (1,2) then (2,1) multiplies the coefficient by -1.
  CRModel m23 = model(frac(2), frac(3));
  CHECK(invariant(m23, Pipeline::Lie).invariant == frac(4, 9));
  CRModel twice =
      transform_model(transform_model(m23, rotation_from_pythagorean(1, 2)),
                      rotation_from_pythagorean(2, 1));
  CHECK(family_parameters(twice)->first == frac(-2));
  CHECK(invariant(twice, Pipeline::Lie).invariant == frac(4, 9));

  // Symbolic members rotate too.
  CRModel sym = transform_model(builtin_m14(), rot);
  auto sfam = family_parameters(sym);
  REQUIRE(sfam.has_value());
  CHECK(sfam->first == rot.value * pa(param::a));
  CHECK(sfam->second == pa(param::b));
}

TEST_CASE("real scalings leave every family member fixed") {
  ParamTable::instance().reset_to_builtin();
  CRModel m = model(gauss(1, 1), frac(2));
  CRModel ms = transform_model(m, {ModelTransform::RealScaling, frac(3, 2)});
  CHECK(ms == m);
  CHECK(transform_model(m, {ModelTransform::RealScaling, frac(-2)}) == m);

  CHECK_THROWS_WITH_AS(transform_model(m, {ModelTransform::RealScaling, frac(0)}),
                       doctest::Contains("NotAdmissible"), Error);
  CHECK_THROWS_WITH_AS(transform_model(m, {ModelTransform::RealScaling, gauss(0, 1)}),
                       doctest::Contains("NotAdmissible"), Error);
}

TEST_CASE("the w4 rescale multiplies both coefficients") {
  ParamTable::instance().reset_to_builtin();
  CRModel m = model(gauss(1, 1), frac(2));
  auto fam = family_parameters(transform_model(m, {ModelTransform::W4Rescale, frac(5)}));
  CHECK(fam->first == gauss(5, 5));
  CHECK(fam->second == frac(10));

  auto neg =
      family_parameters(transform_model(m, {ModelTransform::W4Rescale, frac(-1, 3)}));
  CHECK(neg->first == gauss(-1, -1, 3));
  CHECK(neg->second == frac(-2, 3));

  // A vanishing balanced coefficient stays zero, so the class is stable.
  CRModel flat = model(frac(1), frac(0));
  CRModel moved = transform_model(flat, {ModelTransform::W4Rescale, frac(7)});
  CHECK(family_parameters(moved)->second == frac(0));
  CHECK(invariant(moved, Pipeline::Lie).cls == InvariantClass::B0);
  CHECK(decide_equivalence(flat, moved, Pipeline::Lie).equivalent);

  CHECK_THROWS_WITH_AS(transform_model(m, {ModelTransform::W4Rescale, frac(0)}),
                       doctest::Contains("NotAdmissible"), Error);
  CHECK_THROWS_WITH_AS(transform_model(m, {ModelTransform::W4Rescale, gauss(1, 1)}),
                       doctest::Contains("NotAdmissible"), Error);
}

TEST_CASE("transformations reject what they cannot keep exact") {
  ParamTable::instance().reset_to_builtin();
  CRModel m = model(gauss(1, 1), frac(2));
  CHECK_THROWS_WITH_AS(transform_model(m, {ModelTransform::Rotation, frac(2)}),
                       doctest::Contains("NotAdmissible"), Error);
  CHECK_THROWS_WITH_AS(transform_model(m, {ModelTransform::Rotation, gauss(1, 1)}),
                       doctest::Contains("NotAdmissible"), Error);
  CHECK_THROWS_WITH_AS(
      transform_model(m, {ModelTransform::W4Rescale, pa(param::b)}),
      doctest::Contains("NotAdmissible"), Error);
  CHECK_THROWS_WITH_AS(transform_model(off_family(), rotation_from_pythagorean(2, 1)),
                       doctest::Contains("NotAdmissible"), Error);
  CHECK_THROWS_WITH_AS(rotation_from_pythagorean(0, 0),
                       doctest::Contains("NotAdmissible"), Error);

  CHECK(rotation_from_pythagorean(1, 1).value == gauss(0, 1));
  CHECK(rotation_from_pythagorean(3, 2).value == gauss(5, 12, 13));
}

TEST_CASE("equivalence certificates separate the classes") {
  ParamTable::instance().reset_to_builtin();

  EquivalenceCertificate eq =
      decide_equivalence(model(frac(1), frac(2)), model(frac(2), frac(4)), Pipeline::Lie);
  CHECK(eq.equivalent);
  CHECK(eq.invariant1 == "1/4");
  CHECK(eq.invariant2 == "1/4");
  CHECK(eq.str().rfind("Equivalent\n", 0) == 0);

  EquivalenceCertificate ne =
      decide_equivalence(model(frac(1), frac(1)), model(frac(1), frac(2)), Pipeline::Lie);
  CHECK(!ne.equivalent);
  CHECK(ne.invariant1 == "1");
  CHECK(ne.invariant2 == "1/4");
  CHECK(ne.str().rfind("NotEquivalent\n", 0) == 0);

  CHECK(decide_equivalence(model(frac(3), frac(0)), model(gauss(0, 5), frac(0)),
                           Pipeline::Lie)
            .equivalent);
  CHECK(decide_equivalence(model(frac(0), frac(7)), model(frac(0), frac(3)),
                           Pipeline::Lie)
            .equivalent);
  CHECK(!decide_equivalence(model(frac(3), frac(0)), model(frac(0), frac(3)),
                            Pipeline::Lie)
             .equivalent);
  CHECK(!decide_equivalence(model(frac(1), frac(2)), model(frac(3), frac(0)),
                            Pipeline::Lie)
             .equivalent);

  nlohmann::json j = nlohmann::json::parse(ne.json());
  CHECK(j.at("verdict") == "NotEquivalent");
  CHECK(j.at("class1") == "generic");
  CHECK(j.at("class2") == "generic");
  CHECK(j.at("invariant1") == "1");
  CHECK(j.at("invariant2") == "1/4");
  CHECK(j.at("witness_chain").is_array());
  CHECK(j.at("witness_chain").size() >= 2);

  nlohmann::json jb = nlohmann::json::parse(
      decide_equivalence(model(frac(3), frac(0)), model(frac(0), frac(3)), Pipeline::Lie)
          .json());
  CHECK(jb.at("verdict") == "NotEquivalent");
  CHECK(jb.at("class1") == "B0");
  CHECK(jb.at("class2") == "M01");
  CHECK(jb.at("invariant1") == "");
  CHECK(jb.at("invariant2") == "");
}

TEST_CASE("equivalence behaves as an equivalence relation on a random panel") {
  ParamTable::instance().reset_to_builtin();
  std::mt19937_64 rng(977);
  std::vector<CRModel> panel;
  for (int k = 0; k < 12; ++k) {
    Scalar a = gauss(draw(rng, -5, 5), draw(rng, -5, 5), draw(rng, 1, 3));
    if (a.is_zero()) a = frac(draw(rng, 1, 5));
    long sign = draw(rng, 0, 1) == 0 ? 1 : -1;
    panel.push_back(model(a, frac(sign * draw(rng, 1, 6), draw(rng, 1, 3))));
  }
  // Engineered collisions across all three branches.
  panel.push_back(model(gauss(1, 1), frac(2)));
  panel.push_back(model(gauss(2, 2), frac(4)));
  panel.push_back(model(gauss(1, -1), frac(-2)));
  panel.push_back(model(frac(3), frac(0)));
  panel.push_back(model(gauss(0, 5), frac(0)));
  panel.push_back(model(frac(0), frac(7)));
  panel.push_back(model(frac(0), frac(-2)));
  panel.push_back(model(frac(5), frac(1)));
  REQUIRE(panel.size() == 20);

  auto key = [](const InvariantReport& r) {
    return to_string(r.cls) +
           (r.cls == InvariantClass::Generic ? "|" + r.invariant.str() : "");
  };
  std::vector<std::string> keys;
  for (const CRModel& m : panel) keys.push_back(key(invariant(m, Pipeline::Lie)));

  for (int i = 0; i < 20; ++i)
    CHECK(decide_equivalence(panel[i], panel[i], Pipeline::Lie).equivalent);

  int same = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = i + 1; j < 20; ++j) {
      bool ij = decide_equivalence(panel[i], panel[j], Pipeline::Lie).equivalent;
      bool ji = decide_equivalence(panel[j], panel[i], Pipeline::Lie).equivalent;
      CHECK(ij == ji);
      CHECK(ij == (keys[i] == keys[j]));
      if (ij) ++same;
    }
  }
  CHECK(same >= 4);  // the engineered collisions are really there

  // Transitivity across one engineered triple.
  CHECK(decide_equivalence(panel[12], panel[13], Pipeline::Lie).equivalent);
  CHECK(decide_equivalence(panel[13], panel[14], Pipeline::Lie).equivalent);
  CHECK(decide_equivalence(panel[12], panel[14], Pipeline::Lie).equivalent);
}

TEST_CASE("the symmetry reduction exposes the invariant in two coupled slots") {
  ParamTable::instance().reset_to_builtin();
  Scalar a = pa(param::a), ab = pa(param::a_bar), b = pa(param::b);

  LieRun lr = run_lie(builtin_m14());
  REQUIRE(lr.canonical.frame->size() == 7);
  CHECK(lr.canonical.frame->name(0) == "mu_new");
  CHECK(lr.canonical.frame->name(6) == "rho_new");
  CHECK(!lr.canonical.d.count(3));
  CHECK(lr.canonical.d.at(0).coefficient({4, 1}) == kc(frac(9, 4) * a * ab / (b * b)));
  CHECK(lr.canonical.d.at(2).coefficient({4, 3}) == kc(frac(9, 2) * a * ab / (b * b)));
  CHECK(lr.canonical.d.at(6).coefficient({4, 5}) == kc(frac(-2)));
  CHECK(lr.invariants.at("R") == a * ab / (b * b));

  REQUIRE(lr.stages.size() == 3);
  CHECK(lr.stages[0].first == "dual");
  CHECK(lr.stages[1].first == "reduced");
  CHECK(lr.stages[2].first == "canonical");
  for (const auto& [name, dump] : lr.stages) {
    nlohmann::json j = nlohmann::json::parse(dump);
    CHECK(j.at("stage") == name);
    CHECK(j.at("equations").is_array());
    CHECK(!j.at("equations").empty());
  }
  nlohmann::json last = nlohmann::json::parse(lr.stages[2].second);
  CHECK(last.at("assignments").at("R") == "a*conj(a)/(b^2)");

  LieRun num = run_lie(model(gauss(1, 1), frac(2)));
  CHECK(num.invariants.at("R") == frac(1, 2));
  nlohmann::json numlast = nlohmann::json::parse(num.stages[2].second);
  CHECK(numlast.at("assignments").at("R") == "1/2");
}

TEST_CASE("the symmetry reduction decouples when the balanced coefficient dies") {
  ParamTable::instance().reset_to_builtin();
  LieRun lr = run_lie(model(frac(3), frac(0)));
  CHECK(lr.invariants.empty());
  REQUIRE(lr.canonical.frame->size() == 6);
  CHECK(lr.canonical.frame->name(0) == "mu_new");

  DiffForm dmu(lr.canonical.frame, 2);
  dmu.add_term({4, 1}, kc(frac(1)));
  dmu.add_term({5, 2}, kc(frac(-1)));
  CHECK(lr.canonical.d.at(0) == dmu);
  DiffForm dsigma(lr.canonical.frame, 2);
  dsigma.add_term({5, 3}, kc(frac(-2)));
  CHECK(lr.canonical.d.at(1) == dsigma);
  DiffForm dsigmat(lr.canonical.frame, 2);
  dsigmat.add_term({4, 3}, kc(frac(2)));
  CHECK(lr.canonical.d.at(2) == dsigmat);
  DiffForm drho(lr.canonical.frame, 2);
  drho.add_term({4, 5}, kc(frac(-2)));
  CHECK(lr.canonical.d.at(3) == drho);
  CHECK(lr.canonical.d.at(4).is_zero());
  CHECK(lr.canonical.d.at(5).is_zero());

  // Every decoupled member lands on the same constant equations.
  LieRun other = run_lie(model(gauss(0, 5), frac(0)));
  for (int k = 0; k < 6; ++k) CHECK(other.canonical.d.at(k) == lr.canonical.d.at(k));

  CHECK_THROWS_WITH_AS(run_lie(model(frac(0), frac(0))),
                       doctest::Contains("DegenerateModel"), Error);
  CHECK_THROWS_WITH_AS(run_lie(off_family()), doctest::Contains("DegenerateModel"),
                       Error);
}

TEST_CASE("fifty random transformations never move the report") {
  ParamTable::instance().reset_to_builtin();
  OracleReport rep = invariance_oracle(model(gauss(1, 1), frac(2)), 50, 20260816);
  CHECK(rep.samples == 50);
  CHECK(rep.seed == 20260816);
  CHECK(rep.base.cls == InvariantClass::Generic);
  CHECK(rep.base.invariant == frac(1, 2));
  CHECK(rep.log.size() == 51);

  nlohmann::json j = nlohmann::json::parse(rep.json());
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("samples") == 50);
  CHECK(j.at("seed") == 20260816);
  CHECK(j.at("base").at("class") == "generic");
  CHECK(j.at("base").at("invariant") == "1/2");
  CHECK(j.at("log").size() == 51);

  // Same seed, same transcript.
  OracleReport again = invariance_oracle(model(gauss(1, 1), frac(2)), 50, 20260816);
  CHECK(again.str() == rep.str());
  CHECK(again.json() == rep.json());
}

TEST_CASE("the oracle follows the degenerate classes and guards its inputs") {
  ParamTable::instance().reset_to_builtin();
  OracleReport flat = invariance_oracle(model(frac(1), frac(0)), 20, 7);
  CHECK(flat.base.cls == InvariantClass::B0);
  CHECK(flat.log.size() == 21);

  OracleReport ref = invariance_oracle(model(frac(0), frac(3)), 10, 7);
  CHECK(ref.base.cls == InvariantClass::M01);

  CHECK_THROWS_WITH_AS(invariance_oracle(model(gauss(1, 1), frac(2)), 0, 7),
                       doctest::Contains("SyntaxError"), Error);
  CHECK_THROWS_WITH_AS(invariance_oracle(builtin_m14(), 5, 7),
                       doctest::Contains("SyntaxError"), Error);
  CHECK_THROWS_WITH_AS(invariance_oracle(off_family(), 5, 7),
                       doctest::Contains("DegenerateModel"), Error);
}
