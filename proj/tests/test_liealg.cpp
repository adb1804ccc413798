#include <doctest.h>

#include <fstream>
#include <sstream>

#include "crmoduli/liealg.hpp"

using namespace crmoduli;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CoordRat kc(const Scalar& s) { return CoordRat(CoordSpacePtr(), s); }

Scalar rr() { return Scalar::param(param::r); }
Scalar bb() { return Scalar::param(param::b); }
Scalar frac(long n, long d) { return Scalar(GaussianRational(BigRat(n, d))); }

std::vector<BracketEntry> g_entries(const Scalar& ls_coeff) {
  Scalar r = rr(), b = bb();
  return {
      {"L", "Lt", {{"T", -(r * r)}}},
      {"L", "T", {{"St", Scalar(-2) * r}}},
      {"L", "St", {{"U", ls_coeff}}},
      {"Lt", "T", {{"S", Scalar(-2) * r}}},
      {"Lt", "S", {{"U", -(r * b) - frac(3, 2) * r * r}}},
  };
}

// direct Jacobi recheck, written as a fold over full bracket expansions
bool jacobi_holds_bruteforce(const GradedLieAlgebra& L) {
  int n = L.dim();
  auto ad = [&](const std::vector<Scalar>& v, int k) {
    // [v, x_k] for a combination v over the basis
    std::vector<Scalar> out(n, Scalar(0));
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) out[m] = out[m] + v[l] * L.bracket(l, k)[m];
    return out;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        std::vector<Scalar> acc = ad(L.bracket(i, j), k);
        auto bjk = ad(L.bracket(j, k), i);
        auto bki = ad(L.bracket(k, i), j);
        for (int m = 0; m < n; ++m) {
          acc[m] = acc[m] + bjk[m] + bki[m];
          if (!acc[m].is_zero()) return false;
        }
      }
  return true;
}

}  // namespace

TEST_CASE("builtin bracket table validates and matches the shipped file") {
  ParamTable::instance().reset_to_builtin();
  GradedLieAlgebra g = builtin_g_rb();
  CHECK(g.dim() == 6);
  CHECK(g.symbols() == std::vector<std::string>{"U", "S", "St", "T", "L", "Lt"});
  CHECK(g.weight(0) == -4);
  CHECK(g.weight(3) == -2);
  CHECK(g.weight(5) == -1);

  GradedLieAlgebra loaded =
      parse_algebra_json(read_file(std::string(CRMODULI_DATA_DIR) + "/g_rb.json"));
  CHECK(g == loaded);

  Scalar r = rr(), b = bb();
  int U = g.index("U"), T = g.index("T"), L = g.index("L"), Lt = g.index("Lt");
  int S = g.index("S"), St = g.index("St");
  CHECK(g.bracket(L, Lt)[T] == -(r * r));
  CHECK(g.bracket(Lt, L)[T] == r * r);
  CHECK(g.bracket(L, T)[St] == Scalar(-2) * r);
  CHECK(g.bracket(L, St)[U] == -(r * b) + frac(3, 2) * r * r);
  CHECK(g.bracket(Lt, S)[U] == -(r * b) - frac(3, 2) * r * r);
  CHECK(g.bracket(T, S) == std::vector<Scalar>(6, Scalar(0)));
  CHECK(g.bracket(L, S) == std::vector<Scalar>(6, Scalar(0)));
  CHECK(grading_check(g).pass());
  CHECK(!jacobi_check(g));
  CHECK(g.str().find("[L, Lt] = -r^2*T") != std::string::npos);

  // small valid tables
  GradedLieAlgebra heis = GradedLieAlgebra::from_table(
      {"X", "Y", "Z"}, {-1, -1, -2}, {{"X", "Y", {{"Z", Scalar(1)}}}});
  CHECK(heis.bracket(0, 1)[2] == Scalar(1));
  GradedLieAlgebra abelian = GradedLieAlgebra::from_table({"X", "Y"}, {-1, -5}, {});
  CHECK(abelian.bracket(0, 1) == std::vector<Scalar>(2, Scalar(0)));
}

TEST_CASE("constructor verdict agrees with a direct Jacobi recheck") {
  ParamTable::instance().reset_to_builtin();
  std::vector<std::string> syms = {"U", "S", "St", "T", "L", "Lt"};
  std::vector<int> weights = {-4, -3, -3, -2, -1, -1};

  // the table as shipped, and with the (L, St) entry negated
  for (bool negate : {false, true}) {
    Scalar ls = -(rr() * bb()) + frac(3, 2) * rr() * rr();
    if (negate) ls = -ls;
    auto entries = g_entries(ls);
    bool threw = false;
    try {
      GradedLieAlgebra::from_table(syms, weights, entries);
    } catch (const Error& e) {
      threw = true;
      CHECK(std::string(e.what()).find("Jacobi") != std::string::npos);
    }
    bool holds = jacobi_holds_bruteforce(GradedLieAlgebra::unchecked(syms, weights, entries));
    CHECK(threw == !holds);
  }

  // a genuinely failing table, rejected with the triple named
  std::vector<BracketEntry> bad = {{"X", "Y", {{"Z", Scalar(1)}}},
                                   {"X", "Z", {{"X", Scalar(1)}}}};
  CHECK_THROWS_WITH_AS(GradedLieAlgebra::from_table({"X", "Y", "Z"}, {-1, 1, 0}, bad),
                       doctest::Contains("(X, Y, Z)"), Error);
  GradedLieAlgebra raw = GradedLieAlgebra::unchecked({"X", "Y", "Z"}, {-1, 1, 0}, bad);
  CHECK(!jacobi_holds_bruteforce(raw));

  // the same failure surfaces as a nonzero formal d of d
  StructureEquationSet eq = maurer_cartan(raw);
  bool some_dd_nonzero = false;
  for (int k = 0; k < 3; ++k)
    some_dd_nonzero = some_dd_nonzero || !formal_d(eq.d.at(k), eq).is_zero();
  CHECK(some_dd_nonzero);
}

TEST_CASE("grading violations are reported entry by entry") {
  ParamTable::instance().reset_to_builtin();
  std::vector<std::string> syms = {"U", "S", "St", "T", "L", "Lt"};
  auto entries = g_entries(-(rr() * bb()) + frac(3, 2) * rr() * rr());

  // U assigned weight -3: both length-four brackets land wrong
  GradedLieAlgebra raw =
      GradedLieAlgebra::unchecked(syms, {-3, -3, -3, -2, -1, -1}, entries);
  GradingReport rep = grading_check(raw);
  REQUIRE(rep.violations.size() == 2);
  CHECK(rep.violations[0].detail.find("[S, Lt]") != std::string::npos);
  CHECK(rep.violations[1].detail.find("[St, L]") != std::string::npos);
  CHECK(rep.violations[0].detail.find("weight -4") != std::string::npos);
  CHECK_THROWS_WITH_AS(GradedLieAlgebra::from_table(syms, {-3, -3, -3, -2, -1, -1}, entries),
                       doctest::Contains("GradingViolation"), Error);

  CHECK(grading_check(builtin_g_rb()).pass());
  CHECK(grading_check(GradedLieAlgebra::from_table({"X", "Y"}, {7, -9}, {})).pass());
}

TEST_CASE("table rejects malformed input") {
  ParamTable::instance().reset_to_builtin();
  CHECK_THROWS_WITH_AS(GradedLieAlgebra::from_table({"X", "X"}, {-1, -1}, {}),
                       doctest::Contains("duplicate basis symbol"), Error);
  CHECK_THROWS_WITH_AS(GradedLieAlgebra::from_table({"X"}, {-1, -2}, {}),
                       doctest::Contains("one weight per"), Error);
  CHECK_THROWS_WITH_AS(
      GradedLieAlgebra::from_table({"X", "Y"}, {-1, -1}, {{"X", "Q", {{"Y", Scalar(1)}}}}),
      doctest::Contains("unknown basis symbol"), Error);
  CHECK_THROWS_WITH_AS(
      GradedLieAlgebra::from_table({"X", "Y"}, {-1, -2}, {{"X", "X", {{"Y", Scalar(1)}}}}),
      doctest::Contains("itself"), Error);
  std::vector<BracketEntry> dup = {{"X", "Y", {{"Z", Scalar(1)}}},
                                   {"Y", "X", {{"Z", Scalar(1)}}}};
  CHECK_THROWS_WITH_AS(GradedLieAlgebra::from_table({"X", "Y", "Z"}, {-1, -1, -2}, dup),
                       doctest::Contains("duplicate bracket entry"), Error);
  CHECK_THROWS_WITH_AS(parse_algebra_json("{"), doctest::Contains("SyntaxError"), Error);
  CHECK_THROWS_WITH_AS(parse_algebra_json("{\"basis\": []}"),
                       doctest::Contains("SyntaxError"), Error);
}

TEST_CASE("dualization emits the expected derivative set") {
  ParamTable::instance().reset_to_builtin();
  StructureEquationSet eq = maurer_cartan(builtin_g_rb(), g_rb_dual_names(), g_rb_dual_latex());
  REQUIRE(eq.frame->size() == 6);
  CHECK(eq.frame->name(0) == "mu''");
  CHECK(eq.frame->name(5) == "zetat''");

  Scalar r = rr(), b = bb();
  // d mu'' = (rb - 3/2 r^2) zeta''^sigmat'' + (rb + 3/2 r^2) zetat''^sigma''
  DiffForm dmu(eq.frame, 2);
  dmu.add_term({4, 2}, kc(r * b - frac(3, 2) * r * r));
  dmu.add_term({5, 1}, kc(r * b + frac(3, 2) * r * r));
  CHECK(eq.d.at(0) == dmu);

  DiffForm dsigma(eq.frame, 2);
  dsigma.add_term({5, 3}, kc(Scalar(2) * r));
  CHECK(eq.d.at(1) == dsigma);

  DiffForm dsigmat(eq.frame, 2);
  dsigmat.add_term({4, 3}, kc(Scalar(2) * r));
  CHECK(eq.d.at(2) == dsigmat);

  DiffForm drho(eq.frame, 2);
  drho.add_term({4, 5}, kc(r * r));
  CHECK(eq.d.at(3) == drho);

  CHECK(eq.d.at(4).is_zero());
  CHECK(eq.d.at(5).is_zero());

  // formal d of every equation vanishes, the differential restatement of Jacobi
  for (int k = 0; k < 6; ++k) CHECK(formal_d(eq.d.at(k), eq).is_zero());

  // simple sanity cases
  StructureEquationSet heis = maurer_cartan(GradedLieAlgebra::from_table(
      {"X", "Y", "Z"}, {-1, -1, -2}, {{"X", "Y", {{"Z", Scalar(1)}}}}));
  DiffForm dgamma(heis.frame, 2);
  dgamma.add_term({0, 1}, kc(Scalar(-1)));
  CHECK(heis.d.at(2) == dgamma);
  CHECK(heis.d.at(0).is_zero());
  CHECK(heis.frame->name(2) == "alpha3");

  StructureEquationSet ab = maurer_cartan(GradedLieAlgebra::from_table({"X", "Y"}, {-1, -2}, {}));
  CHECK(ab.d.at(0).is_zero());
  CHECK(ab.d.at(1).is_zero());
}

TEST_CASE("reduction chain reaches the stated presentations") {
  ParamTable::instance().reset_to_builtin();
  Scalar r = rr(), b = bb();
  StructureEquationSet s1 = maurer_cartan(builtin_g_rb(), g_rb_dual_names(), g_rb_dual_latex());
  StructureEquationSet s2 = rescale_chain(s1, g_rb_reduction_chain());

  CHECK(s2.frame->name(0) == "mu");
  CHECK(s2.frame->name(2) == "sigmat");
  CHECK(s2.frame->name(4) == "zeta");

  // d mu = 3r zeta^sigma + 2b zeta^sigmat - 2b zetat^sigma - 3r zetat^sigmat
  DiffForm dmu(s2.frame, 2);
  dmu.add_term({4, 1}, kc(Scalar(3) * r));
  dmu.add_term({4, 2}, kc(Scalar(2) * b));
  dmu.add_term({5, 1}, kc(Scalar(-2) * b));
  dmu.add_term({5, 2}, kc(Scalar(-3) * r));
  CHECK(s2.d.at(0) == dmu);

  DiffForm dsigma(s2.frame, 2);
  dsigma.add_term({5, 3}, kc(Scalar(-2)));
  CHECK(s2.d.at(1) == dsigma);

  DiffForm dsigmat(s2.frame, 2);
  dsigmat.add_term({4, 3}, kc(Scalar(2)));
  CHECK(s2.d.at(2) == dsigmat);

  DiffForm drho(s2.frame, 2);
  drho.add_term({4, 5}, kc(Scalar(-2)));
  CHECK(s2.d.at(3) == drho);

  CHECK(s2.d.at(4).is_zero());
  CHECK(s2.d.at(5).is_zero());

  // final rescale plus the rho-equation swap
  StructureEquationSet s3 = rescale_chain(s2, {g_rb_final_change()});
  s3 = swap_equation(s3, 3, "rho_new", g_rb_rho_swap_factor(), "\\rho^{\\rm new}");
  REQUIRE(s3.frame->size() == 7);
  CHECK(s3.frame->name(0) == "mu_new");
  CHECK(s3.frame->name(3) == "rho");
  CHECK(s3.frame->name(6) == "rho_new");
  CHECK(!s3.d.count(3));

  Scalar nine4 = frac(9, 4) * r * r / (b * b);
  Scalar nine2 = frac(9, 2) * r * r / (b * b);
  DiffForm dmu3(s3.frame, 2);
  dmu3.add_term({4, 1}, kc(nine4));
  dmu3.add_term({4, 2}, kc(Scalar(1)));
  dmu3.add_term({5, 1}, kc(Scalar(-1)));
  dmu3.add_term({5, 2}, kc(Scalar(-1)));
  CHECK(s3.d.at(0) == dmu3);

  // old rho stays on the right sides of the sigma pair
  DiffForm dsig3(s3.frame, 2);
  dsig3.add_term({5, 3}, kc(Scalar(-2)));
  CHECK(s3.d.at(1) == dsig3);
  DiffForm dsigt3(s3.frame, 2);
  dsigt3.add_term({4, 3}, kc(nine2));
  CHECK(s3.d.at(2) == dsigt3);

  DiffForm drho3(s3.frame, 2);
  drho3.add_term({4, 5}, kc(Scalar(-2)));
  CHECK(s3.d.at(6) == drho3);
  CHECK(s3.d.at(4).is_zero());
  CHECK(s3.d.at(5).is_zero());

  // identity chain is the identity
  StructureEquationSet same = rescale_chain(s2, {BasisChange::identity(6)});
  for (int k = 0; k < 6; ++k) CHECK(same.d.at(k) == s2.d.at(k));

  // singular step rejected
  BasisChange sing = BasisChange::identity(6);
  sing.set(0, 0, Scalar(0));
  CHECK_THROWS_WITH_AS(rescale_chain(s2, {sing}), doctest::Contains("BasisNotInvertible"),
                       Error);
}

TEST_CASE("a two step chain equals its composed single step") {
  ParamTable::instance().reset_to_builtin();
  StructureEquationSet s1 = maurer_cartan(builtin_g_rb(), g_rb_dual_names(), g_rb_dual_latex());
  auto chain = g_rb_reduction_chain();
  StructureEquationSet via_chain = rescale_chain(s1, chain);

  BasisChange composed;
  composed.matrix.assign(6, std::vector<Scalar>(6, Scalar(0)));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int l = 0; l < 6; ++l)
        composed.matrix[i][j] =
            composed.matrix[i][j] + chain[0].matrix[i][l] * chain[1].matrix[l][j];
  composed.renames = chain[1].renames;
  StructureEquationSet via_single = rescale_chain(s1, {composed});

  for (int k = 0; k < 6; ++k) CHECK(via_chain.d.at(k) == via_single.d.at(k));
  for (int k = 0; k < 6; ++k) CHECK(via_chain.frame->name(k) == via_single.frame->name(k));
}

TEST_CASE("squared radius rewrite lands on the model parameters") {
  ParamTable::instance().reset_to_builtin();
  Scalar a = Scalar::param(param::a), ab = Scalar::param(param::a_bar), b = bb();
  StructureEquationSet s1 = maurer_cartan(builtin_g_rb(), g_rb_dual_names(), g_rb_dual_latex());
  StructureEquationSet s3 = rescale_chain(s1, g_rb_reduction_chain());
  s3 = rescale_chain(s3, {g_rb_final_change()});
  s3 = swap_equation(s3, 3, "rho_new", g_rb_rho_swap_factor(), "\\rho^{\\rm new}");
  StructureEquationSet rewritten =
      map_coeffs(s3, [](const Scalar& s) { return s.rewrite_r_square(); });

  CHECK(rewritten.d.at(0).coefficient({4, 1}) == kc(frac(9, 4) * a * ab / (b * b)));
  CHECK(rewritten.d.at(2).coefficient({4, 3}) == kc(frac(9, 2) * a * ab / (b * b)));
  CHECK(rewritten.d.at(6).coefficient({4, 5}) == kc(Scalar(-2)));
  CHECK(rewritten.d.at(0).coefficient({4, 2}) == kc(Scalar(1)));
}
