#include <doctest.h>

#include <fstream>
#include <sstream>

#include "crmoduli/model.hpp"

using namespace crmoduli;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("shipped model file parses to the builtin family") {
  ParamTable::instance().reset_to_builtin();
  CRModel parsed = parse_model(read_file(std::string(CRMODULI_DATA_DIR) + "/m14.model"));
  CRModel built = builtin_m14();
  CHECK(parsed == built);
  CHECK(parsed.name() == "m14");
  CHECK(parsed.cr_dimension() == 1);
  CHECK(parsed.codimension() == 4);
  REQUIRE(parsed.params().size() == 2);
  CHECK(parsed.params()[0].name == "a");
  CHECK(parsed.params()[0].reality == Reality::Complex);
  CHECK(parsed.params()[1].name == "b");
  CHECK(parsed.params()[1].reality == Reality::Real);

  // u-coordinates pick up the homogeneity weights of their right sides
  auto sp = parsed.space();
  CHECK(sp->weight(sp->index("u1")) == 2);
  CHECK(sp->weight(sp->index("u2")) == 3);
  CHECK(sp->weight(sp->index("u3")) == 3);
  CHECK(sp->weight(sp->index("u4")) == 4);
}

TEST_CASE("builtin family polynomials match the displayed defining equations") {
  ParamTable::instance().reset_to_builtin();
  CRModel m = builtin_m14();
  auto sp = m.space();
  CoordPoly z = CoordPoly::coord(sp, sp->index("z"), 1);
  CoordPoly zb = CoordPoly::coord(sp, sp->index("conj(z)"), 1);
  Scalar I = Scalar::i();

  CHECK(m.rhs(1) == (z * zb).scale(Scalar(2) * I));
  CHECK(m.rhs(2) == (z.pow(2) * zb + z * zb.pow(2)).scale(Scalar(2) * I));
  CHECK(m.rhs(3) == (z.pow(2) * zb - z * zb.pow(2)).scale(Scalar(2)));
  CoordPoly p4 = (z.pow(3) * zb).scale(Scalar(2) * I * Scalar::param(param::a)) +
                 (z * zb.pow(3)).scale(Scalar(2) * I * Scalar::param(param::a_bar)) +
                 (z.pow(2) * zb.pow(2)).scale(Scalar(2) * I * Scalar::param(param::b));
  CHECK(m.rhs(4) == p4);

  // numeric substitutions into the last defining polynomial
  CRModel m01 = builtin_m14(Scalar(0), Scalar(1));
  CHECK(m01.rhs(4) == (z.pow(2) * zb.pow(2)).scale(Scalar(2) * I));
  CRModel m10 = builtin_m14(Scalar(1), Scalar(0));
  CHECK(m10.rhs(4) == (z.pow(3) * zb + z * zb.pow(3)).scale(Scalar(2) * I));
}

TEST_CASE("defining polynomials are forced imaginary under conjugation") {
  ParamTable::instance().reset_to_builtin();
  for (int j = 1; j <= 4; ++j) {
    CoordPoly p = builtin_m14().rhs(j);
    CHECK(p.conj() == p.scale(Scalar(-1)));
  }

  // a right side violating conj(P) = -P is rejected
  std::string bad =
      "model bad type (1,1)\n"
      "Xi 1: w1 - conj(w1) = 2*z*conj(z)\n";
  CHECK_THROWS_WITH_AS(parse_model(bad), doctest::Contains("RealityViolation"), Error);

  // complex b breaks the reality of P4
  CHECK_THROWS_WITH_AS(builtin_m14(Scalar(1), Scalar::i()),
                       doctest::Contains("RealityViolation"), Error);
}

TEST_CASE("model round-trips through render and json export is well formed") {
  ParamTable::instance().reset_to_builtin();
  CRModel m = builtin_m14();
  CHECK(parse_model(m.render()) == m);

  CRModel numeric = builtin_m14(Scalar(GaussianRational::parse("1+1i")), Scalar(2));
  CHECK(parse_model(numeric.render()) == numeric);

  std::string heis =
      "model heis type (1,1)\n"
      "Xi 1: w1 - conj(w1) = 2i*z*conj(z)\n";
  CRModel h = parse_model(heis);
  CHECK(parse_model(h.render()) == h);
  CHECK(h.codimension() == 1);

  std::string j = m.to_json();
  CHECK(j.find("\"name\": \"m14\"") != std::string::npos);
  CHECK(j.find("\"type\"") != std::string::npos);
  CHECK(j.find("\"rhs\"") != std::string::npos);
}

TEST_CASE("dsl errors carry positions and honest causes") {
  ParamTable::instance().reset_to_builtin();

  auto throws_kind = [](const std::string& text, const std::string& kind) {
    try {
      parse_model(text);
      return std::string("no error");
    } catch (const Error& e) {
      if (e.kind != kind) return std::string("wrong kind: ") + e.kind;
      return std::string("ok: ") + e.what();
    }
  };

  CHECK(throws_kind("", "SyntaxError") == "ok: SyntaxError: empty model text");

  // unbalanced parenthesis in a right-hand side
  std::string unbal =
      "model x type (1,1)\n"
      "Xi 1: w1 - conj(w1) = 2i*(z*conj(z)\n";
  CHECK(throws_kind(unbal, "SyntaxError").find("Xi 1") != std::string::npos);

  // w-mixing across the equation
  std::string mix =
      "model x type (1,2)\n"
      "Xi 1: w1 - conj(w2) = 2i*z*conj(z)\n"
      "Xi 2: w2 - conj(w2) = 2i*z*conj(z)\n";
  CHECK(throws_kind(mix, "SyntaxError").find("w1") != std::string::npos);

  // w on the right-hand side
  std::string wrhs =
      "model x type (1,1)\n"
      "Xi 1: w1 - conj(w1) = 2i*z*conj(z) + w1\n";
  CHECK(throws_kind(wrhs, "SyntaxError").find("may not involve w1") != std::string::npos);

  // undeclared parameter
  std::string undecl =
      "model x type (1,1)\n"
      "Xi 1: w1 - conj(w1) = 2i*c*z*conj(z)\n";
  CHECK(throws_kind(undecl, "SyntaxError").find("unknown name 'c'") != std::string::npos);

  // wrong equation count
  std::string missing = "model x type (1,2)\nXi 1: w1 - conj(w1) = 2i*z*conj(z)\n";
  CHECK(throws_kind(missing, "SyntaxError").find("2 defining equations") != std::string::npos);

  // out-of-order equations
  std::string disorder =
      "model x type (1,2)\n"
      "Xi 2: w2 - conj(w2) = 2i*z*conj(z)\n"
      "Xi 1: w1 - conj(w1) = 2i*z*conj(z)\n";
  CHECK(throws_kind(disorder, "SyntaxError").find("expected Xi 1") != std::string::npos);

  // parameter redeclared with a different reality
  std::string clash =
      "model x type (1,1)\n"
      "param b complex\n"
      "Xi 1: w1 - conj(w1) = 2i*z*conj(z)\n";
  CHECK(throws_kind(clash, "RealityViolation").find("different reality") != std::string::npos);
}

TEST_CASE("family recognition extracts the parameter pair") {
  ParamTable::instance().reset_to_builtin();

  auto ab = family_parameters(builtin_m14());
  REQUIRE(ab.has_value());
  CHECK(ab->first == Scalar::param(param::a));
  CHECK(ab->second == Scalar::param(param::b));

  Scalar av(GaussianRational::parse("1+1i"));
  auto numeric = family_parameters(builtin_m14(av, Scalar(2)));
  REQUIRE(numeric.has_value());
  CHECK(numeric->first == av);
  CHECK(numeric->second == Scalar(2));

  auto zero = family_parameters(builtin_m14(Scalar(0), Scalar(0)));
  REQUIRE(zero.has_value());
  CHECK(zero->first.is_zero());

  // a (1,4) model with a mismatched P2 falls outside the family
  std::string other =
      "model other type (1,4)\n"
      "Xi 1: w1 - conj(w1) = 2i*z*conj(z)\n"
      "Xi 2: w2 - conj(w2) = 2i*(z^2*conj(z) + z*conj(z)^2)\n"
      "Xi 3: w3 - conj(w3) = 2i*(z^2*conj(z) + z*conj(z)^2)\n"
      "Xi 4: w4 - conj(w4) = 2i*z^2*conj(z)^2\n";
  CHECK(!family_parameters(parse_model(other)).has_value());

  // an extra monomial in P4 also disqualifies
  std::string extra =
      "model extra type (1,4)\n"
      "Xi 1: w1 - conj(w1) = 2i*z*conj(z)\n"
      "Xi 2: w2 - conj(w2) = 2i*(z^2*conj(z) + z*conj(z)^2)\n"
      "Xi 3: w3 - conj(w3) = 2*(z^2*conj(z) - z*conj(z)^2)\n"
      "Xi 4: w4 - conj(w4) = 2i*z^2*conj(z)^2 + 2i*z*conj(z)\n";
  CHECK(!family_parameters(parse_model(extra)).has_value());
}

TEST_CASE("validation separates the degenerate family members") {
  ParamTable::instance().reset_to_builtin();

  CHECK(validate_model(builtin_m14()).cls == ModelClass::Ok);
  CHECK(validate_model(builtin_m14(Scalar(GaussianRational::parse("1+1i")), Scalar(2))).cls ==
        ModelClass::Ok);
  CHECK(validate_model(builtin_m14(Scalar(1), Scalar(0))).cls == ModelClass::Ok);

  CHECK(validate_model(builtin_m14(Scalar(0), Scalar(0))).cls ==
        ModelClass::NotTotallyNondegenerate);
  CHECK(validate_model(builtin_m14(Scalar(0), Scalar(5))).cls == ModelClass::ReducesToM01);

  std::string heis =
      "model heis type (1,1)\n"
      "Xi 1: w1 - conj(w1) = 2i*z*conj(z)\n";
  ModelDiagnostics d = validate_model(parse_model(heis));
  CHECK(d.cls == ModelClass::Unchecked);
  CHECK(to_string(d.cls) == "unchecked");
}
