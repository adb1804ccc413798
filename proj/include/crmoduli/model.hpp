#pragma once

// CR model definitions: a tube-like quadric-type manifold in C^{n+k} cut out
// by Xi_j := w_j - conj(w_j) - P_j(z, conj z) = 0. Models come from a small
// text DSL or from the built-in one-parameter-family constructor.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crmoduli/algebra.hpp"
#include "crmoduli/coordring.hpp"

namespace crmoduli {

struct ParamDecl {
  std::string name;
  Reality reality = Reality::Complex;
  bool nonzero = false;
  ParamId id = -1;

  bool operator==(const ParamDecl& o) const {
    return name == o.name && reality == o.reality && nonzero == o.nonzero;
  }
};

// Defining data of a model of type (n, k) with n = 1: the polynomials P_j in
// Xi_j = w_j - conj(w_j) - P_j. Coordinates live in a shared space laid out
// as z, conj(z), u1..uk, with weights 1, 1 and the homogeneity weight of each
// P_j on the u's (0 when a right-hand side is not weighted-homogeneous).
class CRModel {
 public:
  CRModel(std::string name, int n, int k, std::vector<ParamDecl> params,
          CoordSpacePtr space, std::vector<CoordPoly> rhs);

  const std::string& name() const { return name_; }
  int cr_dimension() const { return n_; }
  int codimension() const { return k_; }
  const std::vector<ParamDecl>& params() const { return params_; }
  const CoordSpacePtr& space() const { return space_; }

  // P_j for j in 1..k.
  const CoordPoly& rhs(int j) const;
  const std::vector<CoordPoly>& rhs_list() const { return rhs_; }

  bool operator==(const CRModel& o) const;

  // Canonical DSL text; parse_model(render()) reproduces the model.
  std::string render() const;
  std::string to_json() const;

 private:
  std::string name_;
  int n_;
  int k_;
  std::vector<ParamDecl> params_;
  CoordSpacePtr space_;
  std::vector<CoordPoly> rhs_;
};

// Parses the model DSL:
//
//   model  := header param* xi+
//   header := "model" NAME "type" "(" INT "," INT ")"
//   param  := "param" NAME ("real" | "complex") ["nonzero"]
//   xi     := "Xi" J ":" "wJ" "-" "conj(wJ)" "=" polyexpr
//
// One clause per line; defining equations must appear as Xi 1..k in order.
// Right-hand sides are polynomials in z, conj(z) with declared-parameter
// coefficients and must satisfy conj(P) = -P. Errors: SyntaxError with a
// line/position report, RealityViolation for a non-imaginary right side or a
// parameter redeclared with a different reality.
CRModel parse_model(const std::string& text);

// The type (1,4) family:
//   P1 = 2i z conj(z)
//   P2 = 2i (z^2 conj(z) + z conj(z)^2)
//   P3 = 2  (z^2 conj(z) - z conj(z)^2)
//   P4 = 2i (a z^3 conj(z) + conj(a) z conj(z)^3) + 2i b z^2 conj(z)^2
// Accepts symbolic or numeric a, b; b must be real.
CRModel builtin_m14(const Scalar& a, const Scalar& b);
CRModel builtin_m14();  // symbolic parameters a, b

// Recognizes the family shape above and returns (a, b); nullopt when the
// model is not type (1,4) or its polynomials differ from the family's.
std::optional<std::pair<Scalar, Scalar>> family_parameters(const CRModel& m);

enum class ModelClass {
  Ok,                       // genuine family member
  NotTotallyNondegenerate,  // a = 0 and b = 0: brackets never reach length 4
  ReducesToM01,             // a = 0, b != 0: equivalent to the b-normalized model
  Unchecked,                // outside the classified family; structural checks only
};

std::string to_string(ModelClass c);

struct ModelDiagnostics {
  ModelClass cls = ModelClass::Unchecked;
  std::string detail;
  bool ok() const { return cls == ModelClass::Ok; }
};

ModelDiagnostics validate_model(const CRModel& m);

}  // namespace crmoduli
