#pragma once

// Vector fields with rational-function coefficients, Lie brackets, and the
// bracket-generated frame of a model: L, conj(L), T = i[L, conj L],
// S = [L, T], conj(S), and a real length-four direction U.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "crmoduli/coordring.hpp"
#include "crmoduli/model.hpp"

namespace crmoduli {

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(CoordSpacePtr sp) : sp_(std::move(sp)) {}
  // The coordinate field d/dx_i.
  static VectorField basis(CoordSpacePtr sp, int i);

  const CoordSpacePtr& space() const { return sp_; }
  const std::map<int, CoordRat>& coeffs() const { return c_; }
  CoordRat coeff(int i) const;
  void set_coeff(int i, CoordRat v);  // zero coefficients are elided

  bool is_zero() const { return c_.empty(); }
  VectorField operator+(const VectorField& o) const;
  VectorField operator-(const VectorField& o) const;
  VectorField operator-() const;
  VectorField scale(const CoordRat& f) const;
  VectorField scale(const Scalar& s) const;
  VectorField conj() const;
  bool operator==(const VectorField& o) const { return c_ == o.c_; }

  // Derivation action on a function.
  CoordRat apply(const CoordRat& f) const;

  // Transplant into a space with the same layout.
  VectorField into(const CoordSpacePtr& target) const;

  std::string str() const;

 private:
  CoordSpacePtr sp_;
  std::map<int, CoordRat> c_;
};

VectorField lie_bracket(const VectorField& x, const VectorField& y);

// The tangential holomorphic generator of a model: with defining equations
// w_j - conj(w_j) = P_j this is d/dz + sum_j (1/2)(dP_j/dz) d/du_j, the
// restriction to the manifold of the unique extrinsic field d/dz + sum A_j
// d/dw_j annihilating every defining function (A_j = dP_j/dz).
VectorField cr_generator(const CRModel& m);

struct Frame {
  CoordSpacePtr space;
  std::vector<std::string> labels;  // L, Lbar, T, S, Sbar, U
  std::vector<VectorField> fields;
  CoordRat independence;  // determinant of the coefficient matrix, nonzero

  int index_of(const std::string& label) const;
  const VectorField& by_label(const std::string& label) const;
  std::string str() const;
};

// Iterated-bracket frame of a type (1,4) model: T = i[L, conj L], S = [L, T],
// conj(S) = [conj L, T], and U the first nonvanishing length-four bracket
// among [L,S], [L,conj S], [conj L,S], [conj L,conj S], rescaled to the real
// normalization 12 d/du4. Fails with DegenerateModel when no length-four
// direction exists or the six fields are dependent.
Frame build_frame(const CRModel& m);

// Exact coefficients of x in the frame; NotInSpan when x lives on a
// different coordinate space or outside the span.
std::vector<CoordRat> decompose(const VectorField& x, const Frame& f);

struct StructureFunctions {
  std::vector<std::string> labels;
  std::map<std::pair<int, int>, std::vector<CoordRat>> entries;  // i < j

  // Signed lookup valid for both orders; zero vector for i == j.
  std::vector<CoordRat> bracket(int i, int j) const;
  bool all_constant() const;
  std::string str() const;
};

StructureFunctions commutator_table(const Frame& f);

}  // namespace crmoduli
