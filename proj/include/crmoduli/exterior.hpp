#pragma once

// Exterior algebra over a declared basis of 1-form symbols: wedge products,
// basis changes, structure-equation sets, dual coframes of a frame, and the
// honest exterior derivative through coordinate expansions.

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "crmoduli/coordring.hpp"
#include "crmoduli/vecfield.hpp"

namespace crmoduli {

class Coframe;
using CoframePtr = std::shared_ptr<const Coframe>;

// Ordered 1-form symbols, optional conjugation pairing, and an optional
// coordinate expansion (each symbol as a combination of the dx_i, with the
// square expansion matrix inverted once at installation).
class Coframe {
 public:
  int add(const std::string& name, const std::string& latex = "");
  void set_conj(int i, int j);  // mutual pairing; self-pair for real symbols

  int size() const { return static_cast<int>(syms_.size()); }
  int index(const std::string& name) const;  // -1 if absent
  const std::string& name(int i) const { return syms_.at(i).name; }
  const std::string& latex(int i) const { return syms_.at(i).latex; }
  int conj(int i) const { return syms_.at(i).conj; }

  // Installs symbol_k = sum_i matrix[k][i] dx_i; the matrix must be square
  // over the space and invertible (else BasisNotInvertible).
  void set_expansion(CoordSpacePtr sp, std::vector<std::vector<CoordRat>> matrix);
  bool expanded() const { return !expansion_.empty(); }
  const CoordSpacePtr& space() const { return sp_; }
  const std::vector<std::vector<CoordRat>>& expansion() const { return expansion_; }
  // dx_i = sum_k inverse()[i][k] symbol_k
  const std::vector<std::vector<CoordRat>>& inverse() const { return inverse_; }

 private:
  struct Sym {
    std::string name;
    std::string latex;
    int conj;
  };
  std::vector<Sym> syms_;
  std::map<std::string, int> by_name_;
  CoordSpacePtr sp_;
  std::vector<std::vector<CoordRat>> expansion_;
  std::vector<std::vector<CoordRat>> inverse_;
};

// A degree-p form: strictly increasing index tuples over the coframe (or
// over coordinate differentials during differentiation) with CoordRat
// coefficients; reordering signs are absorbed at insertion and zero
// coefficients elided, so equal forms have equal term maps.
class DiffForm {
 public:
  using Terms = std::map<std::vector<int>, CoordRat>;

  DiffForm() = default;
  DiffForm(CoframePtr cf, int degree) : cf_(std::move(cf)), deg_(degree) {}
  static DiffForm symbol(CoframePtr cf, int i);

  const CoframePtr& coframe() const { return cf_; }
  int degree() const { return deg_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  CoordRat coefficient(std::vector<int> idx) const;  // 0 when absent

  DiffForm operator+(const DiffForm& o) const;
  DiffForm operator-(const DiffForm& o) const;
  DiffForm operator-() const;
  DiffForm scale(const CoordRat& c) const;
  DiffForm scale(const Scalar& s) const;
  DiffForm wedge(const DiffForm& o) const;
  bool operator==(const DiffForm& o) const { return deg_ == o.deg_ && t_ == o.t_; }

  // Sorts the indices, folds the sign into the coefficient, drops repeats.
  void add_term(std::vector<int> idx, CoordRat c);

  DiffForm map_coeffs(const std::function<Scalar(const Scalar&)>& fn) const;

  std::string str() const;
  std::string latex() const;

 private:
  CoframePtr cf_;
  int deg_ = 0;
  Terms t_;
};

// old_k = sum_l matrix[k][l] new_l, mapping forms over `from` to forms over
// `to`. Symbol counts must agree.
struct BasisRelation {
  CoframePtr from;
  CoframePtr to;
  std::vector<std::vector<CoordRat>> matrix;

  static BasisRelation rename(CoframePtr from, CoframePtr to);  // identity matrix
  BasisRelation& set(int old_i, int new_j, const CoordRat& c);
  BasisRelation& set(int old_i, int new_j, const Scalar& s);
};

DiffForm change_basis(const DiffForm& f, const BasisRelation& rel);

// The derivatives d(symbol_k) of a coframe's 1-forms, all degree 2, with the
// subset of symbols that play the role of group (Maurer-Cartan) forms.
class StructureEquationSet {
 public:
  CoframePtr frame;
  std::set<int> mc_symbols;
  std::map<int, DiffForm> d;

  const DiffForm& of(const std::string& symbol) const;
  std::string str() const;
  std::string latex() const;
};

// Rewrites both sides of every equation through an invertible constant
// relation: d(new_m) = sum_k inv[m][k] d(old_k), right sides substituted.
// Non-constant relation entries are rejected (the formula would need an
// extra d(relation) term).
StructureEquationSet change_basis(const StructureEquationSet& s, const BasisRelation& rel);

// d of a form with constant coefficients, driven by the equation set:
// d(w_{k1}^...^w_{kp}) expands by the graded Leibniz rule with each d(w_k)
// taken from s.
DiffForm formal_d(const DiffForm& f, const StructureEquationSet& s);

// Applies fn to every coefficient of every equation.
StructureEquationSet map_coeffs(const StructureEquationSet& s,
                                const std::function<Scalar(const Scalar&)>& fn);

// Replaces the equation of one symbol by the equation of its rescaled
// companion new_name := factor * symbol: the coframe gains new_name, the
// d-entry of the old symbol is dropped, and d(new_name) = factor * d(old)
// is installed, with the old symbol rewritten as (1/factor) new_name inside
// that one right side. Other right sides keep the old symbol, so the result
// presents a deliberately mixed basis. Any coordinate expansion is dropped.
StructureEquationSet swap_equation(const StructureEquationSet& s, int sym,
                                   const std::string& new_name, const Scalar& factor,
                                   const std::string& new_latex = "");

// Introduces the rescaled companion new_name := factor * symbol into the
// coframe and rewrites symbol = (1/factor) new_name inside the right side of
// the single equation d(target). Every other equation is untouched and no
// equation is added or removed, so the result presents a deliberately mixed
// basis with the companion appearing in one right side only.
StructureEquationSet replace_in_rhs(const StructureEquationSet& s, int target, int sym,
                                    const std::string& new_name, const Scalar& factor,
                                    const std::string& new_latex = "");

// The coframe dual to a frame with constant structure functions, with its
// coordinate expansion (inverse transpose of the frame coefficients), and
// the dual structure equations d w^k = -sum_{i<j} c^k_ij w^i ^ w^j.
// The six-field frame (L, Lbar, T, S, Sbar, U) dualizes in the order
// (U, S, Sbar, T, L, Lbar) to (mu0, sigma0, sigmabar0, rho0, zeta0, zetabar0).
StructureEquationSet dual_structure(const Frame& f, const StructureFunctions& t);

// Exterior derivative through the coordinate expansions of f's coframe:
// expand, differentiate coefficients, re-express in the declared symbols.
DiffForm exterior_derivative(const DiffForm& f);

}  // namespace crmoduli
