#pragma once

// Graded Lie algebras presented by exact structure constants: Jacobi and
// grading validation at construction, Maurer-Cartan dualization into a
// structure-equation set, and constant basis-change chains on those
// equations.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crmoduli/algebra.hpp"
#include "crmoduli/exterior.hpp"

namespace crmoduli {

// One table row: [x, y] = sum over coeffs of value * symbol. Rows may be
// stated in either order; each unordered pair at most once, the
// antisymmetric mirror is implied.
struct BracketEntry {
  std::string x;
  std::string y;
  std::map<std::string, Scalar> coeffs;
};

struct GradingReport {
  struct Violation {
    int i;
    int j;
    std::string detail;
  };
  std::vector<Violation> violations;
  bool pass() const { return violations.empty(); }
  std::string str() const;
};

class GradedLieAlgebra {
 public:
  // Validates the table before returning: entries must name distinct known
  // symbols, brackets must add weights (GradingViolation) and the Jacobi
  // identity must hold (JacobiViolation names a failing triple).
  static GradedLieAlgebra from_table(std::vector<std::string> symbols,
                                     std::vector<int> weights,
                                     const std::vector<BracketEntry>& entries);
  // Skips the two checks, for running the diagnostics below on a suspect
  // table.
  static GradedLieAlgebra unchecked(std::vector<std::string> symbols,
                                    std::vector<int> weights,
                                    const std::vector<BracketEntry>& entries);

  int dim() const { return static_cast<int>(syms_.size()); }
  const std::vector<std::string>& symbols() const { return syms_; }
  int weight(int i) const { return weights_.at(i); }
  int index(const std::string& sym) const;  // -1 when absent

  // Coefficient vector of [x_i, x_j] over the basis, signed in both orders.
  const std::vector<Scalar>& bracket(int i, int j) const { return c_.at(i).at(j); }

  bool operator==(const GradedLieAlgebra& o) const {
    return syms_ == o.syms_ && weights_ == o.weights_ && c_ == o.c_;
  }

  std::string str() const;

 private:
  GradedLieAlgebra() = default;
  std::vector<std::string> syms_;
  std::vector<int> weights_;
  std::vector<std::vector<std::vector<Scalar>>> c_;  // c_[i][j][k]
};

// Verifies weight additivity entry by entry; violations are reported
// rather than thrown.
GradingReport grading_check(const GradedLieAlgebra& L);

// First failing Jacobi triple (i < j < k), if any.
std::optional<std::array<int, 3>> jacobi_check(const GradedLieAlgebra& L);

// Derivatives of the dual 1-forms, d w^k = -sum_{i<j} c^k_ij w^i ^ w^j,
// over a fresh coframe. Default symbol names are alpha1..alphaN.
StructureEquationSet maurer_cartan(const GradedLieAlgebra& L);
StructureEquationSet maurer_cartan(const GradedLieAlgebra& L,
                                   const std::vector<std::string>& names,
                                   const std::vector<std::string>& latex = {});

// Constant invertible substitution old_k = sum_l matrix[k][l] new_l with
// optional renaming of the new symbols.
struct BasisChange {
  std::vector<std::vector<Scalar>> matrix;
  std::map<int, std::pair<std::string, std::string>> renames;  // index -> name, latex

  static BasisChange identity(int n);
  BasisChange& set(int old_i, int new_j, const Scalar& s);
  BasisChange& rename(int k, const std::string& name, const std::string& latex = "");
};

// Applies the changes left to right; each step must be square over the
// current frame and invertible (BasisNotInvertible).
StructureEquationSet rescale_chain(const StructureEquationSet& s,
                                   const std::vector<BasisChange>& chain);

// The built-in six-dimensional graded algebra in the real parameters r and
// b: basis (U, S, St, T, L, Lt) of weights (-4, -3, -3, -2, -1, -1) with
// [L, Lt] = -r^2 T, [L, T] = -2r St, [L, St] = (-rb + 3/2 r^2) U,
// [Lt, T] = -2r S, [Lt, S] = (-rb - 3/2 r^2) U and all other brackets zero.
GradedLieAlgebra builtin_g_rb();

// Same table read from JSON:
//   {basis: [{sym, weight}], brackets: [{i, j, coeffs: {sym: scalar-string}}]}
GradedLieAlgebra parse_algebra_json(const std::string& text);

// Dual symbol names (mu'', sigma'', sigmat'', rho'', zeta'', zetat'') for
// the built-in algebra's Maurer-Cartan coframe, and their display forms.
std::vector<std::string> g_rb_dual_names();
std::vector<std::string> g_rb_dual_latex();

// The two constant substitutions taking the built-in dual equations to the
// presentation whose mu row carries coefficients +-3r and +-2b: the zeta
// pair absorbs 1/r, then the zeta and sigma pairs mix into sums and
// differences and every name drops its primes.
std::vector<BasisChange> g_rb_reduction_chain();

// Final rescale for b != 0 (mu, sigmat and zeta absorb constants), to be
// followed by swapping the rho equation for rho_new = (2b/3r) rho.
BasisChange g_rb_final_change();
Scalar g_rb_rho_swap_factor();  // 2b/(3r)

}  // namespace crmoduli
