#pragma once

// The equivalence pipeline for the five-dimensional models: lift the flat
// coframe through the ambiguity group, compute the Maurer-Cartan forms of
// the group honestly as dg.g^{-1}, read off structure equations with their
// torsion, absorb what a change of Maurer-Cartan forms can absorb, normalize
// the remaining group parameters against the essential torsion, prolong, and
// reform the reduced equations until the coefficient set is canonical.
//
// All exterior calculus runs on the product of the model coordinates with
// the group coordinates, so dg ^ Theta0 is ordinary differentiation rather
// than a special case.

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "crmoduli/exterior.hpp"
#include "crmoduli/model.hpp"

namespace crmoduli {

// The lower-triangular ambiguity group. Seven parameters a1..a7: a2..a5 and
// a7 complex, a6 real, and the leading a1 constrained by conj(a1) = eps*a1
// with eps^2 = 1. eps_sign fixes the branch to +1 or -1; 0 keeps the sign
// symbolic.
class StructureGroup {
 public:
  explicit StructureGroup(int eps_sign = 0);

  int eps_sign() const { return eps_; }
  Scalar eps() const;

  // 6x6 group element over a space containing the group coordinates, rows
  // and columns in the coframe order (mu, sigma, sigmabar, rho, zeta,
  // zetabar). conj(a1) is written as eps*a1 throughout.
  std::vector<std::vector<CoordRat>> matrix(const CoordSpacePtr& sp) const;

 private:
  int eps_;
};

// The six lifted 1-forms Theta = g * Theta0 as rows over the coordinate
// differentials of the product space (base coordinates first, then the
// twelve group coordinates).
struct LiftedCoframe {
  CoordSpacePtr space;
  StructureGroup group;
  std::vector<std::string> names;  // mu, sigma, sigmabar, rho, zeta, zetabar
  std::vector<std::vector<CoordRat>> rows;
  CoframePtr coords;  // the coordinate differentials themselves

  DiffForm form(int i) const;
  std::string str() const;
};

LiftedCoframe lift(const CRModel& m, const StructureGroup& g);

// The entries of dg.g^{-1} that survive the group's shape: twelve 1-forms
// alpha1..alpha7 and conjugates (alpha1, alpha2 real), as rows over the
// coordinate differentials of the product space. The computation verifies
// the expected matrix pattern and reality properties and refuses to return
// anything that deviates from it.
struct MaurerCartanForms {
  std::vector<std::string> names;
  std::vector<std::vector<CoordRat>> rows;

  int index(const std::string& name) const;
};

MaurerCartanForms maurer_cartan_forms(const LiftedCoframe& lc);

// Torsion coefficients keyed by (equation symbol, wedge pair j < k), indices
// into the lifted/joint coframe order. The essential subset marks residues
// that no absorption reaches and that still depend on group parameters.
struct TorsionTable {
  std::map<std::tuple<int, int, int>, Scalar> entries;
  std::set<std::tuple<int, int, int>> essential;

  Scalar at(int i, int j, int k) const;
  std::string str(const std::vector<std::string>& names) const;
};

// d Theta^i = sum a^i_js alpha_s ^ Theta^j + sum T^i_jk Theta^j ^ Theta^k
// over the joint 18-symbol coframe (six lifted forms, twelve Maurer-Cartan
// forms); every torsion coefficient is also extracted into the table as a
// parameter Scalar.
struct LiftedStructure {
  StructureEquationSet eq;
  TorsionTable torsion;
};

LiftedStructure structure_equations(const LiftedCoframe& lc, const MaurerCartanForms& mc);

// Shifts alpha_s -> alpha_s + sum_j z^s_j Theta^j, keyed by (Maurer-Cartan
// symbol index, coframe symbol index), that annihilate every absorbable
// torsion under a deterministic elimination order.
struct AbsorptionSolution {
  std::map<std::pair<int, int>, Scalar> shift;
};

struct AbsorptionOutcome {
  AbsorptionSolution solution;
  TorsionTable residual;
};

AbsorptionOutcome absorb(const StructureEquationSet& s, const TorsionTable& t);

// Solves the essential residues to zero by iterated elimination of single
// group parameters (a2..a7 and conjugates; a1 is never touched). Fails with
// a diagnostic dump when the system stalls.
std::map<ParamId, Scalar> normalize_parameters(const TorsionTable& residual);

// The reduced structure equations after normalization: the seven-symbol
// coframe (mu, sigma, sigmabar, rho, zeta, zetabar, alpha) with parameter
// coefficients, the normalized group parameters substituted and the matching
// Maurer-Cartan forms dropped along with the reduced group directions.
StructureEquationSet reduce(const LiftedStructure& ls,
                            const std::map<ParamId, Scalar>& assignment);

// Adjoins d(alpha) = 0 and moves alpha from the group symbols into the
// plain coframe. Idempotent.
StructureEquationSet prolong(const StructureEquationSet& s);

struct ReformResult {
  StructureEquationSet canonical;
  std::map<std::string, Scalar> invariants;
  std::vector<std::string> notes;  // justification tags for each step
};

// Rescales the reduced coframe until every removable coefficient is a plain
// constant. With the coupling coefficient nonzero the chain ends in the
// conjugate-equation swap and the single invariant R = a*conj(a)/b^2; with
// it zero the canonical set is constant and invariant-free.
ReformResult reform(const StructureEquationSet& s, bool b_nonzero);

// One full pipeline run with a JSON dump per stage.
struct CartanRun {
  StructureGroup group;
  LiftedCoframe lifted;
  MaurerCartanForms mc;
  LiftedStructure structure;
  AbsorptionOutcome absorption;
  std::map<ParamId, Scalar> assignment;
  StructureEquationSet reduced;
  StructureEquationSet prolonged;
  ReformResult reformed;
  bool b_nonzero = true;
  std::vector<std::pair<std::string, std::string>> stages;  // (name, json)
};

CartanRun run_cartan(const CRModel& m, int eps_sign = 0);

}  // namespace crmoduli
