#include "crmoduli/liealg.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace crmoduli {

namespace {

// "-r^2*T + 2*S" style rendering of a coefficient vector over the basis
std::string combo_str(const std::vector<Scalar>& cs, const std::vector<std::string>& syms) {
  std::string out;
  for (size_t k = 0; k < cs.size(); ++k) {
    if (cs[k].is_zero()) continue;
    std::string piece;
    if (cs[k] == Scalar(1))
      piece = syms[k];
    else if (cs[k] == Scalar(-1))
      piece = "-" + syms[k];
    else {
      std::string c = cs[k].str();
      bool simple = c.find_first_of("+- ") == std::string::npos ||
                    (c[0] == '-' && c.find_first_of("+- ", 1) == std::string::npos);
      piece = (simple ? c : "(" + c + ")") + "*" + syms[k];
    }
    if (out.empty())
      out = piece;
    else if (piece[0] == '-')
      out += " - " + piece.substr(1);
    else
      out += " + " + piece;
  }
  return out.empty() ? "0" : out;
}

}  // namespace

int GradedLieAlgebra::index(const std::string& sym) const {
  for (size_t i = 0; i < syms_.size(); ++i)
    if (syms_[i] == sym) return static_cast<int>(i);
  return -1;
}

GradedLieAlgebra GradedLieAlgebra::unchecked(std::vector<std::string> symbols,
                                             std::vector<int> weights,
                                             const std::vector<BracketEntry>& entries) {
  if (symbols.empty()) fail("SyntaxError", "a Lie algebra needs at least one basis symbol");
  if (symbols.size() != weights.size())
    fail("SyntaxError", "one weight per basis symbol expected");
  GradedLieAlgebra L;
  L.syms_ = std::move(symbols);
  L.weights_ = std::move(weights);
  int n = L.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (L.syms_[i] == L.syms_[j]) fail("SyntaxError", "duplicate basis symbol " + L.syms_[i]);
  L.c_.assign(n, std::vector<std::vector<Scalar>>(n, std::vector<Scalar>(n, Scalar(0))));

  std::set<std::pair<int, int>> seen;
  for (const auto& e : entries) {
    int i = L.index(e.x), j = L.index(e.y);
    if (i < 0) fail("SyntaxError", "unknown basis symbol '" + e.x + "'");
    if (j < 0) fail("SyntaxError", "unknown basis symbol '" + e.y + "'");
    bool trivial = true;
    for (const auto& [sym, c] : e.coeffs) {
      int k = L.index(sym);
      if (k < 0) fail("SyntaxError", "unknown basis symbol '" + sym + "'");
      if (!c.is_zero()) trivial = false;
      L.c_[i][j][k] = L.c_[i][j][k] + c;
      L.c_[j][i][k] = L.c_[j][i][k] - c;
    }
    if (i == j && !trivial)
      fail("SyntaxError", "a bracket of a symbol with itself must vanish: [" + e.x + ", " +
                              e.y + "]");
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second)
      fail("SyntaxError", "duplicate bracket entry [" + e.x + ", " + e.y + "]");
  }
  return L;
}

GradedLieAlgebra GradedLieAlgebra::from_table(std::vector<std::string> symbols,
                                              std::vector<int> weights,
                                              const std::vector<BracketEntry>& entries) {
  GradedLieAlgebra L = unchecked(std::move(symbols), std::move(weights), entries);
  GradingReport g = grading_check(L);
  if (!g.pass()) fail("GradingViolation", g.violations.front().detail);
  if (auto bad = jacobi_check(L))
    fail("JacobiViolation", "Jacobi identity fails on (" + L.syms_[(*bad)[0]] + ", " +
                                L.syms_[(*bad)[1]] + ", " + L.syms_[(*bad)[2]] + ")");
  return L;
}

std::string GradedLieAlgebra::str() const {
  std::ostringstream out;
  for (int i = 0; i < dim(); ++i)
    for (int j = i + 1; j < dim(); ++j) {
      bool zero = true;
      for (const Scalar& c : c_[i][j]) zero = zero && c.is_zero();
      if (zero) continue;
      out << "[" << syms_[i] << ", " << syms_[j] << "] = " << combo_str(c_[i][j], syms_)
          << "\n";
    }
  return out.str();
}

GradingReport grading_check(const GradedLieAlgebra& L) {
  GradingReport rep;
  for (int i = 0; i < L.dim(); ++i)
    for (int j = i + 1; j < L.dim(); ++j) {
      int want = L.weight(i) + L.weight(j);
      for (int k = 0; k < L.dim(); ++k) {
        if (L.bracket(i, j)[k].is_zero()) continue;
        if (L.weight(k) != want) {
          std::ostringstream d;
          d << "[" << L.symbols()[i] << ", " << L.symbols()[j] << "] has a component on "
            << L.symbols()[k] << " of weight " << L.weight(k) << "; the bracket of weights "
            << L.weight(i) << " and " << L.weight(j) << " must land in weight " << want;
          rep.violations.push_back({i, j, d.str()});
        }
      }
    }
  return rep;
}

std::string GradingReport::str() const {
  if (pass()) return "grading: pass";
  std::ostringstream out;
  for (const auto& v : violations) out << v.detail << "\n";
  return out.str();
}

std::optional<std::array<int, 3>> jacobi_check(const GradedLieAlgebra& L) {
  int n = L.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          Scalar s(0);
          for (int l = 0; l < n; ++l) {
            s = s + L.bracket(i, j)[l] * L.bracket(l, k)[m];
            s = s + L.bracket(j, k)[l] * L.bracket(l, i)[m];
            s = s + L.bracket(k, i)[l] * L.bracket(l, j)[m];
          }
          if (!s.is_zero()) return std::array<int, 3>{i, j, k};
        }
  return std::nullopt;
}

StructureEquationSet maurer_cartan(const GradedLieAlgebra& L) {
  std::vector<std::string> names, latex;
  for (int k = 1; k <= L.dim(); ++k) {
    names.push_back("alpha" + std::to_string(k));
    latex.push_back("\\alpha_{" + std::to_string(k) + "}");
  }
  return maurer_cartan(L, names, latex);
}

StructureEquationSet maurer_cartan(const GradedLieAlgebra& L,
                                   const std::vector<std::string>& names,
                                   const std::vector<std::string>& latex) {
  int n = L.dim();
  if (static_cast<int>(names.size()) != n)
    fail("SyntaxError", "one dual name per basis symbol expected");
  Coframe cf;
  for (int k = 0; k < n; ++k)
    cf.add(names[k], k < static_cast<int>(latex.size()) ? latex[k] : "");
  CoframePtr cfp = std::make_shared<const Coframe>(std::move(cf));

  StructureEquationSet out;
  out.frame = cfp;
  for (int k = 0; k < n; ++k) {
    DiffForm f(cfp, 2);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Scalar& c = L.bracket(i, j)[k];
        if (!c.is_zero()) f.add_term({i, j}, CoordRat(CoordSpacePtr(), -c));
      }
    out.d[k] = f;
  }
  return out;
}

BasisChange BasisChange::identity(int n) {
  BasisChange b;
  b.matrix.assign(n, std::vector<Scalar>(n, Scalar(0)));
  for (int i = 0; i < n; ++i) b.matrix[i][i] = Scalar(1);
  return b;
}

BasisChange& BasisChange::set(int old_i, int new_j, const Scalar& s) {
  matrix.at(old_i).at(new_j) = s;
  return *this;
}

BasisChange& BasisChange::rename(int k, const std::string& name, const std::string& latex) {
  renames[k] = {name, latex};
  return *this;
}

StructureEquationSet rescale_chain(const StructureEquationSet& s,
                                   const std::vector<BasisChange>& chain) {
  StructureEquationSet cur = s;
  for (const auto& step : chain) {
    int n = cur.frame->size();
    if (static_cast<int>(step.matrix.size()) != n)
      fail("BasisNotInvertible", "basis change must be square over the current frame");
    for (const auto& row : step.matrix)
      if (static_cast<int>(row.size()) != n)
        fail("BasisNotInvertible", "basis change must be square over the current frame");

    Coframe cf;
    for (int k = 0; k < n; ++k) {
      auto it = step.renames.find(k);
      if (it == step.renames.end())
        cf.add(cur.frame->name(k), cur.frame->latex(k));
      else
        cf.add(it->second.first, it->second.second);
    }
    for (int k = 0; k < n; ++k)
      if (cur.frame->conj(k) > k) cf.set_conj(k, cur.frame->conj(k));
    CoframePtr cfp = std::make_shared<const Coframe>(std::move(cf));

    BasisRelation rel = BasisRelation::rename(cur.frame, cfp);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rel.matrix[i][j] = CoordRat(CoordSpacePtr(), step.matrix[i][j]);
    cur = change_basis(cur, rel);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Built-in table and its reduction chain

GradedLieAlgebra builtin_g_rb() {
  Scalar r = Scalar::param(param::r);
  Scalar b = Scalar::param(param::b);
  Scalar r2_32 = Scalar(GaussianRational(BigRat(3, 2))) * r * r;
  std::vector<BracketEntry> entries = {
      {"L", "Lt", {{"T", -(r * r)}}},
      {"L", "T", {{"St", Scalar(-2) * r}}},
      {"L", "St", {{"U", -(r * b) + r2_32}}},
      {"Lt", "T", {{"S", Scalar(-2) * r}}},
      {"Lt", "S", {{"U", -(r * b) - r2_32}}},
  };
  return GradedLieAlgebra::from_table({"U", "S", "St", "T", "L", "Lt"},
                                      {-4, -3, -3, -2, -1, -1}, entries);
}

GradedLieAlgebra parse_algebra_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail("SyntaxError", std::string("algebra table: ") + e.what());
  }
  std::vector<std::string> symbols;
  std::vector<int> weights;
  std::vector<BracketEntry> entries;
  try {
    for (const auto& b : j.at("basis")) {
      symbols.push_back(b.at("sym").get<std::string>());
      weights.push_back(b.at("weight").get<int>());
    }
    for (const auto& e : j.at("brackets")) {
      BracketEntry be;
      be.x = e.at("i").get<std::string>();
      be.y = e.at("j").get<std::string>();
      for (const auto& [sym, val] : e.at("coeffs").items())
        be.coeffs[sym] = parse_scalar(val.get<std::string>());
      entries.push_back(std::move(be));
    }
  } catch (const nlohmann::json::exception& e) {
    fail("SyntaxError", std::string("algebra table: ") + e.what());
  }
  return GradedLieAlgebra::from_table(std::move(symbols), std::move(weights), entries);
}

std::vector<std::string> g_rb_dual_names() {
  return {"mu''", "sigma''", "sigmat''", "rho''", "zeta''", "zetat''"};
}

std::vector<std::string> g_rb_dual_latex() {
  return {"\\mu''",  "\\sigma''", "\\widetilde{\\sigma}''",
          "\\rho''", "\\zeta''",  "\\widetilde{\\zeta}''"};
}

std::vector<BasisChange> g_rb_reduction_chain() {
  Scalar r = Scalar::param(param::r);
  BasisChange step1 = BasisChange::identity(6);
  step1.set(4, 4, r.inverse()).set(5, 5, r.inverse());
  step1.rename(4, "zeta'", "\\zeta'").rename(5, "zetat'", "\\widetilde{\\zeta}'");

  BasisChange step2 = BasisChange::identity(6);
  step2.set(1, 1, Scalar(1)).set(1, 2, Scalar(1));
  step2.set(2, 1, Scalar(-1)).set(2, 2, Scalar(1));
  step2.set(4, 4, Scalar(1)).set(4, 5, Scalar(1));
  step2.set(5, 4, Scalar(1)).set(5, 5, Scalar(-1));
  step2.rename(0, "mu", "\\mu").rename(1, "sigma", "\\sigma");
  step2.rename(2, "sigmat", "\\widetilde{\\sigma}").rename(3, "rho", "\\rho");
  step2.rename(4, "zeta", "\\zeta").rename(5, "zetat", "\\widetilde{\\zeta}");
  return {step1, step2};
}

BasisChange g_rb_final_change() {
  Scalar r = Scalar::param(param::r);
  Scalar b = Scalar::param(param::b);
  BasisChange step = BasisChange::identity(6);
  step.set(0, 0, Scalar(2) * b);
  step.set(2, 2, Scalar(2) * b / (Scalar(3) * r));
  step.set(4, 4, Scalar(3) * r / (Scalar(2) * b));
  step.rename(0, "mu_new", "\\mu^{\\rm new}");
  step.rename(2, "sigmat_new", "\\widetilde{\\sigma}^{\\rm new}");
  step.rename(4, "zeta_new", "\\zeta^{\\rm new}");
  return step;
}

Scalar g_rb_rho_swap_factor() {
  return Scalar(2) * Scalar::param(param::b) / (Scalar(3) * Scalar::param(param::r));
}

}  // namespace crmoduli
