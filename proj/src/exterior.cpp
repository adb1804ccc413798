#include "crmoduli/exterior.hpp"

#include <algorithm>
#include <sstream>

#include "crmoduli/detail/linsolve.hpp"

namespace crmoduli {

// ---------------------------------------------------------------------------
// Coframe

int Coframe::add(const std::string& name, const std::string& latex) {
  if (by_name_.count(name)) fail("Internal", "duplicate 1-form symbol " + name);
  int i = size();
  syms_.push_back({name, latex.empty() ? name : latex, i});
  by_name_[name] = i;
  return i;
}

void Coframe::set_conj(int i, int j) {
  syms_.at(i).conj = j;
  syms_.at(j).conj = i;
}

int Coframe::index(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

void Coframe::set_expansion(CoordSpacePtr sp, std::vector<std::vector<CoordRat>> matrix) {
  if (static_cast<int>(matrix.size()) != size() ||
      (size() && static_cast<int>(matrix[0].size()) != sp->size()) ||
      sp->size() != size())
    fail("BasisNotInvertible", "coordinate expansion must be square over the space");
  auto inv = detail::invert(matrix);
  if (!inv) fail("BasisNotInvertible", "coordinate expansion matrix is singular");
  sp_ = std::move(sp);
  expansion_ = std::move(matrix);
  inverse_ = std::move(*inv);
}

// ---------------------------------------------------------------------------
// DiffForm

DiffForm DiffForm::symbol(CoframePtr cf, int i) {
  DiffForm f(cf, 1);
  if (i < 0 || i >= f.cf_->size()) fail("Internal", "1-form symbol index out of range");
  f.add_term({i}, CoordRat(CoordSpacePtr(), Scalar(1)));
  return f;
}

CoordRat DiffForm::coefficient(std::vector<int> idx) const {
  // a permuted product picks up the reorder sign; repeats make it zero
  bool neg = false;
  for (size_t i = 1; i < idx.size(); ++i)
    for (size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return CoordRat();
      std::swap(idx[j - 1], idx[j]);
      neg = !neg;
    }
  auto it = t_.find(idx);
  if (it == t_.end()) return CoordRat();
  return neg ? -it->second : it->second;
}

void DiffForm::add_term(std::vector<int> idx, CoordRat c) {
  if (static_cast<int>(idx.size()) != deg_)
    fail("Internal", "index tuple does not match the form degree");
  if (c.is_zero()) return;
  // insertion sort, tracking the permutation sign
  bool neg = false;
  for (size_t i = 1; i < idx.size(); ++i)
    for (size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return;  // repeated 1-form
      std::swap(idx[j - 1], idx[j]);
      neg = !neg;
    }
  if (neg) c = c.scale(Scalar(-1));
  auto [it, fresh] = t_.try_emplace(std::move(idx), c);
  if (!fresh) {
    it->second = it->second + c;
    if (it->second.is_zero()) t_.erase(it);
  }
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) {
    DiffForm r = o;
    if (!r.cf_) r.cf_ = cf_;
    return r;
  }
  if (deg_ != o.deg_) fail("Internal", "cannot add forms of different degrees");
  DiffForm r = *this;
  if (!r.cf_) r.cf_ = o.cf_;
  for (const auto& [idx, c] : o.t_) r.add_term(idx, c);
  return r;
}

DiffForm DiffForm::operator-(const DiffForm& o) const { return *this + (-o); }

DiffForm DiffForm::operator-() const { return scale(Scalar(-1)); }

DiffForm DiffForm::scale(const CoordRat& c) const {
  DiffForm r(cf_, deg_);
  for (const auto& [idx, v] : t_) r.add_term(idx, v * c);
  return r;
}

DiffForm DiffForm::scale(const Scalar& s) const {
  return scale(CoordRat(CoordSpacePtr(), s));
}

DiffForm DiffForm::map_coeffs(const std::function<Scalar(const Scalar&)>& fn) const {
  DiffForm r(cf_, deg_);
  for (const auto& [idx, v] : t_) r.add_term(idx, v.map_coeffs(fn));
  return r;
}

DiffForm DiffForm::wedge(const DiffForm& o) const {
  if (cf_ && o.cf_ && cf_ != o.cf_) fail("Internal", "wedge across different coframes");
  DiffForm r(cf_ ? cf_ : o.cf_, deg_ + o.deg_);
  for (const auto& [ix, cx] : t_)
    for (const auto& [iy, cy] : o.t_) {
      std::vector<int> idx = ix;
      idx.insert(idx.end(), iy.begin(), iy.end());
      r.add_term(std::move(idx), cx * cy);
    }
  return r;
}

namespace {

std::string coeff_piece(const CoordRat& c, const std::string& vars) {
  if (c == CoordRat(CoordSpacePtr(), Scalar(1))) return vars;
  if (c == CoordRat(CoordSpacePtr(), Scalar(-1))) return "-" + vars;
  if (c == CoordRat(CoordSpacePtr(), Scalar::i())) return "i*" + vars;
  if (c == CoordRat(CoordSpacePtr(), -Scalar::i())) return "-i*" + vars;
  std::string cs = c.str();
  bool simple = cs.find_first_of("+- ") == std::string::npos ||
                (cs[0] == '-' && cs.find_first_of("+- ", 1) == std::string::npos);
  return (simple ? cs : "(" + cs + ")") + "*" + vars;
}

std::string join_pieces(const std::vector<std::string>& pieces) {
  if (pieces.empty()) return "0";
  std::string out;
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (i == 0)
      out = pieces[i];
    else if (pieces[i][0] == '-')
      out += " - " + pieces[i].substr(1);
    else
      out += " + " + pieces[i];
  }
  return out;
}

}  // namespace

std::string DiffForm::str() const {
  std::vector<std::string> pieces;
  for (const auto& [idx, c] : t_) {
    std::string vars;
    for (size_t i = 0; i < idx.size(); ++i) {
      if (i) vars += "^";
      vars += cf_ ? cf_->name(idx[i]) : std::to_string(idx[i]);
    }
    if (vars.empty()) vars = "1";
    pieces.push_back(coeff_piece(c, vars));
  }
  return join_pieces(pieces);
}

std::string DiffForm::latex() const {
  std::vector<std::string> pieces;
  for (const auto& [idx, c] : t_) {
    std::string vars;
    for (size_t i = 0; i < idx.size(); ++i) {
      if (i) vars += " \\wedge ";
      vars += cf_ ? cf_->latex(idx[i]) : std::to_string(idx[i]);
    }
    std::string piece;
    if (c == CoordRat(CoordSpacePtr(), Scalar(1)))
      piece = vars;
    else if (c == CoordRat(CoordSpacePtr(), Scalar(-1)))
      piece = "-" + vars;
    else if (c == CoordRat(CoordSpacePtr(), Scalar::i()))
      piece = "i\\," + vars;
    else if (c == CoordRat(CoordSpacePtr(), -Scalar::i()))
      piece = "-i\\," + vars;
    else {
      std::string cs = c.str();
      bool simple = cs.find_first_of("+- ") == std::string::npos ||
                    (cs[0] == '-' && cs.find_first_of("+- ", 1) == std::string::npos);
      piece = (simple ? cs : "\\bigl(" + cs + "\\bigr)") + "\\," + vars;
    }
    pieces.push_back(piece);
  }
  return join_pieces(pieces);
}

// ---------------------------------------------------------------------------
// Basis changes

BasisRelation BasisRelation::rename(CoframePtr from, CoframePtr to) {
  if (from->size() != to->size())
    fail("BasisNotInvertible", "basis relation must preserve the symbol count");
  BasisRelation r;
  r.from = std::move(from);
  r.to = std::move(to);
  int n = r.from->size();
  r.matrix.assign(n, std::vector<CoordRat>(n, CoordRat()));
  for (int i = 0; i < n; ++i) r.matrix[i][i] = CoordRat(CoordSpacePtr(), Scalar(1));
  return r;
}

BasisRelation& BasisRelation::set(int old_i, int new_j, const CoordRat& c) {
  matrix.at(old_i).at(new_j) = c;
  return *this;
}

BasisRelation& BasisRelation::set(int old_i, int new_j, const Scalar& s) {
  return set(old_i, new_j, CoordRat(CoordSpacePtr(), s));
}

DiffForm change_basis(const DiffForm& f, const BasisRelation& rel) {
  if (f.coframe() != rel.from) fail("Internal", "relation does not match the form's coframe");
  DiffForm out(rel.to, f.degree());
  for (const auto& [idx, c] : f.terms()) {
    DiffForm piece(rel.to, 0);
    piece.add_term({}, c);
    for (int k : idx) {
      DiffForm line(rel.to, 1);
      for (int l = 0; l < rel.to->size(); ++l) line.add_term({l}, rel.matrix[k][l]);
      piece = piece.wedge(line);
    }
    out = out + piece;
  }
  return out;
}

const DiffForm& StructureEquationSet::of(const std::string& symbol) const {
  int i = frame->index(symbol);
  if (i < 0 || !d.count(i)) fail("Internal", "no structure equation for " + symbol);
  return d.at(i);
}

std::string StructureEquationSet::str() const {
  std::ostringstream out;
  for (const auto& [i, form] : d)
    out << "d(" << frame->name(i) << ") = " << form.str() << '\n';
  return out.str();
}

std::string StructureEquationSet::latex() const {
  std::ostringstream out;
  for (const auto& [i, form] : d)
    out << "d" << frame->latex(i) << " = " << form.latex() << " \\\\\n";
  return out.str();
}

StructureEquationSet change_basis(const StructureEquationSet& s, const BasisRelation& rel) {
  int n = rel.from->size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!rel.matrix[i][j].is_constant())
        fail("BasisNotInvertible",
             "structure equations only transform under constant relations");
  auto inv = detail::invert(rel.matrix);
  if (!inv) fail("BasisNotInvertible", "basis relation is singular");

  StructureEquationSet out;
  out.frame = rel.to;
  out.mc_symbols = s.mc_symbols;
  for (int m = 0; m < n; ++m) {
    DiffForm acc(rel.from, 2);
    for (int k = 0; k < n; ++k) {
      if ((*inv)[m][k].is_zero()) continue;
      if (!s.d.count(k)) fail("Internal", "missing structure equation for " + rel.from->name(k));
      acc = acc + s.d.at(k).scale((*inv)[m][k]);
    }
    out.d[m] = change_basis(acc, rel);
  }
  return out;
}

DiffForm formal_d(const DiffForm& f, const StructureEquationSet& s) {
  DiffForm out(s.frame, f.degree() + 1);
  for (const auto& [idx, c] : f.terms()) {
    if (!c.is_constant())
      fail("Internal", "formal d needs constant coefficients");
    for (size_t m = 0; m < idx.size(); ++m) {
      // (-1)^m  w_{k_0} ^ ... ^ d(w_{k_m}) ^ ... ^ w_{k_p}
      DiffForm piece(s.frame, 0);
      piece.add_term({}, m % 2 ? c.scale(Scalar(-1)) : c);
      for (size_t j = 0; j < idx.size(); ++j) {
        if (j == m) {
          if (!s.d.count(idx[j]))
            fail("Internal", "missing structure equation for " + s.frame->name(idx[j]));
          piece = piece.wedge(s.d.at(idx[j]));
        } else {
          piece = piece.wedge(DiffForm::symbol(s.frame, idx[j]));
        }
      }
      out = out + piece;
    }
  }
  return out;
}

StructureEquationSet map_coeffs(const StructureEquationSet& s,
                                const std::function<Scalar(const Scalar&)>& fn) {
  StructureEquationSet out;
  out.frame = s.frame;
  out.mc_symbols = s.mc_symbols;
  for (const auto& [k, f] : s.d) out.d[k] = f.map_coeffs(fn);
  return out;
}

StructureEquationSet swap_equation(const StructureEquationSet& s, int sym,
                                   const std::string& new_name, const Scalar& factor,
                                   const std::string& new_latex) {
  if (!s.frame || sym < 0 || sym >= s.frame->size())
    fail("Internal", "swap_equation: no such symbol");
  if (factor.is_zero()) fail("BasisNotInvertible", "swap factor must be invertible");
  auto it = s.d.find(sym);
  if (it == s.d.end())
    fail("Internal", "swap_equation: no equation for " + s.frame->name(sym));

  Coframe cf;
  for (int i = 0; i < s.frame->size(); ++i) cf.add(s.frame->name(i), s.frame->latex(i));
  for (int i = 0; i < s.frame->size(); ++i)
    if (s.frame->conj(i) > i) cf.set_conj(i, s.frame->conj(i));
  int ni = cf.add(new_name, new_latex);
  CoframePtr cfp = std::make_shared<const Coframe>(std::move(cf));

  StructureEquationSet out;
  out.frame = cfp;
  out.mc_symbols = s.mc_symbols;
  for (const auto& [k, f] : s.d) {
    if (k == sym) continue;
    DiffForm g(cfp, f.degree());
    for (const auto& [idx, c] : f.terms()) g.add_term(idx, c);
    out.d[k] = g;
  }

  DiffForm g(cfp, it->second.degree());
  Scalar inv = factor.inverse();
  for (const auto& [idx, c] : it->second.terms()) {
    std::vector<int> jdx = idx;
    Scalar mult = factor;
    for (int& x : jdx)
      if (x == sym) {
        x = ni;
        mult = mult * inv;
      }
    g.add_term(std::move(jdx), c.scale(mult));
  }
  out.d[ni] = g;
  return out;
}

StructureEquationSet replace_in_rhs(const StructureEquationSet& s, int target, int sym,
                                    const std::string& new_name, const Scalar& factor,
                                    const std::string& new_latex) {
  if (!s.frame || sym < 0 || sym >= s.frame->size() || target < 0 ||
      target >= s.frame->size())
    fail("Internal", "replace_in_rhs: no such symbol");
  if (factor.is_zero()) fail("BasisNotInvertible", "companion factor must be invertible");
  if (!s.d.count(target))
    fail("Internal", "replace_in_rhs: no equation for " + s.frame->name(target));

  Coframe cf;
  for (int i = 0; i < s.frame->size(); ++i) cf.add(s.frame->name(i), s.frame->latex(i));
  for (int i = 0; i < s.frame->size(); ++i)
    if (s.frame->conj(i) > i) cf.set_conj(i, s.frame->conj(i));
  int ni = cf.add(new_name, new_latex);
  CoframePtr cfp = std::make_shared<const Coframe>(std::move(cf));

  StructureEquationSet out;
  out.frame = cfp;
  out.mc_symbols = s.mc_symbols;
  Scalar inv = factor.inverse();
  for (const auto& [k, f] : s.d) {
    DiffForm g(cfp, f.degree());
    for (const auto& [idx, c] : f.terms()) {
      if (k != target) {
        g.add_term(idx, c);
        continue;
      }
      std::vector<int> jdx = idx;
      Scalar mult(1);
      for (int& x : jdx)
        if (x == sym) {
          x = ni;
          mult = mult * inv;
        }
      g.add_term(std::move(jdx), c.scale(mult));
    }
    out.d[k] = g;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dual coframe of a frame

StructureEquationSet dual_structure(const Frame& f, const StructureFunctions& t) {
  if (!t.all_constant())
    fail("Internal", "dual structure equations need constant structure functions");
  if (f.labels != std::vector<std::string>{"L", "Lbar", "T", "S", "Sbar", "U"})
    fail("Internal", "dual coframe ordering is fixed for the bracket frame");

  // dual position k pairs with frame index dual_of[k]
  const int dual_of[6] = {5, 3, 4, 2, 0, 1};  // U, S, Sbar, T, L, Lbar
  int pos_of[6];                              // frame index -> dual position
  for (int k = 0; k < 6; ++k) pos_of[dual_of[k]] = k;

  Coframe cf;
  cf.add("mu0", "\\mu_0");
  cf.add("sigma0", "\\sigma_0");
  cf.add("sigmabar0", "\\bar\\sigma_0");
  cf.add("rho0", "\\rho_0");
  cf.add("zeta0", "\\zeta_0");
  cf.add("zetabar0", "\\bar\\zeta_0");
  cf.set_conj(1, 2);
  cf.set_conj(4, 5);

  // expansion: row k solves  sum_j W[k][j] F[dual_of[k]][j... ] -- i.e. the
  // inverse transpose of the frame coefficient matrix, rows permuted
  const CoordSpacePtr& sp = f.space;
  int n = sp->size();
  std::vector<std::vector<CoordRat>> fm;  // permuted frame rows
  for (int k = 0; k < 6; ++k) {
    std::vector<CoordRat> row;
    for (int j = 0; j < n; ++j) row.push_back(f.fields[dual_of[k]].coeff(j));
    fm.push_back(std::move(row));
  }
  std::vector<std::vector<CoordRat>> eks(6, std::vector<CoordRat>(6, CoordRat(sp, Scalar(0))));
  for (int k = 0; k < 6; ++k) eks[k][k] = CoordRat(sp, Scalar(1));
  auto sols = detail::linear_solve_multi(fm, eks);
  if (!sols) fail("BasisNotInvertible", "frame coefficient matrix is singular");
  cf.set_expansion(sp, *sols);  // row k of the expansion solves fm . w = e_k
  CoframePtr cfp = std::make_shared<const Coframe>(std::move(cf));

  StructureEquationSet out;
  out.frame = cfp;
  for (int k = 0; k < 6; ++k) {
    DiffForm dk(cfp, 2);
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) {
        CoordRat c = t.bracket(i, j)[dual_of[k]];
        if (c.is_zero()) continue;
        dk.add_term({pos_of[i], pos_of[j]}, c.scale(Scalar(-1)));
      }
    out.d[k] = dk;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exterior derivative via coordinate expansion

namespace {

// d over coordinate differentials: indices in the terms refer to coordinates.
DiffForm d_coordinate(const DiffForm& f, const CoordSpacePtr& sp) {
  DiffForm out(CoframePtr(), f.degree() + 1);
  for (const auto& [idx, c] : f.terms()) {
    for (int i = 0; i < sp->size(); ++i) {
      CoordRat dc = c.diff(i);
      if (dc.is_zero()) continue;
      std::vector<int> nidx;
      nidx.push_back(i);
      nidx.insert(nidx.end(), idx.begin(), idx.end());
      out.add_term(std::move(nidx), std::move(dc));
    }
  }
  return out;
}

}  // namespace

DiffForm exterior_derivative(const DiffForm& f) {
  const CoframePtr& cf = f.coframe();
  if (!cf || !cf->expanded())
    fail("BasisNotInvertible", "exterior derivative needs a coordinate-expanded coframe");
  const CoordSpacePtr& sp = cf->space();

  // expand into coordinate differentials
  DiffForm coord(CoframePtr(), f.degree());
  for (const auto& [idx, c] : f.terms()) {
    DiffForm piece(CoframePtr(), 0);
    piece.add_term({}, c);
    for (int k : idx) {
      DiffForm line(CoframePtr(), 1);
      for (int i = 0; i < sp->size(); ++i) line.add_term({i}, cf->expansion()[k][i]);
      piece = piece.wedge(line);
    }
    coord = coord + piece;
  }

  DiffForm dcoord = d_coordinate(coord, sp);

  // re-express each dx_i via the inverted expansion
  DiffForm out(cf, f.degree() + 1);
  for (const auto& [idx, c] : dcoord.terms()) {
    DiffForm piece(cf, 0);
    piece.add_term({}, c);
    for (int i : idx) {
      DiffForm line(cf, 1);
      for (int k = 0; k < cf->size(); ++k) line.add_term({k}, cf->inverse()[i][k]);
      piece = piece.wedge(line);
    }
    out = out + piece;
  }
  return out;
}

}  // namespace crmoduli
