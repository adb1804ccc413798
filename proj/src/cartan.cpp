#include "crmoduli/cartan.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

#include "crmoduli/detail/linsolve.hpp"

namespace crmoduli {

namespace {

// Copies the base coordinates of the model and adjoins the twelve group
// coordinates. conj(a1) never becomes a coordinate of its own: a1 is
// self-paired with unit eps, so conjugation stays a ring operation.
CoordSpacePtr product_space(const CRModel& m, const StructureGroup& g) {
  CoordSpace sp;
  const CoordSpace& base = *m.space();
  for (int i = 0; i < base.size(); ++i) {
    int c = base.conj(i);
    if (c == i)
      sp.add_unit_real(base.name(i), base.conj_unit(i), base.weight(i));
    else if (c > i)
      sp.add_pair(base.name(i), base.name(c), base.weight(i));
  }
  sp.add_unit_real("a1", g.eps());
  sp.add_pair("a2", "conj(a2)");
  sp.add_pair("a3", "conj(a3)");
  sp.add_pair("a4", "conj(a4)");
  sp.add_pair("a5", "conj(a5)");
  sp.add_real("a6");
  sp.add_pair("a7", "conj(a7)");
  return std::make_shared<const CoordSpace>(std::move(sp));
}

// Coordinate index of the first group coordinate: everything before it is a
// base coordinate of the model.
int base_count(const CoordSpacePtr& sp) {
  int i = sp->index("a1");
  if (i < 0) fail("Internal", "not a product space: a1 missing");
  return i;
}

// Evaluation of group coordinates at the matching global parameters; base
// coordinates map to zero (legal only on base-free expressions).
std::map<int, Scalar> parameter_point(const CoordSpacePtr& sp) {
  int nb = base_count(sp);
  std::map<int, Scalar> at;
  for (int c = 0; c < nb; ++c) at[c] = Scalar(0);
  auto& tab = ParamTable::instance();
  for (int c = nb; c < sp->size(); ++c) {
    const std::string& nm = sp->name(c);
    ParamId id = -1;
    if (nm.rfind("conj(", 0) == 0) {
      ParamId base = tab.lookup(nm.substr(5, nm.size() - 6));
      if (base >= 0) id = tab.conj(base);
    } else {
      id = tab.lookup(nm);
    }
    if (id < 0) fail("Internal", "unregistered group coordinate " + nm);
    at[c] = Scalar::param(id);
  }
  return at;
}

bool base_free(const CoordRat& f, int nb) {
  for (int c = 0; c < nb; ++c)
    if (f.num().degree_in(c) != 0 || f.den().degree_in(c) != 0) return false;
  return true;
}

using Row = std::vector<CoordRat>;

Row zero_row(const CoordSpacePtr& sp) { return Row(sp->size(), CoordRat(sp, Scalar(0))); }

bool row_zero(const Row& r) {
  for (const auto& e : r)
    if (!e.is_zero()) return false;
  return true;
}

bool row_equal(const Row& x, const Row& y) {
  for (size_t c = 0; c < x.size(); ++c)
    if (!(x[c] - y[c]).is_zero()) return false;
  return true;
}

Row row_scale(const Row& r, long m) {
  Row out = r;
  for (auto& e : out) e = e.scale(Scalar(m));
  return out;
}

// conj(f dx_c) = conj(f) * unit_c * dx_conj(c)
Row row_conj(const CoordSpacePtr& sp, const Row& r) {
  Row out = zero_row(sp);
  for (int c = 0; c < sp->size(); ++c) {
    if (r[c].is_zero()) continue;
    int cc = sp->conj(c);
    out[cc] = out[cc] + r[c].conj().scale(sp->conj_unit(c));
  }
  return out;
}

std::string slot_name(const std::vector<std::string>& names, int i, int j, int k) {
  return "(" + names[i] + ";" + names[j] + "," + names[k] + ")";
}

const std::vector<std::string>& lifted_names() {
  static const std::vector<std::string> n = {"mu", "sigma", "sigmabar",
                                             "rho",  "zeta", "zetabar"};
  return n;
}

Scalar term_coeff(const StructureEquationSet& s, const std::string& eq,
                  const std::string& x, const std::string& y) {
  int ix = s.frame->index(x), iy = s.frame->index(y);
  if (ix < 0 || iy < 0) fail("Internal", "no coframe symbol " + x + " or " + y);
  CoordRat c = s.of(eq).coefficient({ix, iy});
  if (!c.is_constant()) fail("Internal", "expected a parameter coefficient in d(" + eq + ")");
  return c.constant_value();
}

CoframePtr renamed_frame(const CoframePtr& f,
                         const std::map<int, std::pair<std::string, std::string>>& repl) {
  Coframe cf;
  for (int i = 0; i < f->size(); ++i) {
    auto it = repl.find(i);
    if (it == repl.end())
      cf.add(f->name(i), f->latex(i));
    else
      cf.add(it->second.first, it->second.second);
  }
  for (int i = 0; i < f->size(); ++i)
    if (f->conj(i) > i) cf.set_conj(i, f->conj(i));
  return std::make_shared<const Coframe>(std::move(cf));
}

}  // namespace

// ---------------------------------------------------------------------------
// Structure group

StructureGroup::StructureGroup(int eps_sign) : eps_(eps_sign) {
  if (eps_ != -1 && eps_ != 0 && eps_ != 1)
    fail("Internal", "branch sign must be -1, 0 (symbolic), or +1");
}

Scalar StructureGroup::eps() const {
  if (eps_ == 0) return Scalar::param(param::eps);
  return Scalar(eps_);
}

std::vector<std::vector<CoordRat>> StructureGroup::matrix(const CoordSpacePtr& sp) const {
  auto C = [&](const std::string& n, int e = 1) {
    int i = sp->index(n);
    if (i < 0) fail("Internal", "group coordinate missing: " + n);
    return CoordPoly::coord(sp, i, e);
  };
  const Scalar e = eps();
  std::vector<std::vector<CoordRat>> g(6, std::vector<CoordRat>(6, CoordRat(sp, Scalar(0))));
  // diagonal (a1^3 a1bar, a1^2 a1bar, a1 a1bar^2, a1 a1bar, a1, a1bar),
  // written through a1bar = eps a1 with eps^2 = 1
  g[0][0] = CoordRat(C("a1", 4).scale(e));
  g[1][1] = CoordRat(C("a1", 3).scale(e));
  g[2][2] = CoordRat(C("a1", 3));
  g[3][3] = CoordRat(C("a1", 2).scale(e));
  g[4][4] = CoordRat(C("a1"));
  g[5][5] = CoordRat(C("a1").scale(e));
  g[3][0] = CoordRat(C("a6"));
  g[3][1] = CoordRat(C("a3"));
  g[3][2] = CoordRat(C("conj(a3)"));
  g[4][0] = CoordRat(C("a7"));
  g[4][1] = CoordRat(C("a4"));
  g[4][2] = CoordRat(C("a5"));
  g[4][3] = CoordRat(C("a2"));
  g[5][0] = CoordRat(C("conj(a7)"));
  g[5][1] = CoordRat(C("conj(a5)"));
  g[5][2] = CoordRat(C("conj(a4)"));
  g[5][3] = CoordRat(C("conj(a2)"));
  return g;
}

// ---------------------------------------------------------------------------
// Lifted coframe

DiffForm LiftedCoframe::form(int i) const {
  DiffForm f(coords, 1);
  for (int c = 0; c < static_cast<int>(rows.at(i).size()); ++c)
    if (!rows[i][c].is_zero()) f.add_term({c}, rows[i][c]);
  return f;
}

std::string LiftedCoframe::str() const {
  std::ostringstream out;
  for (size_t i = 0; i < names.size(); ++i)
    out << names[i] << " = " << form(static_cast<int>(i)).str() << '\n';
  return out.str();
}

LiftedCoframe lift(const CRModel& m, const StructureGroup& g) {
  Frame f = build_frame(m);
  StructureFunctions t = commutator_table(f);
  StructureEquationSet base = dual_structure(f, t);

  CoordSpacePtr sp = product_space(m, g);
  int nb = m.space()->size();
  int n = sp->size();

  std::map<int, CoordRat> into;
  for (int c = 0; c < nb; ++c) into[c] = CoordRat(CoordPoly::coord(sp, c));

  const auto& e0 = base.frame->expansion();
  std::vector<Row> theta0(6, zero_row(sp));
  for (int i = 0; i < 6; ++i)
    for (int c = 0; c < nb; ++c) theta0[i][c] = e0[i][c].substitute(into, sp);

  auto gm = g.matrix(sp);
  LiftedCoframe lc;
  lc.space = sp;
  lc.group = g;
  lc.names = lifted_names();
  lc.rows.assign(6, zero_row(sp));
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) {
      if (gm[i][k].is_zero()) continue;
      for (int c = 0; c < n; ++c)
        if (!theta0[k][c].is_zero())
          lc.rows[i][c] = lc.rows[i][c] + gm[i][k] * theta0[k][c];
    }

  Coframe cf;
  for (int c = 0; c < n; ++c) cf.add("d(" + sp->name(c) + ")");
  for (int c = 0; c < n; ++c)
    if (sp->conj(c) > c) cf.set_conj(c, sp->conj(c));
  std::vector<Row> id(n, zero_row(sp));
  for (int c = 0; c < n; ++c) id[c][c] = CoordRat(sp, Scalar(1));
  cf.set_expansion(sp, std::move(id));
  lc.coords = std::make_shared<const Coframe>(std::move(cf));
  return lc;
}

// ---------------------------------------------------------------------------
// Maurer-Cartan forms

int MaurerCartanForms::index(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

MaurerCartanForms maurer_cartan_forms(const LiftedCoframe& lc) {
  const CoordSpacePtr& sp = lc.space;
  int n = sp->size();
  auto gm = lc.group.matrix(sp);
  auto gi = detail::invert(gm);
  if (!gi) fail("BasisNotInvertible", "ambiguity group element is singular");

  // omega[i][j] = sum_k d(g[i][k]) (g^{-1})[k][j], one coordinate row each
  std::vector<std::vector<Row>> om(6, std::vector<Row>(6, zero_row(sp)));
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 6; ++k) {
      if (gm[i][k].is_zero()) continue;
      Row dg = zero_row(sp);
      bool any = false;
      for (int c = 0; c < n; ++c) {
        dg[c] = gm[i][k].diff(c);
        if (!dg[c].is_zero()) any = true;
      }
      if (!any) continue;
      for (int j = 0; j < 6; ++j) {
        const CoordRat& w = (*gi)[k][j];
        if (w.is_zero()) continue;
        for (int c = 0; c < n; ++c)
          if (!dg[c].is_zero()) om[i][j][c] = om[i][j][c] + dg[c] * w;
      }
    }

  // The group's shape forces a fixed pattern on omega; anything else means
  // the lift itself is broken, so every slot is verified.
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) fail("Internal", "Maurer-Cartan pattern violated: " + what);
  };
  const Row& a1 = om[4][4];
  expect(!row_zero(a1), "d a1 / a1 vanished");
  expect(row_equal(a1, row_conj(sp, a1)), "alpha1 must be real");
  expect(row_equal(om[0][0], row_scale(a1, 4)), "mu diagonal is 4 alpha1");
  expect(row_equal(om[1][1], row_scale(a1, 3)), "sigma diagonal is 3 alpha1");
  expect(row_equal(om[2][2], row_scale(a1, 3)), "sigmabar diagonal is 3 alpha1");
  expect(row_equal(om[3][3], row_scale(a1, 2)), "rho diagonal is 2 alpha1");
  expect(row_equal(om[5][5], a1), "zetabar diagonal is alpha1");
  static const int zeros[][2] = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 0},
                                 {1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 0}, {2, 1},
                                 {2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5},
                                 {5, 4}};
  for (auto [i, j] : zeros)
    expect(row_zero(om[i][j]), "unexpected entry at (" + std::to_string(i) + "," +
                                   std::to_string(j) + ")");
  const Row& a2 = om[3][0];
  const Row& a3 = om[3][1];
  const Row& a4 = om[4][0];
  const Row& a5 = om[4][1];
  const Row& a6 = om[4][2];
  const Row& a7 = om[4][3];
  expect(row_equal(a2, row_conj(sp, a2)), "alpha2 must be real");
  expect(row_equal(om[3][2], row_conj(sp, a3)), "rho row carries conj(alpha3)");
  expect(row_equal(om[5][0], row_conj(sp, a4)), "zetabar row carries conj(alpha4)");
  expect(row_equal(om[5][2], row_conj(sp, a5)), "zetabar row carries conj(alpha5)");
  expect(row_equal(om[5][1], row_conj(sp, a6)), "zetabar row carries conj(alpha6)");
  expect(row_equal(om[5][3], row_conj(sp, a7)), "zetabar row carries conj(alpha7)");

  MaurerCartanForms mc;
  mc.names = {"alpha1", "alpha2", "alpha3", "alpha3bar", "alpha4", "alpha4bar",
              "alpha5", "alpha5bar", "alpha6", "alpha6bar", "alpha7", "alpha7bar"};
  mc.rows = {a1, a2, a3, om[3][2], a4, om[5][0], a5, om[5][2], a6, om[5][1], a7, om[5][3]};
  return mc;
}

// ---------------------------------------------------------------------------
// Structure equations with torsion

Scalar TorsionTable::at(int i, int j, int k) const {
  if (j > k) return -at(i, k, j);
  auto it = entries.find({i, j, k});
  return it == entries.end() ? Scalar(0) : it->second;
}

std::string TorsionTable::str(const std::vector<std::string>& names) const {
  std::ostringstream out;
  for (const auto& [key, v] : entries) {
    auto [i, j, k] = key;
    out << slot_name(names, i, j, k) << " = " << v.str();
    if (essential.count(key)) out << "   [essential]";
    out << '\n';
  }
  return out.str();
}

LiftedStructure structure_equations(const LiftedCoframe& lc, const MaurerCartanForms& mc) {
  const CoordSpacePtr& sp = lc.space;
  int nb = base_count(sp);

  static const char* latexes[] = {"\\mu",          "\\sigma",       "\\bar\\sigma",
                                  "\\rho",         "\\zeta",        "\\bar\\zeta",
                                  "\\alpha_1",     "\\alpha_2",     "\\alpha_3",
                                  "\\bar\\alpha_3", "\\alpha_4",    "\\bar\\alpha_4",
                                  "\\alpha_5",     "\\bar\\alpha_5", "\\alpha_6",
                                  "\\bar\\alpha_6", "\\alpha_7",    "\\bar\\alpha_7"};
  Coframe cf;
  for (size_t i = 0; i < lc.names.size(); ++i) cf.add(lc.names[i], latexes[i]);
  for (size_t i = 0; i < mc.names.size(); ++i) cf.add(mc.names[i], latexes[6 + i]);
  cf.set_conj(1, 2);
  cf.set_conj(4, 5);
  cf.set_conj(8, 9);
  cf.set_conj(10, 11);
  cf.set_conj(12, 13);
  cf.set_conj(14, 15);
  cf.set_conj(16, 17);
  std::vector<Row> ex = lc.rows;
  for (const auto& r : mc.rows) ex.push_back(r);
  cf.set_expansion(sp, std::move(ex));
  CoframePtr cfp = std::make_shared<const Coframe>(std::move(cf));

  std::map<int, Scalar> at = parameter_point(sp);

  LiftedStructure out;
  out.eq.frame = cfp;
  for (int s = 6; s < 18; ++s) out.eq.mc_symbols.insert(s);

  for (int i = 0; i < 6; ++i) {
    DiffForm di = exterior_derivative(DiffForm::symbol(cfp, i));
    for (const auto& [idx, c] : di.terms()) {
      int p = idx[0], q = idx[1];
      if (q < 6) {
        if (!base_free(c, nb))
          fail("Internal",
               "structure equations are not rigid: base-coordinate torsion in d(" +
                   cfp->name(i) + ")");
        Scalar v = c.eval(at);
        if (!v.is_zero()) out.torsion.entries[{i, p, q}] = v;
      } else if (p >= 6) {
        fail("Internal", "quadratic group term in d(" + cfp->name(i) + ")");
      } else if (!c.is_constant()) {
        fail("Internal", "non-constant group coefficient in d(" + cfp->name(i) + ")");
      }
    }
    out.eq.d[i] = std::move(di);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Absorption

namespace {

// Affine expression in the absorption unknowns z^s_j, keyed (s, j).
struct LinExpr {
  Scalar c;
  std::map<std::pair<int, int>, Scalar> u;

  void add_unknown(std::pair<int, int> k, const Scalar& w) {
    if (w.is_zero()) return;
    auto [it, fresh] = u.emplace(k, w);
    if (fresh) return;
    it->second = it->second + w;
    if (it->second.is_zero()) u.erase(it);
  }
  void add(const LinExpr& o, const Scalar& w) {
    c = c + o.c * w;
    for (const auto& [k, v] : o.u) add_unknown(k, v * w);
  }
};

// Replaces solved unknowns until none remain. Terminates because a solved
// value only references unknowns that were still free at its solve time.
void substitute_solved(LinExpr& e, const std::map<std::pair<int, int>, LinExpr>& solved) {
  bool again = true;
  while (again) {
    again = false;
    for (auto it = e.u.begin(); it != e.u.end(); ++it) {
      auto sit = solved.find(it->first);
      if (sit == solved.end()) continue;
      Scalar w = it->second;
      e.u.erase(it);
      e.add(sit->second, w);
      again = true;
      break;
    }
  }
}

}  // namespace

AbsorptionOutcome absorb(const StructureEquationSet& s, const TorsionTable& t) {
  if (!s.frame || s.frame->size() != 18)
    fail("Internal", "absorption expects the joint lifted coframe");

  // dTheta^i contains a^i_js alpha_s ^ Theta^j, stored as (j, s) with
  // coefficient -a^i_js after index sorting.
  std::map<std::tuple<int, int, int>, Scalar> a;  // (i, j, s) -> a^i_js
  for (const auto& [i, f] : s.d)
    for (const auto& [idx, c] : f.terms())
      if (idx[0] < 6 && idx[1] >= 6) {
        if (!c.is_constant()) fail("Internal", "absorption needs constant group coefficients");
        a[{i, idx[0], idx[1]}] = -c.constant_value();
      }

  // After the shift alpha_s -> alpha_s + sum_j z^s_j Theta^j the (j,k)-slot
  // of d Theta^i reads T^i_jk + sum_s (a^i_ks z^s_j - a^i_js z^s_k).
  // Equations are visited in coframe order, wedge pairs lexicographically,
  // and each slot is zeroed through its first free unknown in (s, j) order.
  std::map<std::pair<int, int>, LinExpr> solved;
  AbsorptionOutcome out;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = j + 1; k < 6; ++k) {
        LinExpr e;
        e.c = t.at(i, j, k);
        for (int sy = 6; sy < 18; ++sy) {
          auto ks = a.find({i, k, sy});
          if (ks != a.end()) e.add_unknown({sy, j}, ks->second);
          auto js = a.find({i, j, sy});
          if (js != a.end()) e.add_unknown({sy, k}, -js->second);
        }
        substitute_solved(e, solved);
        if (e.u.empty()) {
          if (e.c.is_zero()) continue;
          out.residual.entries[{i, j, k}] = e.c;
          for (ParamId p : e.c.free_params())
            if (p >= param::a1 && p <= param::a7_bar) {
              out.residual.essential.insert({i, j, k});
              break;
            }
          continue;
        }
        auto key = e.u.begin()->first;
        Scalar piv = e.u.begin()->second;
        e.u.erase(e.u.begin());
        LinExpr val;
        Scalar m = Scalar(-1) / piv;
        val.c = e.c * m;
        for (const auto& [kk, vv] : e.u) val.u.emplace(kk, vv * m);
        solved.emplace(key, std::move(val));
      }

  // Leftover freedom is fixed to zero and the chains are resolved.
  for (int sy = 6; sy < 18; ++sy)
    for (int j = 0; j < 6; ++j) {
      auto it = solved.find({sy, j});
      if (it == solved.end()) {
        out.solution.shift[{sy, j}] = Scalar(0);
        continue;
      }
      LinExpr v = it->second;
      substitute_solved(v, solved);
      out.solution.shift[{sy, j}] = v.c;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Normalization

std::map<ParamId, Scalar> normalize_parameters(const TorsionTable& residual) {
  auto& tab = ParamTable::instance();
  std::map<ParamId, Scalar> asg;
  while (true) {
    bool outstanding = false, progress = false;
    for (const auto& key : residual.essential) {
      Scalar v = residual.entries.at(key).substitute(asg);
      std::set<ParamId> fp;
      for (ParamId p : v.free_params())
        if (p >= param::a2 && p <= param::a7_bar) fp.insert(p);
      if (fp.empty()) continue;
      outstanding = true;
      if (fp.size() != 1) continue;
      ParamId p = *fp.begin();
      // v must be affine in p: probe at 0, 1, 2
      Scalar v0 = v.substitute({{p, Scalar(0)}});
      Scalar v1 = v.substitute({{p, Scalar(1)}});
      Scalar slope = v1 - v0;
      if (slope.is_zero()) continue;
      Scalar v2 = v.substitute({{p, Scalar(2)}});
      if (!(v2 - v0 - slope - slope).is_zero()) continue;
      Scalar sol = -v0 / slope;
      ParamId base = tab.conj(p) < p ? tab.conj(p) : p;
      if (base != p) sol = sol.conj();
      asg[base] = sol;
      progress = true;
    }
    if (!outstanding) break;
    if (!progress) {
      std::ostringstream dump;
      dump << "normalization stalled; remaining residues:";
      for (const auto& key : residual.essential) {
        Scalar v = residual.entries.at(key).substitute(asg);
        auto [i, j, k] = key;
        if (!v.is_zero())
          dump << ' ' << slot_name(lifted_names(), i, j, k) << " = " << v.str() << ';';
      }
      fail("NormalizationFailed", dump.str());
    }
  }
  for (const auto& key : residual.essential) {
    Scalar v = residual.entries.at(key).substitute(asg);
    for (ParamId p : v.free_params())
      if (p >= param::a1 && p <= param::a7_bar) {
        auto [i, j, k] = key;
        fail("NormalizationFailed", "group parameter survives at " +
                                        slot_name(lifted_names(), i, j, k) + " = " + v.str());
      }
  }
  return asg;
}

// ---------------------------------------------------------------------------
// Reduction and prolongation

StructureEquationSet reduce(const LiftedStructure& ls,
                            const std::map<ParamId, Scalar>& assignment) {
  Coframe cf;
  static const char* names[] = {"mu", "sigma", "sigmabar", "rho", "zeta", "zetabar", "alpha"};
  static const char* lat[] = {"\\mu",  "\\sigma",     "\\bar\\sigma", "\\rho",
                              "\\zeta", "\\bar\\zeta", "\\alpha"};
  for (int i = 0; i < 7; ++i) cf.add(names[i], lat[i]);
  cf.set_conj(1, 2);
  cf.set_conj(4, 5);
  CoframePtr cfp = std::make_shared<const Coframe>(std::move(cf));

  StructureEquationSet out;
  out.frame = cfp;
  out.mc_symbols = {6};
  for (int i = 0; i < 6; ++i) {
    DiffForm f(cfp, 2);
    for (const auto& [idx, c] : ls.eq.d.at(i).terms()) {
      int p = idx[0], q = idx[1];
      if (q >= 7) continue;  // Maurer-Cartan directions cut by the reduction
      Scalar v = q == 6 ? c.constant_value() : ls.torsion.at(i, p, q);
      v = v.substitute(assignment);
      if (!v.is_zero()) f.add_term({p, q}, CoordRat(CoordSpacePtr(), v));
    }
    out.d[i] = std::move(f);
  }
  return out;
}

StructureEquationSet prolong(const StructureEquationSet& s) {
  int ai = s.frame->index("alpha");
  if (ai < 0) fail("Internal", "prolongation expects the residual form alpha");
  StructureEquationSet out = s;
  out.mc_symbols.clear();
  if (!out.d.count(ai)) out.d[ai] = DiffForm(s.frame, 2);
  return out;
}

// ---------------------------------------------------------------------------
// Reformation

ReformResult reform(const StructureEquationSet& s, bool b_nonzero) {
  int imu = s.frame->index("mu");
  int isg = s.frame->index("sigma");
  int isgb = s.frame->index("sigmabar");
  int irh = s.frame->index("rho");
  int izb = s.frame->index("zetabar");
  if (imu < 0 || isg < 0 || isgb < 0 || irh < 0 || izb < 0)
    fail("Internal", "reform expects the reduced coframe");

  Scalar a = term_coeff(s, "mu", "sigma", "zeta");
  Scalar c = term_coeff(s, "mu", "sigma", "zetabar");
  if (a.is_zero())
    fail("DegenerateModel", "leading coefficient vanishes; no reformation on this branch");

  ReformResult out;
  if (b_nonzero) {
    if (c.is_zero()) fail("Internal", "coupling coefficient vanished on the coupled branch");
    Scalar cp = c * Scalar(3) / Scalar(2);

    auto f1 = renamed_frame(s.frame, {{imu, {"mu_new", "\\mu_{new}"}}});
    BasisRelation r1 = BasisRelation::rename(s.frame, f1);
    r1.set(imu, imu, cp);
    StructureEquationSet s1 = change_basis(s, r1);

    auto f2 = renamed_frame(f1, {{isg, {"sigma_new", "\\sigma_{new}"}},
                                 {irh, {"rho_new", "\\rho_{new}"}},
                                 {izb, {"zetabar_new", "\\bar\\zeta_{new}"}}});
    BasisRelation r2 = BasisRelation::rename(f1, f2);
    r2.set(isg, isg, cp / a);
    r2.set(irh, irh, cp / a);
    r2.set(izb, izb, a / cp);
    StructureEquationSet s2 = change_basis(s1, r2);

    out.canonical = swap_equation(s2, irh, "rhobar_new", a.conj() / a, "\\bar\\rho_{new}");
    out.invariants.emplace("R", term_coeff(out.canonical, "mu_new", "sigmabar", "zetabar_new"));
    out.notes = {"rescaled mu by 3/2 of the coupling coefficient",
                 "rescaled sigma and rho alike, zetabar inversely",
                 "swapped the rho equation for its conjugate companion rhobar_new"};
  } else {
    if (!c.is_zero()) fail("Internal", "coupling coefficient must vanish on this branch");
    auto f1 = renamed_frame(s.frame, {{isg, {"sigma_new", "\\sigma_{new}"}},
                                      {isgb, {"sigmabar_new", "\\bar\\sigma_{new}"}},
                                      {irh, {"rho_new", "\\rho_{new}"}}});
    BasisRelation r1 = BasisRelation::rename(s.frame, f1);
    r1.set(isg, isg, a.inverse());
    r1.set(isgb, isgb, a.conj().inverse());
    r1.set(irh, irh, a.inverse());
    StructureEquationSet s1 = change_basis(s, r1);

    StructureEquationSet s2 = swap_equation(s1, irh, "rho", a.inverse(), "\\rho");
    int target = s2.frame->index("sigmabar_new");
    int rn = s2.frame->index("rho_new");
    out.canonical = replace_in_rhs(s2, target, rn, "rhobar_new", a.conj() / a, "\\bar\\rho_{new}");
    out.invariants.clear();
    out.notes = {"rescaled sigma, its conjugate, and rho by the leading coefficient",
                 "restored the unscaled rho equation through its companion",
                 "wrote the conjugated sigma equation through the conjugate companion rhobar_new"};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline driver

namespace {

nlohmann::json equations_json(const StructureEquationSet& s) {
  nlohmann::json eqs = nlohmann::json::array();
  for (const auto& [i, f] : s.d) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [idx, c] : f.terms()) {
      nlohmann::json wedge = nlohmann::json::array();
      for (int x : idx) wedge.push_back(s.frame->name(x));
      terms.push_back({{"coeff", c.str()}, {"wedge", wedge}});
    }
    eqs.push_back({{"lhs", s.frame->name(i)}, {"terms", terms}});
  }
  return eqs;
}

nlohmann::json torsions_json(const TorsionTable& t) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, v] : t.entries) {
    auto [i, j, k] = key;
    out[slot_name(lifted_names(), i, j, k)] = v.str();
  }
  return out;
}

std::string stage_json(const std::string& stage, const nlohmann::json& equations,
                       const nlohmann::json& torsions, const nlohmann::json& assignments,
                       const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json j = {{"stage", stage},
                      {"equations", equations},
                      {"torsions", torsions},
                      {"assignments", assignments}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j.dump();
}

}  // namespace

CartanRun run_cartan(const CRModel& m, int eps_sign) {
  CartanRun run;
  run.group = StructureGroup(eps_sign);
  run.lifted = lift(m, run.group);
  run.mc = maurer_cartan_forms(run.lifted);
  run.structure = structure_equations(run.lifted, run.mc);
  run.absorption = absorb(run.structure.eq, run.structure.torsion);
  run.assignment = normalize_parameters(run.absorption.residual);
  run.reduced = reduce(run.structure, run.assignment);
  run.prolonged = prolong(run.reduced);
  run.b_nonzero = !term_coeff(run.prolonged, "mu", "sigma", "zetabar").is_zero();
  run.reformed = reform(run.prolonged, run.b_nonzero);

  const auto none = nlohmann::json::object();
  run.stages.emplace_back("lifted-structure",
                          stage_json("lifted-structure", equations_json(run.structure.eq),
                                     torsions_json(run.structure.torsion), none));
  nlohmann::json shifts = nlohmann::json::object();
  for (const auto& [key, v] : run.absorption.solution.shift)
    if (!v.is_zero()) {
      const auto& frame = *run.structure.eq.frame;
      shifts["(" + frame.name(key.first) + ";" + frame.name(key.second) + ")"] = v.str();
    }
  nlohmann::json essential = nlohmann::json::array();
  for (const auto& [i, j, k] : run.absorption.residual.essential)
    essential.push_back(slot_name(lifted_names(), i, j, k));
  run.stages.emplace_back(
      "absorbed", stage_json("absorbed", nlohmann::json::array(),
                             torsions_json(run.absorption.residual), shifts,
                             {{"essential", essential}}));
  nlohmann::json asg = nlohmann::json::object();
  for (const auto& [p, v] : run.assignment) asg[ParamTable::instance().display(p)] = v.str();
  run.stages.emplace_back(
      "normalized", stage_json("normalized", equations_json(run.reduced), none, asg));
  run.stages.emplace_back(
      "prolonged", stage_json("prolonged", equations_json(run.prolonged), none, none));
  nlohmann::json inv = nlohmann::json::object();
  for (const auto& [k, v] : run.reformed.invariants) inv[k] = v.str();
  nlohmann::json notes = nlohmann::json::array();
  for (const auto& n : run.reformed.notes) notes.push_back(n);
  run.stages.emplace_back(
      "reformed", stage_json("reformed", equations_json(run.reformed.canonical), none, inv,
                             {{"notes", notes}}));
  return run;
}

}  // namespace crmoduli
