#include "crmoduli/model.hpp"

#include <cctype>
#include <map>
#include <sstream>

#include <json.hpp>

#include "crmoduli/detail/expr_parser.hpp"

namespace crmoduli {

namespace {

bool all_digits(const std::string& s, size_t from) {
  if (from >= s.size()) return false;
  for (size_t i = from; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// Polyexpr builder over a model coordinate space. Names resolve to the
// coordinates z, conj(z) or to declared parameters; anything else is an
// error (with a pointed message for the w/u variables the grammar excludes).
struct RhsBuilder {
  using Value = CoordPoly;

  CoordSpacePtr sp;
  const std::vector<ParamDecl>* params;

  Value number(const GaussianRational& q) { return CoordPoly(sp, Scalar(q)); }

  Value name(const std::string& n, size_t pos) {
    int ci = sp->index(n);
    if (ci >= 0) return CoordPoly::coord(sp, ci, 1);
    for (const auto& p : *params)
      if (p.name == n) return CoordPoly(sp, Scalar::param(p.id));
    std::string at = " at position " + std::to_string(pos);
    if (n[0] == 'w' && all_digits(n, 1))
      fail("SyntaxError", "right-hand sides may not involve " + n + at);
    if (n[0] == 'u' && all_digits(n, 1))
      fail("SyntaxError", "right-hand sides may not involve " + n + at);
    fail("SyntaxError", "unknown name '" + n + "'" + at);
  }

  Value conj(Value v, size_t) { return v.conj(); }
  Value neg(Value v) { return v.scale(Scalar(-1)); }
  Value add(Value x, Value y) { return x + y; }
  Value sub(Value x, Value y) { return x - y; }
  Value mul(Value x, Value y) { return x * y; }

  Value div(Value x, Value y, size_t pos) {
    if (!y.is_constant())
      fail("SyntaxError",
           "division only by constants at position " + std::to_string(pos));
    Scalar c = y.coeff_of_monomial(Monomial());
    if (c.is_zero()) fail("DivisionByZero", "division by zero");
    return x.scale(c.inverse());
  }

  Value pow(Value v, int e, size_t pos) {
    if (e >= 0) return v.pow(e);
    if (!v.is_constant())
      fail("SyntaxError",
           "negative exponent on a non-constant at position " + std::to_string(pos));
    return CoordPoly(sp, v.coeff_of_monomial(Monomial()).pow(e));
  }
};

// Cursor over one DSL clause (a line), for the scaffolding around polyexprs.
struct LineCursor {
  const std::string& s;
  int line;
  size_t pos = 0;

  [[noreturn]] void err(const std::string& msg) const {
    fail("SyntaxError", "line " + std::to_string(line) + ": " + msg);
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }

  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      err(std::string("expected '") + c + "'");
    ++pos;
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    if (pos == start) err("expected a name");
    return s.substr(start, pos - start);
  }

  int integer() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) err("expected an integer");
    return std::stoi(s.substr(start, pos - start));
  }

  std::string rest() {
    skip_ws();
    return s.substr(pos);
  }
};

// Binds a declared parameter to the global table, registering it on first
// use and rejecting a reality clash with an existing binding.
ParamId bind_param(const ParamDecl& d, int line) {
  auto& tab = ParamTable::instance();
  ParamId id = tab.lookup(d.name);
  if (id < 0)
    return d.reality == Reality::Real ? tab.register_real(d.name)
                                      : tab.register_complex(d.name);
  if (tab.reality(id) != d.reality)
    fail("RealityViolation",
         "line " + std::to_string(line) + ": parameter '" + d.name +
             "' is already bound with a different reality");
  return id;
}

// Shared tail of parse_model and builtin_m14: the right-hand sides arrive
// over a z-only space; the final space appends u1..uk with each equation's
// homogeneity weight, and the polynomials are transplanted into it.
CRModel finish_model(std::string name, int n, int k, std::vector<ParamDecl> params,
                     const std::vector<CoordPoly>& rhs) {
  CoordSpace full;
  full.add_pair("z", "conj(z)", 1);
  for (int j = 1; j <= k; ++j)
    full.add_real("u" + std::to_string(j),
                  rhs[j - 1].homogeneous_weight().value_or(0));
  auto sp = std::make_shared<const CoordSpace>(std::move(full));

  std::vector<CoordPoly> moved;
  moved.reserve(rhs.size());
  for (const auto& p : rhs) moved.push_back(p.substitute({}, sp).num());
  return CRModel(std::move(name), n, k, std::move(params), sp, std::move(moved));
}

CoordSpacePtr z_only_space() {
  CoordSpace zs;
  zs.add_pair("z", "conj(z)", 1);
  return std::make_shared<const CoordSpace>(std::move(zs));
}

}  // namespace

CRModel::CRModel(std::string name, int n, int k, std::vector<ParamDecl> params,
                 CoordSpacePtr space, std::vector<CoordPoly> rhs)
    : name_(std::move(name)),
      n_(n),
      k_(k),
      params_(std::move(params)),
      space_(std::move(space)),
      rhs_(std::move(rhs)) {
  if (n_ != 1) fail("SyntaxError", "only CR dimension 1 is supported");
  if (k_ < 1 || static_cast<int>(rhs_.size()) != k_)
    fail("Internal", "codimension does not match the defining list");
  int zi = space_->index("z");
  int zbi = space_->index("conj(z)");
  for (int j = 1; j <= k_; ++j) {
    const CoordPoly& p = rhs_[j - 1];
    for (const auto& [m, c] : p.terms()) {
      (void)c;
      for (const auto& [id, e] : m.factors()) {
        (void)e;
        if (id != zi && id != zbi)
          fail("RealityViolation", "P" + std::to_string(j) +
                                       " must be a polynomial in z, conj(z) only");
      }
    }
    if (!(p.conj() == p.scale(Scalar(-1))))
      fail("RealityViolation",
           "P" + std::to_string(j) + " must satisfy conj(P) = -P; got " + p.str());
  }
}

const CoordPoly& CRModel::rhs(int j) const {
  if (j < 1 || j > k_) fail("Internal", "defining index out of range");
  return rhs_[j - 1];
}

bool CRModel::operator==(const CRModel& o) const {
  return name_ == o.name_ && n_ == o.n_ && k_ == o.k_ && params_ == o.params_ &&
         rhs_ == o.rhs_;
}

std::string CRModel::render() const {
  std::ostringstream out;
  out << "model " << name_ << " type (" << n_ << "," << k_ << ")\n";
  for (const auto& p : params_) {
    out << "param " << p.name << ' '
        << (p.reality == Reality::Real ? "real" : "complex");
    if (p.nonzero) out << " nonzero";
    out << '\n';
  }
  for (int j = 1; j <= k_; ++j)
    out << "Xi " << j << ": w" << j << " - conj(w" << j
        << ") = " << rhs_[j - 1].str() << '\n';
  return out.str();
}

std::string CRModel::to_json() const {
  nlohmann::json j;
  j["name"] = name_;
  j["type"] = {n_, k_};
  j["params"] = nlohmann::json::array();
  for (const auto& p : params_) {
    j["params"].push_back({{"name", p.name},
                           {"reality", p.reality == Reality::Real ? "real" : "complex"},
                           {"nonzero", p.nonzero}});
  }
  j["xi"] = nlohmann::json::array();
  for (int i = 0; i < k_; ++i)
    j["xi"].push_back({{"j", i + 1}, {"rhs", rhs_[i].str()}});
  return j.dump(2);
}

CRModel parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;

  bool have_header = false;
  std::string name;
  int n = 0, k = 0;
  std::vector<ParamDecl> params;
  std::vector<CoordPoly> rhs;
  CoordSpacePtr zsp = z_only_space();

  while (std::getline(in, raw)) {
    ++line_no;
    LineCursor c{raw, line_no};
    if (c.at_end()) continue;

    std::string head = c.ident();
    if (head == "model") {
      if (have_header) c.err("duplicate model header");
      name = c.ident();
      if (c.ident() != "type") c.err("expected 'type'");
      c.expect('(');
      n = c.integer();
      c.expect(',');
      k = c.integer();
      c.expect(')');
      if (!c.at_end()) c.err("unexpected trailing input");
      if (n != 1) c.err("only CR dimension 1 is supported");
      if (k < 1) c.err("codimension must be positive");
      have_header = true;
      continue;
    }
    if (!have_header) c.err("expected the model header first");

    if (head == "param") {
      if (!rhs.empty()) c.err("parameters must precede the defining equations");
      ParamDecl d;
      d.name = c.ident();
      std::string r = c.ident();
      if (r == "real")
        d.reality = Reality::Real;
      else if (r == "complex")
        d.reality = Reality::Complex;
      else
        c.err("expected 'real' or 'complex'");
      if (!c.at_end()) {
        if (c.ident() != "nonzero") c.err("expected 'nonzero'");
        d.nonzero = true;
        if (!c.at_end()) c.err("unexpected trailing input");
      }
      for (const auto& p : params)
        if (p.name == d.name) c.err("duplicate parameter '" + d.name + "'");
      if (zsp->index(d.name) >= 0 || d.name == "i" || d.name == "conj")
        c.err("reserved name '" + d.name + "'");
      d.id = bind_param(d, line_no);
      params.push_back(std::move(d));
      continue;
    }

    if (head == "Xi") {
      int j = c.integer();
      if (j != static_cast<int>(rhs.size()) + 1)
        c.err("expected Xi " + std::to_string(rhs.size() + 1));
      if (j > k) c.err("more defining equations than the codimension");
      c.expect(':');
      std::string wj = "w" + std::to_string(j);
      if (c.ident() != wj) c.err("defining equation " + std::to_string(j) +
                                 " must relate " + wj + " and conj(" + wj + ")");
      c.expect('-');
      if (c.ident() != "conj") c.err("expected conj(" + wj + ")");
      c.expect('(');
      if (c.ident() != wj) c.err("defining equation " + std::to_string(j) +
                                 " must relate " + wj + " and conj(" + wj + ")");
      c.expect(')');
      c.expect('=');
      RhsBuilder b{zsp, &params};
      try {
        rhs.push_back(detail::parse_expression(c.rest(), b));
      } catch (const Error& e) {
        if (e.kind != "SyntaxError" && e.kind != "DivisionByZero") throw;
        fail(e.kind, "line " + std::to_string(line_no) + ", Xi " +
                         std::to_string(j) + " right-hand side: " +
                         std::string(e.what()).substr(e.kind.size() + 2));
      }
      continue;
    }

    c.err("expected 'model', 'param' or 'Xi', got '" + head + "'");
  }

  if (!have_header) fail("SyntaxError", "empty model text");
  if (static_cast<int>(rhs.size()) != k)
    fail("SyntaxError", "expected " + std::to_string(k) +
                            " defining equations, got " + std::to_string(rhs.size()));
  return finish_model(std::move(name), n, k, std::move(params), rhs);
}

CRModel builtin_m14(const Scalar& a, const Scalar& b) {
  CoordSpacePtr sp = z_only_space();
  CoordPoly z = CoordPoly::coord(sp, 0, 1);
  CoordPoly zb = CoordPoly::coord(sp, 1, 1);
  Scalar two_i = Scalar(GaussianRational(BigRat(0), BigRat(2)));

  std::vector<CoordPoly> rhs;
  rhs.push_back((z * zb).scale(two_i));
  rhs.push_back((z.pow(2) * zb + z * zb.pow(2)).scale(two_i));
  rhs.push_back((z.pow(2) * zb - z * zb.pow(2)).scale(Scalar(2)));
  rhs.push_back((z.pow(3) * zb).scale(two_i * a) +
                (z * zb.pow(3)).scale(two_i * a.conj()) +
                (z.pow(2) * zb.pow(2)).scale(two_i * b));

  std::vector<ParamDecl> params;
  auto declare = [&params](const Scalar& s) {
    auto& tab = ParamTable::instance();
    for (ParamId id : s.free_params()) {
      ParamId base = id;
      if (tab.reality(id) == Reality::Complex && tab.conj(id) < id)
        base = tab.conj(id);
      ParamDecl d;
      d.name = tab.display(base);
      d.reality = tab.reality(base);
      d.nonzero = false;
      d.id = base;
      bool seen = false;
      for (const auto& p : params) seen = seen || p.id == base;
      if (!seen) params.push_back(std::move(d));
    }
  };
  declare(a);
  declare(b);

  return finish_model("m14", 1, 4, std::move(params), rhs);
}

CRModel builtin_m14() {
  return builtin_m14(Scalar::param(param::a), Scalar::param(param::b));
}

std::optional<std::pair<Scalar, Scalar>> family_parameters(const CRModel& m) {
  if (m.cr_dimension() != 1 || m.codimension() != 4) return std::nullopt;
  CRModel ref = builtin_m14();
  for (int j = 1; j <= 3; ++j)
    if (!(m.rhs(j) == ref.rhs(j))) return std::nullopt;

  const CoordPoly& p4 = m.rhs(4);
  int zi = m.space()->index("z");
  int zbi = m.space()->index("conj(z)");
  Monomial z3zb = Monomial::var(zi, 3).times(Monomial::var(zbi, 1));
  Monomial zzb3 = Monomial::var(zi, 1).times(Monomial::var(zbi, 3));
  Monomial z2zb2 = Monomial::var(zi, 2).times(Monomial::var(zbi, 2));

  Scalar two_i = Scalar(GaussianRational(BigRat(0), BigRat(2)));
  Scalar a = p4.coeff_of_monomial(z3zb) / two_i;
  Scalar abar = p4.coeff_of_monomial(zzb3) / two_i;
  Scalar b = p4.coeff_of_monomial(z2zb2) / two_i;
  if (!(abar == a.conj())) return std::nullopt;
  if (!(b.conj() == b)) return std::nullopt;

  CoordPoly rebuilt;
  {
    CoordPoly z3 = CoordPoly::coord(m.space(), zi, 3);
    CoordPoly zb1 = CoordPoly::coord(m.space(), zbi, 1);
    CoordPoly z1 = CoordPoly::coord(m.space(), zi, 1);
    CoordPoly zb3 = CoordPoly::coord(m.space(), zbi, 3);
    CoordPoly z2 = CoordPoly::coord(m.space(), zi, 2);
    CoordPoly zb2 = CoordPoly::coord(m.space(), zbi, 2);
    rebuilt = (z3 * zb1).scale(two_i * a) + (z1 * zb3).scale(two_i * abar) +
              (z2 * zb2).scale(two_i * b);
  }
  if (!(p4 == rebuilt)) return std::nullopt;
  return std::make_pair(a, b);
}

std::string to_string(ModelClass c) {
  switch (c) {
    case ModelClass::Ok: return "ok";
    case ModelClass::NotTotallyNondegenerate: return "not_totally_nondegenerate";
    case ModelClass::ReducesToM01: return "reduces_to_M01";
    case ModelClass::Unchecked: return "unchecked";
  }
  return "unchecked";
}

ModelDiagnostics validate_model(const CRModel& m) {
  ModelDiagnostics d;
  if (m.cr_dimension() != 1 || m.codimension() != 4) {
    d.cls = ModelClass::Unchecked;
    d.detail = "only structural checks apply outside type (1,4)";
    return d;
  }
  auto ab = family_parameters(m);
  if (!ab) {
    d.cls = ModelClass::Unchecked;
    d.detail = "type (1,4) model outside the built-in family";
    return d;
  }
  const auto& [a, b] = *ab;
  if (a.is_zero() && b.is_zero()) {
    d.cls = ModelClass::NotTotallyNondegenerate;
    d.detail = "a = 0 and b = 0: iterated brackets never reach length four";
  } else if (a.is_zero()) {
    d.cls = ModelClass::ReducesToM01;
    d.detail = "a = 0: equivalent to the b-normalized degenerate model";
  } else {
    d.cls = ModelClass::Ok;
  }
  return d;
}

}  // namespace crmoduli
