#include "crmoduli/algebra.hpp"

#include <algorithm>
#include <sstream>

#include "crmoduli/detail/expr_parser.hpp"
#include "crmoduli/detail/poly_gcd.hpp"

namespace crmoduli {

void fail(const std::string& kind, const std::string& msg) { throw Error(kind, msg); }

// ---------------------------------------------------------------------------
// GaussianRational

GaussianRational GaussianRational::inverse() const {
  BigRat n = norm();
  if (n == 0) fail("DivisionByZero", "inverse of zero");
  return {re_ / n, -im_ / n};
}

static std::string rat_str(const BigRat& q) { return q.str(); }

std::string GaussianRational::str() const {
  if (is_zero()) return "0";
  if (im_ == 0) return rat_str(re_);
  if (re_ == 0) {
    if (im_ == 1) return "i";
    if (im_ == -1) return "-i";
    return rat_str(im_) + "i";
  }
  std::string s = rat_str(re_);
  if (im_ > 0) s += "+";
  return s + rat_str(im_) + "i";
}

GaussianRational GaussianRational::parse(const std::string& text) {
  Scalar s = parse_scalar(text);
  if (!s.is_constant()) fail("SyntaxError", "expected a numeric literal: " + text);
  return s.constant_value();
}

// ---------------------------------------------------------------------------
// ParamTable

ParamTable& ParamTable::instance() {
  static ParamTable t;
  return t;
}

ParamId ParamTable::add(std::string display, Reality r, ParamId conj_partner) {
  ParamId id = static_cast<ParamId>(info_.size());
  info_.push_back({display, r, conj_partner < 0 ? id : conj_partner});
  if (display.rfind("conj(", 0) != 0) by_name_[display] = id;
  return id;
}

ParamTable::ParamTable() {
  register_complex("a");
  register_real("b");
  register_real("r");
  add("eps", Reality::Sign, -1);
  by_name_["eps"] = param::eps;
  for (int k = 1; k <= 5; ++k) register_complex("a" + std::to_string(k));
  register_real("a6");
  register_complex("a7");
}

ParamId ParamTable::register_real(const std::string& name) {
  if (ParamId id = lookup(name); id >= 0) {
    if (info_[id].reality != Reality::Real)
      fail("RealityViolation", "parameter " + name + " already registered with another reality");
    return id;
  }
  return add(name, Reality::Real, -1);
}

ParamId ParamTable::register_complex(const std::string& name) {
  if (ParamId id = lookup(name); id >= 0) {
    if (info_[id].reality != Reality::Complex)
      fail("RealityViolation", "parameter " + name + " already registered with another reality");
    return id;
  }
  ParamId base = add(name, Reality::Complex, -1);
  ParamId partner = add("conj(" + name + ")", Reality::Complex, base);
  info_[base].conj = partner;
  return base;
}

ParamId ParamTable::lookup(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

void ParamTable::reset_to_builtin() {
  info_.resize(param::builtin_count);
  for (auto it = by_name_.begin(); it != by_name_.end();) {
    if (it->second >= param::builtin_count)
      it = by_name_.erase(it);
    else
      ++it;
  }
}

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::var(int id, int exp) {
  Monomial m;
  if (exp != 0) m.f_.push_back({id, exp});
  return m;
}

int Monomial::total_degree() const {
  int d = 0;
  for (auto& [id, e] : f_) d += e;
  return d;
}

int Monomial::exponent(int id) const {
  for (auto& [v, e] : f_)
    if (v == id) return e;
  return 0;
}

void Monomial::push(int id, int exp) {
  if (exp != 0) f_.push_back({id, exp});
}

static std::vector<std::pair<int, int>> merge_factors(std::vector<std::pair<int, int>> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::pair<int, int>> out;
  for (auto& [id, e] : v) {
    if (!out.empty() && out.back().first == id)
      out.back().second += e;
    else
      out.push_back({id, e});
  }
  std::erase_if(out, [](auto& p) { return p.second == 0; });
  return out;
}

Monomial Monomial::times(const Monomial& o) const {
  Monomial m;
  m.f_ = f_;
  m.f_.insert(m.f_.end(), o.f_.begin(), o.f_.end());
  m.f_ = merge_factors(std::move(m.f_));
  return m;
}

bool Monomial::divides(const Monomial& o) const {
  for (auto& [id, e] : f_)
    if (o.exponent(id) < e) return false;
  return true;
}

Monomial Monomial::divide_into(const Monomial& o) const {
  Monomial m;
  m.f_ = o.f_;
  for (auto& [id, e] : f_) m.f_.push_back({id, -e});
  m.f_ = merge_factors(std::move(m.f_));
  return m;
}

Monomial Monomial::without(int id) const {
  Monomial m;
  for (auto& [v, e] : f_)
    if (v != id) m.f_.push_back({v, e});
  return m;
}

Monomial Monomial::map_factors(
    const std::function<void(int, int, std::vector<std::pair<int, int>>&)>& fn) const {
  std::vector<std::pair<int, int>> out;
  for (auto& [id, e] : f_) fn(id, e, out);
  Monomial m;
  m.f_ = merge_factors(std::move(out));
  return m;
}

int Monomial::cmp_lex(const Monomial& x, const Monomial& y) {
  size_t i = 0, j = 0;
  while (i < x.f_.size() && j < y.f_.size()) {
    if (x.f_[i].first < y.f_[j].first) return 1;
    if (y.f_[j].first < x.f_[i].first) return -1;
    if (x.f_[i].second != y.f_[j].second) return x.f_[i].second > y.f_[j].second ? 1 : -1;
    ++i;
    ++j;
  }
  if (i < x.f_.size()) return 1;
  if (j < y.f_.size()) return -1;
  return 0;
}

// ---------------------------------------------------------------------------
// PPoly

void PPoly::add_term(Monomial m, GaussianRational c) {
  if (c.is_zero()) return;
  // Fold sign-parameter exponents modulo 2.
  auto& table = ParamTable::instance();
  for (auto& [id, e] : m.f_) {
    if (e > 1 && table.is_sign(id)) e &= 1;
  }
  std::erase_if(m.f_, [](auto& p) { return p.second == 0; });
  auto [it, inserted] = t_.try_emplace(std::move(m), c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) t_.erase(it);
  }
}

bool PPoly::is_constant() const {
  return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one());
}

GaussianRational PPoly::constant_value() const {
  if (t_.empty()) return GaussianRational(0);
  if (!is_constant()) fail("Internal", "constant_value of non-constant polynomial");
  return t_.begin()->second;
}

const Monomial& PPoly::leading_monomial() const {
  if (t_.empty()) fail("Internal", "leading term of zero polynomial");
  return t_.begin()->first;
}

const GaussianRational& PPoly::leading_coefficient() const {
  if (t_.empty()) fail("Internal", "leading term of zero polynomial");
  return t_.begin()->second;
}

PPoly PPoly::operator-() const {
  PPoly p;
  for (auto& [m, c] : t_) p.t_.emplace(m, -c);
  return p;
}

PPoly PPoly::operator+(const PPoly& o) const {
  PPoly p = *this;
  for (auto& [m, c] : o.t_) p.add_term(m, c);
  return p;
}

PPoly PPoly::operator-(const PPoly& o) const {
  PPoly p = *this;
  for (auto& [m, c] : o.t_) p.add_term(m, -c);
  return p;
}

PPoly PPoly::operator*(const PPoly& o) const {
  PPoly p;
  for (auto& [m1, c1] : t_)
    for (auto& [m2, c2] : o.t_) p.add_term(m1.times(m2), c1 * c2);
  return p;
}

PPoly PPoly::scale(const GaussianRational& c) const {
  PPoly p;
  if (c.is_zero()) return p;
  for (auto& [m, cc] : t_) p.t_.emplace(m, cc * c);
  return p;
}

PPoly PPoly::pow(int e) const {
  if (e < 0) fail("Internal", "negative power of a polynomial");
  PPoly r(1);
  for (int k = 0; k < e; ++k) r *= *this;
  return r;
}

PPoly PPoly::conj() const {
  auto& table = ParamTable::instance();
  PPoly p;
  for (auto& [m, c] : t_) {
    Monomial mm = m.map_factors([&](int id, int e, std::vector<std::pair<int, int>>& out) {
      out.push_back({table.conj(id), e});
    });
    p.add_term(std::move(mm), c.conj());
  }
  return p;
}

bool PPoly::has_sign_params() const {
  auto& table = ParamTable::instance();
  for (auto& [m, c] : t_)
    for (auto& [id, e] : m.factors())
      if (table.is_sign(id)) return true;
  return false;
}

std::pair<PPoly, PPoly> PPoly::split_sign() const {
  auto& table = ParamTable::instance();
  PPoly even, odd;
  for (auto& [m, c] : t_) {
    int sign_id = -1;
    for (auto& [id, e] : m.factors())
      if (table.is_sign(id)) sign_id = id;
    if (sign_id < 0)
      even.add_term(m, c);
    else
      odd.add_term(m.without(sign_id), c);
  }
  return {even, odd};
}

int PPoly::min_var() const {
  int best = -1;
  for (auto& [m, c] : t_)
    for (auto& [id, e] : m.factors())
      if (best < 0 || id < best) best = id;
  return best;
}

int PPoly::degree_in(int id) const {
  int d = 0;
  for (auto& [m, c] : t_) d = std::max(d, m.exponent(id));
  return d;
}

PPoly PPoly::coeff_of(int id, int exp) const {
  PPoly p;
  for (auto& [m, c] : t_)
    if (m.exponent(id) == exp) p.add_term(m.without(id), c);
  return p;
}

PPoly PPoly::times_power(int id, int exp) const {
  PPoly p;
  Monomial shift = Monomial::var(id, exp);
  for (auto& [m, c] : t_) p.add_term(m.times(shift), c);
  return p;
}

PPoly PPoly::one_like(const Monomial& m) const {
  PPoly p;
  p.add_term(m, GaussianRational(1));
  return p;
}

PPoly PPoly::exact_divide(const PPoly& num, const PPoly& den) {
  if (num.has_sign_params() || den.has_sign_params())
    fail("Internal", "exact_divide requires sign-free operands");
  return detail::poly_exact_divide(num, den);
}

PPoly PPoly::gcd(const PPoly& x, const PPoly& y) {
  if (x.has_sign_params() || y.has_sign_params())
    fail("Internal", "gcd requires sign-free operands");
  return detail::poly_gcd(x, y);
}

Scalar PPoly::substitute(const std::map<ParamId, Scalar>& sigma) const {
  Scalar out(0);
  for (auto& [m, c] : t_) {
    Scalar prod{c};
    for (auto& [id, e] : m.factors()) {
      auto it = sigma.find(id);
      Scalar base = it != sigma.end() ? it->second : Scalar::param(id);
      prod *= base.pow(e);
    }
    out += prod;
  }
  return out;
}

PPoly PPoly::rewrite_a1bar() const {
  PPoly p;
  for (auto& [m, c] : t_) {
    Monomial mm = m.map_factors([](int id, int e, std::vector<std::pair<int, int>>& out) {
      if (id == param::a1_bar) {
        out.push_back({param::a1, e});
        out.push_back({param::eps, e});
      } else {
        out.push_back({id, e});
      }
    });
    p.add_term(std::move(mm), c);
  }
  return p;
}

PPoly PPoly::rewrite_r_square() const {
  PPoly p;
  for (auto& [m, c] : t_) {
    Monomial mm = m.map_factors([](int id, int e, std::vector<std::pair<int, int>>& out) {
      if (id == param::r && e >= 2) {
        out.push_back({param::r, e % 2});
        out.push_back({param::a, e / 2});
        out.push_back({param::a_bar, e / 2});
      } else {
        out.push_back({id, e});
      }
    });
    p.add_term(std::move(mm), c);
  }
  return p;
}

void PPoly::collect_params(std::set<ParamId>& out) const {
  for (auto& [m, c] : t_) {
    (void)c;
    for (auto& [id, e] : m.factors()) {
      (void)e;
      out.insert(id);
    }
  }
}

std::string PPoly::str() const {
  if (t_.empty()) return "0";
  auto& table = ParamTable::instance();
  std::string out;
  bool first = true;
  for (auto& [m, c] : t_) {
    std::string piece;
    if (m.is_one()) {
      piece = c.str();
      if (!c.is_real() && !c.is_imaginary()) piece = "(" + piece + ")";
    } else {
      std::string vars;
      for (auto& [id, e] : m.factors()) {
        if (!vars.empty()) vars += "*";
        vars += table.display(id);
        if (e > 1) vars += "^" + std::to_string(e);
      }
      if (c.is_one())
        piece = vars;
      else if (c == GaussianRational(-1))
        piece = "-" + vars;
      else if (c == GaussianRational::i())
        piece = "i*" + vars;
      else if (c == -GaussianRational::i())
        piece = "-i*" + vars;
      else if (c.is_real() || c.is_imaginary())
        piece = c.str() + "*" + vars;
      else
        piece = "(" + c.str() + ")*" + vars;
    }
    if (first) {
      out = piece;
      first = false;
    } else if (!piece.empty() && piece[0] == '-') {
      out += " - " + piece.substr(1);
    } else {
      out += " + " + piece;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scalar

void Scalar::canonicalize() {
  if (den_.is_zero()) fail("DivisionByZero", "zero denominator");
  if (num_.is_zero()) {
    den_ = PPoly(1);
    return;
  }
  if (den_.has_sign_params()) {
    auto [d0, d1] = den_.split_sign();
    PPoly eps = PPoly::var(param::eps);
    PPoly clear = d0 - eps * d1;
    PPoly nden = d0 * d0 - d1 * d1;
    if (nden.is_zero())
      fail("DivisionByZero", "denominator is a zero divisor modulo the sign relation");
    num_ = num_ * clear;
    den_ = nden;
  }
  auto [n0, n1] = num_.split_sign();
  PPoly g = PPoly::gcd(PPoly::gcd(n0, n1), den_);
  if (!g.is_constant()) {
    n0 = n0.is_zero() ? n0 : PPoly::exact_divide(n0, g);
    n1 = n1.is_zero() ? n1 : PPoly::exact_divide(n1, g);
    den_ = PPoly::exact_divide(den_, g);
    num_ = n0 + PPoly::var(param::eps) * n1;
  }
  GaussianRational lc = den_.leading_coefficient();
  if (!lc.is_one()) {
    GaussianRational inv = lc.inverse();
    num_ = num_.scale(inv);
    den_ = den_.scale(inv);
  }
}

GaussianRational Scalar::constant_value() const {
  if (!is_constant()) fail("Internal", "constant_value of non-constant scalar");
  return num_.constant_value() / den_.constant_value();
}

bool Scalar::is_real() const { return *this == conj(); }

Scalar Scalar::operator-() const {
  Scalar s;
  s.num_ = -num_;
  s.den_ = den_;
  return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
  if (den_ == o.den_) return Scalar(num_ + o.num_, den_);
  return Scalar(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
  return Scalar(num_ * o.num_, den_ * o.den_);
}

Scalar Scalar::operator/(const Scalar& o) const {
  return Scalar(num_ * o.den_, den_ * o.num_);
}

Scalar Scalar::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  Scalar r(1);
  for (int k = 0; k < e; ++k) r *= *this;
  return r;
}

Scalar Scalar::substitute(const std::map<ParamId, Scalar>& sigma) const {
  auto& table = ParamTable::instance();
  std::map<ParamId, Scalar> full = sigma;
  for (auto& [id, v] : sigma) {
    switch (table.reality(id)) {
      case Reality::Real:
        if (!v.is_real())
          fail("RealityViolation",
               "real parameter " + table.display(id) + " assigned non-real value " + v.str());
        break;
      case Reality::Sign:
        if (!v.is_real() || !(v * v == Scalar(1)))
          fail("RealityViolation",
               "sign parameter " + table.display(id) + " assigned value " + v.str());
        break;
      case Reality::Complex: {
        ParamId partner = table.conj(id);
        Scalar want = v.conj();
        auto it = sigma.find(partner);
        if (it != sigma.end()) {
          if (!(it->second == want))
            fail("RealityViolation", "conjugate-inconsistent assignment for " +
                                         table.display(id) + " and " + table.display(partner));
        } else {
          full.emplace(partner, want);
        }
        break;
      }
    }
  }
  Scalar n = num_.substitute(full);
  Scalar d = den_.substitute(full);
  return n / d;
}

std::set<ParamId> Scalar::free_params() const {
  std::set<ParamId> out;
  num_.collect_params(out);
  den_.collect_params(out);
  return out;
}

Scalar Scalar::drop_unit() const {
  if (is_zero()) return *this;
  return *this * Scalar(num_.leading_coefficient().inverse());
}

std::string Scalar::str() const {
  if (den_ == PPoly(1)) return num_.str();
  std::string n = num_.str();
  if (num_.term_count() > 1) n = "(" + n + ")";
  return n + "/(" + den_.str() + ")";
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct ScalarBuilder {
  using Value = Scalar;
  Value number(GaussianRational c) { return Scalar(std::move(c)); }
  Value name(const std::string& n, size_t pos) {
    ParamId id = ParamTable::instance().lookup(n);
    if (id < 0) fail("SyntaxError", "unknown parameter '" + n + "' at position " + std::to_string(pos));
    return Scalar::param(id);
  }
  Value conj(Value v, size_t) { return v.conj(); }
  Value neg(Value v) { return -v; }
  Value add(Value x, Value y) { return x + y; }
  Value sub(Value x, Value y) { return x - y; }
  Value mul(Value x, Value y) { return x * y; }
  Value div(Value x, Value y, size_t pos) {
    if (y.is_zero()) fail("DivisionByZero", "division by zero at position " + std::to_string(pos));
    return x / y;
  }
  Value pow(Value v, int e, size_t) { return v.pow(e); }
};

}  // namespace

Scalar parse_scalar(const std::string& text) {
  ScalarBuilder b;
  return detail::parse_expression(text, b);
}

std::string to_string(const GaussianRational& c) { return c.str(); }
std::string to_string(const PPoly& p) { return p.str(); }
std::string to_string(const Scalar& s) { return s.str(); }

}  // namespace crmoduli
