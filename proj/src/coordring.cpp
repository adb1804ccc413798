#include "crmoduli/coordring.hpp"

#include <algorithm>

#include "crmoduli/detail/poly_gcd.hpp"

namespace crmoduli {

// ---------------------------------------------------------------------------
// CoordSpace

int CoordSpace::add_real(const std::string& name, int weight) {
  int id = size();
  info_.push_back({name, id, Scalar(1), weight});
  by_name_[name] = id;
  return id;
}

int CoordSpace::add_pair(const std::string& name, const std::string& conj_name, int weight) {
  int id = size();
  info_.push_back({name, id + 1, Scalar(1), weight});
  info_.push_back({conj_name, id, Scalar(1), weight});
  by_name_[name] = id;
  by_name_[conj_name] = id + 1;
  return id;
}

int CoordSpace::add_unit_real(const std::string& name, Scalar unit, int weight) {
  if (!(unit * unit.conj() == Scalar(1)))
    fail("Internal", "conjugation unit must have unit modulus: " + unit.str());
  int id = size();
  info_.push_back({name, id, std::move(unit), weight});
  by_name_[name] = id;
  return id;
}

int CoordSpace::index(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

bool CoordSpace::same_layout(const CoordSpace& o) const {
  if (size() != o.size()) return false;
  for (int i = 0; i < size(); ++i) {
    const CoordInfo& x = info_[i];
    const CoordInfo& y = o.info_[i];
    if (x.name != y.name || x.conj != y.conj || !(x.conj_unit == y.conj_unit) ||
        x.weight != y.weight)
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// CoordPoly

void CoordPoly::check_space(const CoordPoly& o) const {
  if (sp_ && o.sp_ && sp_ != o.sp_)
    fail("Internal", "coordinate polynomials from different spaces");
}

CoordPoly CoordPoly::coord(CoordSpacePtr sp, int i, int exp) {
  CoordPoly p(sp);
  if (i < 0 || i >= sp->size()) fail("Internal", "coordinate index out of range");
  p.add_term(Monomial::var(i, exp), Scalar(1));
  return p;
}

void CoordPoly::add_term(Monomial m, Scalar c) {
  if (c.is_zero()) return;
  auto [it, inserted] = t_.try_emplace(std::move(m), c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) t_.erase(it);
  }
}

bool CoordPoly::is_constant() const {
  return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one());
}

Scalar CoordPoly::constant_value() const {
  if (t_.empty()) return Scalar(0);
  if (!is_constant()) fail("Internal", "constant_value of non-constant polynomial");
  return t_.begin()->second;
}

const Monomial& CoordPoly::leading_monomial() const {
  if (t_.empty()) fail("Internal", "leading term of zero polynomial");
  return t_.begin()->first;
}

const Scalar& CoordPoly::leading_coefficient() const {
  if (t_.empty()) fail("Internal", "leading term of zero polynomial");
  return t_.begin()->second;
}

CoordPoly CoordPoly::operator-() const {
  CoordPoly p(sp_);
  for (auto& [m, c] : t_) p.t_.emplace(m, -c);
  return p;
}

CoordPoly CoordPoly::operator+(const CoordPoly& o) const {
  check_space(o);
  CoordPoly p = *this;
  if (!p.sp_) p.sp_ = o.sp_;
  for (auto& [m, c] : o.t_) p.add_term(m, c);
  return p;
}

CoordPoly CoordPoly::operator-(const CoordPoly& o) const {
  check_space(o);
  CoordPoly p = *this;
  if (!p.sp_) p.sp_ = o.sp_;
  for (auto& [m, c] : o.t_) p.add_term(m, -c);
  return p;
}

CoordPoly CoordPoly::operator*(const CoordPoly& o) const {
  check_space(o);
  CoordPoly p(sp_ ? sp_ : o.sp_);
  for (auto& [m1, c1] : t_)
    for (auto& [m2, c2] : o.t_) p.add_term(m1.times(m2), c1 * c2);
  return p;
}

CoordPoly CoordPoly::scale(const Scalar& c) const {
  CoordPoly p(sp_);
  if (c.is_zero()) return p;
  for (auto& [m, cc] : t_) p.t_.emplace(m, cc * c);
  return p;
}

CoordPoly CoordPoly::pow(int e) const {
  if (e < 0) fail("Internal", "negative power of a polynomial");
  CoordPoly r(sp_, Scalar(1));
  for (int k = 0; k < e; ++k) r *= *this;
  return r;
}

CoordPoly CoordPoly::conj() const {
  CoordPoly p(sp_);
  for (auto& [m, c] : t_) {
    Scalar units(1);
    Monomial mm = m.map_factors([&](int id, int e, std::vector<std::pair<int, int>>& out) {
      out.push_back({sp_->conj(id), e});
      const Scalar& u = sp_->conj_unit(id);
      if (!(u == Scalar(1))) units *= u.pow(e);
    });
    p.add_term(std::move(mm), c.conj() * units);
  }
  return p;
}

CoordPoly CoordPoly::diff(int coord) const {
  CoordPoly p(sp_);
  for (auto& [m, c] : t_) {
    int e = m.exponent(coord);
    if (e == 0) continue;
    Monomial mm = m.map_factors([&](int id, int ee, std::vector<std::pair<int, int>>& out) {
      out.push_back({id, id == coord ? ee - 1 : ee});
    });
    p.add_term(std::move(mm), c * Scalar(e));
  }
  return p;
}

CoordRat CoordPoly::substitute(const std::map<int, CoordRat>& sigma, CoordSpacePtr target) const {
  CoordRat out(target);
  for (auto& [m, c] : t_) {
    CoordRat prod(target, c);
    for (auto& [id, e] : m.factors()) {
      auto it = sigma.find(id);
      if (it != sigma.end()) {
        if (it->second.space() != target)
          fail("Internal", "substitution value lives in the wrong space");
        CoordRat base = it->second;
        for (int k = 0; k < e; ++k) prod *= base;
      } else {
        int ti = target->index(sp_->name(id));
        if (ti < 0)
          fail("Internal", "substitution target lacks coordinate " + sp_->name(id));
        prod *= CoordRat(CoordPoly::coord(target, ti, e));
      }
    }
    out += prod;
  }
  return out;
}

Scalar CoordPoly::eval(const std::map<int, Scalar>& point) const {
  Scalar out(0);
  for (auto& [m, c] : t_) {
    Scalar prod = c;
    for (auto& [id, e] : m.factors()) {
      auto it = point.find(id);
      if (it == point.end())
        fail("Internal", "evaluation point does not bind coordinate " + sp_->name(id));
      prod *= it->second.pow(e);
    }
    out += prod;
  }
  return out;
}

CoordPoly CoordPoly::map_coeffs(const std::function<Scalar(const Scalar&)>& fn) const {
  CoordPoly p(sp_);
  for (auto& [m, c] : t_) p.add_term(m, fn(c));
  return p;
}

std::optional<int> CoordPoly::homogeneous_weight() const {
  std::optional<int> w;
  for (auto& [m, c] : t_) {
    int tw = 0;
    for (auto& [id, e] : m.factors()) {
      int cw = sp_->weight(id);
      if (cw == 0) return std::nullopt;
      tw += cw * e;
    }
    if (w && *w != tw) return std::nullopt;
    w = tw;
  }
  return w;
}

int CoordPoly::degree_in(int coord) const {
  int d = 0;
  for (auto& [m, c] : t_) d = std::max(d, m.exponent(coord));
  return d;
}

CoordPoly CoordPoly::coeff_of(int coord, int exp) const {
  CoordPoly p(sp_);
  for (auto& [m, c] : t_)
    if (m.exponent(coord) == exp) p.add_term(m.without(coord), c);
  return p;
}

Scalar CoordPoly::coeff_of_monomial(const Monomial& m) const {
  auto it = t_.find(m);
  return it == t_.end() ? Scalar(0) : it->second;
}

int CoordPoly::min_var() const {
  int best = -1;
  for (auto& [m, c] : t_)
    for (auto& [id, e] : m.factors())
      if (best < 0 || id < best) best = id;
  return best;
}

CoordPoly CoordPoly::times_power(int coord, int exp) const {
  CoordPoly p(sp_);
  Monomial shift = Monomial::var(coord, exp);
  for (auto& [m, c] : t_) p.add_term(m.times(shift), c);
  return p;
}

CoordPoly CoordPoly::exact_divide(const CoordPoly& num, const CoordPoly& den) {
  return detail::poly_exact_divide(num, den);
}

CoordPoly CoordPoly::gcd(const CoordPoly& x, const CoordPoly& y) {
  return detail::poly_gcd(x, y);
}

std::string CoordPoly::str() const {
  if (t_.empty()) return "0";
  std::string out;
  bool first = true;
  for (auto& [m, c] : t_) {
    std::string piece;
    std::string vars;
    for (auto& [id, e] : m.factors()) {
      if (!vars.empty()) vars += "*";
      vars += sp_->name(id);
      if (e > 1) vars += "^" + std::to_string(e);
    }
    if (vars.empty()) {
      piece = c.is_constant() ? c.str() : "(" + c.str() + ")";
      if (c.is_constant()) {
        GaussianRational v = c.constant_value();
        if (!v.is_real() && !v.is_imaginary()) piece = "(" + piece + ")";
      }
    } else if (c == Scalar(1)) {
      piece = vars;
    } else if (c == Scalar(-1)) {
      piece = "-" + vars;
    } else if (c == Scalar::i()) {
      piece = "i*" + vars;
    } else if (c == -Scalar::i()) {
      piece = "-i*" + vars;
    } else if (c.is_constant()) {
      GaussianRational v = c.constant_value();
      piece = (v.is_real() || v.is_imaginary()) ? v.str() + "*" + vars
                                                : "(" + v.str() + ")*" + vars;
    } else {
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
// CoordRat

void CoordRat::canonicalize() {
  if (den_.is_zero()) fail("DivisionByZero", "zero denominator");
  if (!num_.space() && den_.space()) num_ = CoordPoly(den_.space()) + num_;
  if (num_.is_zero()) {
    den_ = CoordPoly(num_.space(), Scalar(1));
    return;
  }
  CoordPoly g = CoordPoly::gcd(num_, den_);
  if (!g.is_constant()) {
    num_ = CoordPoly::exact_divide(num_, g);
    den_ = CoordPoly::exact_divide(den_, g);
  }
  Scalar lc = den_.leading_coefficient();
  if (!(lc == Scalar(1))) {
    Scalar inv = Scalar(1) / lc;
    num_ = num_.scale(inv);
    den_ = den_.scale(inv);
  }
}

Scalar CoordRat::constant_value() const {
  if (!is_constant()) fail("Internal", "constant_value of non-constant fraction");
  return num_.constant_value() / den_.constant_value();
}

CoordRat CoordRat::operator-() const {
  CoordRat r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

CoordRat CoordRat::operator+(const CoordRat& o) const {
  if (den_ == o.den_) return CoordRat(num_ + o.num_, den_);
  return CoordRat(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

CoordRat CoordRat::operator-(const CoordRat& o) const { return *this + (-o); }

CoordRat CoordRat::operator*(const CoordRat& o) const {
  return CoordRat(num_ * o.num_, den_ * o.den_);
}

CoordRat CoordRat::operator/(const CoordRat& o) const {
  return CoordRat(num_ * o.den_, den_ * o.num_);
}

CoordRat CoordRat::scale(const Scalar& c) const {
  CoordRat r;
  r.num_ = num_.scale(c);
  r.den_ = den_;
  if (r.num_.is_zero()) r.den_ = CoordPoly(den_.space(), Scalar(1));
  return r;
}

CoordRat CoordRat::diff(int coord) const {
  if (is_polynomial()) {
    CoordRat r;
    Scalar inv = Scalar(1) / den_.constant_value();
    r.num_ = num_.diff(coord).scale(inv);
    r.den_ = CoordPoly(num_.space(), Scalar(1));
    return r;
  }
  return CoordRat(num_.diff(coord) * den_ - num_ * den_.diff(coord), den_ * den_);
}

CoordRat CoordRat::substitute(const std::map<int, CoordRat>& sigma, CoordSpacePtr target) const {
  return num_.substitute(sigma, target) / den_.substitute(sigma, target);
}

Scalar CoordRat::eval(const std::map<int, Scalar>& point) const {
  return num_.eval(point) / den_.eval(point);
}

std::string CoordRat::str() const {
  if (den_.is_constant()) return num_.str();
  std::string n = num_.str();
  if (num_.term_count() > 1) n = "(" + n + ")";
  return n + "/(" + den_.str() + ")";
}

std::string to_string(const CoordPoly& p) { return p.str(); }
std::string to_string(const CoordRat& r) { return r.str(); }

}  // namespace crmoduli
