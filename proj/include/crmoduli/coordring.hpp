#pragma once

// Polynomials and rational functions in geometric coordinates, with Scalar
// coefficients. Conjugation acts through a pairing on the coordinate space;
// a pair may carry a unit factor (conj(x) = u*y with u a constant Scalar).

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crmoduli/algebra.hpp"

namespace crmoduli {

class CoordRat;

struct CoordInfo {
  std::string name;
  int conj;          // partner index (self for real coordinates)
  Scalar conj_unit;  // conj(x_i) = conj_unit * x_{conj}
  int weight;        // 0 when unweighted; diagnostics only
};

class CoordSpace {
 public:
  int add_real(const std::string& name, int weight = 0);
  // Adds name and conj_name as a conjugate pair; returns the first index.
  int add_pair(const std::string& name, const std::string& conj_name, int weight = 0);
  // Self-paired coordinate with conj(x) = unit * x (unit a constant Scalar).
  int add_unit_real(const std::string& name, Scalar unit, int weight = 0);

  int size() const { return static_cast<int>(info_.size()); }
  int index(const std::string& name) const;  // -1 if absent
  const std::string& name(int i) const { return info_.at(i).name; }
  int conj(int i) const { return info_.at(i).conj; }
  const Scalar& conj_unit(int i) const { return info_.at(i).conj_unit; }
  int weight(int i) const { return info_.at(i).weight; }

  // Same coordinates in the same order (names, pairing, weights); monomials
  // are interchangeable between two spaces with equal layouts.
  bool same_layout(const CoordSpace& o) const;

 private:
  std::vector<CoordInfo> info_;
  std::map<std::string, int> by_name_;
};

using CoordSpacePtr = std::shared_ptr<const CoordSpace>;

class CoordPoly {
 public:
  using TermMap = std::map<Monomial, Scalar, MonomialLexGreater>;

  CoordPoly() = default;
  explicit CoordPoly(CoordSpacePtr sp) : sp_(std::move(sp)) {}
  CoordPoly(CoordSpacePtr sp, Scalar c) : sp_(std::move(sp)) { add_term(Monomial(), std::move(c)); }
  static CoordPoly coord(CoordSpacePtr sp, int i, int exp = 1);

  const CoordSpacePtr& space() const { return sp_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;
  Scalar constant_value() const;
  int term_count() const { return static_cast<int>(t_.size()); }
  const TermMap& terms() const { return t_; }
  const Monomial& leading_monomial() const;
  const Scalar& leading_coefficient() const;

  CoordPoly operator-() const;
  CoordPoly operator+(const CoordPoly& o) const;
  CoordPoly operator-(const CoordPoly& o) const;
  CoordPoly operator*(const CoordPoly& o) const;
  CoordPoly& operator+=(const CoordPoly& o) { return *this = *this + o; }
  CoordPoly& operator-=(const CoordPoly& o) { return *this = *this - o; }
  CoordPoly& operator*=(const CoordPoly& o) { return *this = *this * o; }
  CoordPoly scale(const Scalar& c) const;
  CoordPoly pow(int e) const;
  bool operator==(const CoordPoly& o) const { return t_ == o.t_; }
  bool operator!=(const CoordPoly& o) const { return !(*this == o); }

  CoordPoly conj() const;
  CoordPoly diff(int coord) const;

  // Simultaneous substitution of coordinates by rational expressions over the
  // target space; unmapped coordinates must exist in the target by name.
  CoordRat substitute(const std::map<int, CoordRat>& sigma, CoordSpacePtr target) const;
  // Coordinates to scalar values; every coordinate present must be bound.
  Scalar eval(const std::map<int, Scalar>& point) const;
  // Applies a map to every coefficient (parameter substitutions and rewrites).
  CoordPoly map_coeffs(const std::function<Scalar(const Scalar&)>& fn) const;

  // Weighted degree bookkeeping; nullopt when mixed or a coordinate carries
  // no weight.
  std::optional<int> homogeneous_weight() const;

  int degree_in(int coord) const;
  CoordPoly coeff_of(int coord, int exp) const;
  Scalar coeff_of_monomial(const Monomial& m) const;
  int min_var() const;
  CoordPoly times_power(int coord, int exp) const;
  CoordPoly one_like(const Monomial& m) const {
    CoordPoly p(sp_);
    p.add_term(m, Scalar(1));
    return p;
  }
  CoordPoly zero_like() const { return CoordPoly(sp_); }
  static CoordPoly exact_divide(const CoordPoly& num, const CoordPoly& den);
  static CoordPoly gcd(const CoordPoly& x, const CoordPoly& y);

  std::string str() const;

  void add_term(Monomial m, Scalar c);

 private:
  CoordSpacePtr sp_;
  TermMap t_;
  void check_space(const CoordPoly& o) const;
};

// Reduced fractions of coordinate polynomials. Denominator is normalized to
// leading coefficient 1 and shares no factor with the numerator.
class CoordRat {
 public:
  CoordRat() : num_(), den_(CoordSpacePtr(), Scalar(1)) {}
  explicit CoordRat(CoordSpacePtr sp) : num_(sp), den_(std::move(sp), Scalar(1)) {}
  CoordRat(CoordSpacePtr sp, Scalar c) : num_(sp, std::move(c)), den_(std::move(sp), Scalar(1)) {}
  CoordRat(CoordPoly p) : num_(std::move(p)), den_(num_.space(), Scalar(1)) {}
  CoordRat(CoordPoly num, CoordPoly den) : num_(std::move(num)), den_(std::move(den)) {
    canonicalize();
  }

  const CoordPoly& num() const { return num_; }
  const CoordPoly& den() const { return den_; }
  const CoordSpacePtr& space() const { return num_.space(); }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Scalar constant_value() const;

  CoordRat operator-() const;
  CoordRat operator+(const CoordRat& o) const;
  CoordRat operator-(const CoordRat& o) const;
  CoordRat operator*(const CoordRat& o) const;
  CoordRat operator/(const CoordRat& o) const;
  CoordRat& operator+=(const CoordRat& o) { return *this = *this + o; }
  CoordRat& operator-=(const CoordRat& o) { return *this = *this - o; }
  CoordRat& operator*=(const CoordRat& o) { return *this = *this * o; }
  CoordRat& operator/=(const CoordRat& o) { return *this = *this / o; }
  CoordRat scale(const Scalar& c) const;
  bool operator==(const CoordRat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const CoordRat& o) const { return !(*this == o); }

  CoordRat conj() const { return CoordRat(num_.conj(), den_.conj()); }
  CoordRat diff(int coord) const;
  CoordRat substitute(const std::map<int, CoordRat>& sigma, CoordSpacePtr target) const;
  Scalar eval(const std::map<int, Scalar>& point) const;
  CoordRat map_coeffs(const std::function<Scalar(const Scalar&)>& fn) const {
    return CoordRat(num_.map_coeffs(fn), den_.map_coeffs(fn));
  }

  std::string str() const;

 private:
  CoordPoly num_, den_;
  void canonicalize();
};

std::string to_string(const CoordPoly& p);
std::string to_string(const CoordRat& r);

}  // namespace crmoduli
