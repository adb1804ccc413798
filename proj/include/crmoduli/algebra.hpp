#pragma once

// Exact scalar arithmetic for the equivalence engine: Gaussian rationals,
// named parameters with reality types, sparse multivariate polynomials over
// them, and the canonical fraction field the rest of the code computes in.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace crmoduli {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Every failure the engine can diagnose carries a short machine-readable kind
// next to the human message.
struct Error : std::runtime_error {
  std::string kind;
  Error(std::string k, const std::string& msg)
      : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

[[noreturn]] void fail(const std::string& kind, const std::string& msg);

// ---------------------------------------------------------------------------
// Gaussian rationals

class GaussianRational {
 public:
  GaussianRational() : re_(0), im_(0) {}
  GaussianRational(long n) : re_(n), im_(0) {}
  GaussianRational(BigRat re) : re_(std::move(re)), im_(0) {}
  GaussianRational(BigRat re, BigRat im) : re_(std::move(re)), im_(std::move(im)) {}

  static GaussianRational i() { return {BigRat(0), BigRat(1)}; }

  const BigRat& re() const { return re_; }
  const BigRat& im() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_one() const { return re_ == 1 && im_ == 0; }
  bool is_real() const { return im_ == 0; }
  bool is_imaginary() const { return re_ == 0 && im_ != 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  BigRat norm() const { return re_ * re_ + im_ * im_; }
  GaussianRational inverse() const;

  GaussianRational operator-() const { return {-re_, -im_}; }
  GaussianRational operator+(const GaussianRational& o) const { return {re_ + o.re_, im_ + o.im_}; }
  GaussianRational operator-(const GaussianRational& o) const { return {re_ - o.re_, im_ - o.im_}; }
  GaussianRational operator*(const GaussianRational& o) const {
    return {re_ * o.re_ - im_ * o.im_, re_ * o.im_ + im_ * o.re_};
  }
  GaussianRational operator/(const GaussianRational& o) const { return *this * o.inverse(); }
  GaussianRational& operator+=(const GaussianRational& o) { return *this = *this + o; }
  GaussianRational& operator-=(const GaussianRational& o) { return *this = *this - o; }
  GaussianRational& operator*=(const GaussianRational& o) { return *this = *this * o; }

  bool operator==(const GaussianRational& o) const { return re_ == o.re_ && im_ == o.im_; }
  bool operator!=(const GaussianRational& o) const { return !(*this == o); }

  // Literal grammar: "p/q", "p/qi", "p/q+r/si", "i", "-i", "2i", "1+1i".
  std::string str() const;
  static GaussianRational parse(const std::string& text);

 private:
  BigRat re_, im_;
};

// ---------------------------------------------------------------------------
// Parameter table

enum class Reality { Real, Complex, Sign };

using ParamId = int;

// Fixed ids of the built-in parameters; DSL-declared parameters append after.
namespace param {
inline constexpr ParamId a = 0;
inline constexpr ParamId a_bar = 1;
inline constexpr ParamId b = 2;
inline constexpr ParamId r = 3;
inline constexpr ParamId eps = 4;
inline constexpr ParamId a1 = 5;
inline constexpr ParamId a1_bar = 6;
inline constexpr ParamId a2 = 7;
inline constexpr ParamId a2_bar = 8;
inline constexpr ParamId a3 = 9;
inline constexpr ParamId a3_bar = 10;
inline constexpr ParamId a4 = 11;
inline constexpr ParamId a4_bar = 12;
inline constexpr ParamId a5 = 13;
inline constexpr ParamId a5_bar = 14;
inline constexpr ParamId a6 = 15;
inline constexpr ParamId a7 = 16;
inline constexpr ParamId a7_bar = 17;
inline constexpr int builtin_count = 18;
}  // namespace param

// Append-only registry. The id order doubles as the variable order of the
// monomial order, so ids are never reused or reordered.
class ParamTable {
 public:
  static ParamTable& instance();

  ParamId register_real(const std::string& name);
  // Registers name and its conjugate partner; returns the base id.
  ParamId register_complex(const std::string& name);

  ParamId lookup(const std::string& name) const;  // -1 if absent
  int size() const { return static_cast<int>(info_.size()); }

  Reality reality(ParamId id) const { return info_.at(id).reality; }
  ParamId conj(ParamId id) const { return info_.at(id).conj; }
  const std::string& display(ParamId id) const { return info_.at(id).display; }
  bool is_sign(ParamId id) const { return info_.at(id).reality == Reality::Sign; }

  // Drops everything a DSL run registered past the built-ins.
  void reset_to_builtin();

 private:
  ParamTable();
  struct Info {
    std::string display;  // "a", "conj(a)", "b", "eps", ...
    Reality reality;
    ParamId conj;
  };
  ParamId add(std::string display, Reality r, ParamId conj_partner);
  std::vector<Info> info_;
  std::map<std::string, ParamId> by_name_;
};

// ---------------------------------------------------------------------------
// Monomials

// Sparse exponent vector, factors sorted by ascending id. Comparison is
// lexicographic in id order (larger exponent at the first differing variable
// wins), which makes leading terms and the division algorithm deterministic.
class Monomial {
 public:
  Monomial() = default;
  static Monomial var(int id, int exp = 1);

  bool is_one() const { return f_.empty(); }
  int total_degree() const;
  int exponent(int id) const;
  const std::vector<std::pair<int, int>>& factors() const { return f_; }

  Monomial times(const Monomial& o) const;
  bool divides(const Monomial& o) const;       // *this | o
  Monomial divide_into(const Monomial& o) const;  // o / *this, assumes divides
  Monomial without(int id) const;

  // Rebuilds the monomial with each factor (id, e) replaced by fn(id, e),
  // which may fan a factor out into several ids; exponents accumulate.
  Monomial map_factors(
      const std::function<void(int id, int exp,
                               std::vector<std::pair<int, int>>& out)>& fn) const;

  static int cmp_lex(const Monomial& x, const Monomial& y);
  bool operator==(const Monomial& o) const { return f_ == o.f_; }

 private:
  std::vector<std::pair<int, int>> f_;
  void push(int id, int exp);
  friend class PPoly;
};

struct MonomialLexGreater {
  bool operator()(const Monomial& x, const Monomial& y) const {
    return Monomial::cmp_lex(x, y) > 0;
  }
};

// ---------------------------------------------------------------------------
// Parameter polynomials

class Scalar;

// Polynomials in the registered parameters over the Gaussian rationals.
// Exponents of sign parameters are folded modulo 2 on every insertion, so
// the relation eps^2 = 1 holds by construction.
class PPoly {
 public:
  using TermMap = std::map<Monomial, GaussianRational, MonomialLexGreater>;

  PPoly() = default;
  PPoly(long n) { add_term(Monomial(), GaussianRational(n)); }
  PPoly(GaussianRational c) { add_term(Monomial(), std::move(c)); }
  static PPoly var(ParamId id, int exp = 1) {
    PPoly p;
    p.add_term(Monomial::var(id, exp), GaussianRational(1));
    return p;
  }

  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;
  GaussianRational constant_value() const;  // requires is_constant()
  int term_count() const { return static_cast<int>(t_.size()); }
  const TermMap& terms() const { return t_; }

  const Monomial& leading_monomial() const;
  const GaussianRational& leading_coefficient() const;

  PPoly operator-() const;
  PPoly operator+(const PPoly& o) const;
  PPoly operator-(const PPoly& o) const;
  PPoly operator*(const PPoly& o) const;
  PPoly& operator+=(const PPoly& o) { return *this = *this + o; }
  PPoly& operator-=(const PPoly& o) { return *this = *this - o; }
  PPoly& operator*=(const PPoly& o) { return *this = *this * o; }
  PPoly scale(const GaussianRational& c) const;
  PPoly pow(int e) const;  // e >= 0
  bool operator==(const PPoly& o) const { return t_ == o.t_; }
  bool operator!=(const PPoly& o) const { return !(*this == o); }

  PPoly conj() const;

  bool has_sign_params() const;
  // Writes *this = first + eps * second with both parts sign-free.
  std::pair<PPoly, PPoly> split_sign() const;

  // Structure as a polynomial in one chosen variable.
  int min_var() const;  // smallest id present, -1 when constant
  int degree_in(int id) const;
  PPoly coeff_of(int id, int exp) const;
  PPoly times_power(int id, int exp) const;

  PPoly one_like(const Monomial& m) const;
  PPoly zero_like() const { return PPoly(); }
  // Exact division; fails with kind "ExactDivide" if the division leaves a
  // remainder. Both operands must be sign-free.
  static PPoly exact_divide(const PPoly& num, const PPoly& den);
  // Monic gcd over the Gaussian rationals; operands must be sign-free.
  static PPoly gcd(const PPoly& x, const PPoly& y);

  Scalar substitute(const std::map<ParamId, Scalar>& sigma) const;
  PPoly rewrite_a1bar() const;     // conj(a1) -> eps*a1 in every monomial
  PPoly rewrite_r_square() const;  // r^2 -> a*conj(a) in every monomial

  void collect_params(std::set<ParamId>& out) const;

  std::string str() const;

  void add_term(Monomial m, GaussianRational c);

 private:
  TermMap t_;
};

// ---------------------------------------------------------------------------
// Canonical fraction field

// num/den with den sign-free, gcd(num, den) trivial, and den monic under the
// global monomial order. Constants therefore always canonicalize to den = 1.
class Scalar {
 public:
  Scalar() : num_(), den_(1) {}
  Scalar(long n) : num_(n), den_(1) {}
  Scalar(GaussianRational c) : num_(std::move(c)), den_(1) {}
  Scalar(PPoly p) : num_(std::move(p)), den_(1) {}
  Scalar(PPoly num, PPoly den) : num_(std::move(num)), den_(std::move(den)) { canonicalize(); }
  static Scalar param(ParamId id, int exp = 1) { return Scalar(PPoly::var(id, exp)); }
  static Scalar i() { return Scalar(GaussianRational::i()); }

  const PPoly& num() const { return num_; }
  const PPoly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  GaussianRational constant_value() const;
  bool is_real() const;

  Scalar operator-() const;
  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }
  bool operator==(const Scalar& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  Scalar inverse() const { return Scalar(den_, num_); }
  Scalar pow(int e) const;
  Scalar conj() const { return Scalar(num_.conj(), den_.conj()); }

  // Reality-checked substitution. Complex-paired entries are auto-extended to
  // the partner (explicit inconsistent partners raise RealityViolation), real
  // parameters require real values, sign parameters require square roots of 1.
  Scalar substitute(const std::map<ParamId, Scalar>& sigma) const;

  Scalar rewrite_a1bar() const { return Scalar(num_.rewrite_a1bar(), den_.rewrite_a1bar()); }
  Scalar rewrite_r_square() const { return Scalar(num_.rewrite_r_square(), den_.rewrite_r_square()); }

  std::set<ParamId> free_params() const;

  // Divides out the leading rational unit of the numerator: 3*i*a/b^2 becomes
  // a/b^2. Used when collecting invariant coefficients up to scale.
  Scalar drop_unit() const;

  std::string str() const;

 private:
  PPoly num_, den_;
  void canonicalize();
};

Scalar parse_scalar(const std::string& text);

std::string to_string(const GaussianRational& c);
std::string to_string(const PPoly& p);
std::string to_string(const Scalar& s);

}  // namespace crmoduli
