#pragma once

// Exact division and gcd over sparse polynomials with field coefficients,
// shared by the parameter and coordinate rings. The gcd runs the Euclidean
// algorithm in one variable with weakly reduced polynomial fractions as
// coefficients (monomial content and unit normalization only), then restores
// contents; this avoids the blowup of pseudo-division remainder sequences.
//
// Requirements on P: term map Monomial -> Coeff (field), is_zero,
// is_constant, term_count, terms(), leading_monomial, leading_coefficient,
// degree_in, coeff_of, times_power, one_like(Monomial), zero_like(), scale(Coeff),
// ring operators, add_term.

#include <algorithm>
#include <map>

#include "crmoduli/algebra.hpp"

namespace crmoduli::detail {

template <class P>
P poly_exact_divide(const P& num, const P& den) {
  if (den.is_zero()) fail("DivisionByZero", "polynomial division by zero");
  P q = num.zero_like();
  P r = num;
  const Monomial& lm = den.leading_monomial();
  const auto lc = den.leading_coefficient();
  while (!r.is_zero()) {
    const Monomial& rm = r.leading_monomial();
    if (!lm.divides(rm)) fail("ExactDivide", "inexact polynomial division");
    P t = num.one_like(lm.divide_into(rm)).scale(r.leading_coefficient() / lc);
    q += t;
    r -= t * den;
  }
  return q;
}

template <class P>
P poly_unit_normalize(const P& p) {
  if (p.is_zero()) return p;
  auto lc = p.leading_coefficient();
  return p.scale(decltype(lc)(1) / lc);
}

template <class P>
P poly_gcd(const P& x, const P& y);

template <class P>
P poly_content_in(const P& p, int v) {
  P g = p.zero_like();
  for (int e = p.degree_in(v); e >= 0; --e) {
    P c = p.coeff_of(v, e);
    if (c.is_zero()) continue;
    g = poly_gcd(g, c);
    if (g.is_constant() && !g.is_zero()) break;
  }
  return g;
}

template <class P>
P poly_monomial_gcd(const Monomial& m, const P& p) {
  Monomial g;
  for (auto& [id, e] : m.factors()) {
    int low = e;
    for (auto& [pm, pc] : p.terms()) low = std::min(low, pm.exponent(id));
    g = g.times(Monomial::var(id, low));
  }
  return p.one_like(g);
}

template <class P>
struct WeakFrac {
  P n, d;

  void reduce() {
    if (n.is_zero()) {
      d = d.one_like(Monomial());
      return;
    }
    std::map<int, int> low;
    bool start = true;
    auto scan = [&](const P& p) {
      std::map<int, int> cur;
      bool first = true;
      for (auto& [m, c] : p.terms()) {
        if (first) {
          for (auto& [id, e] : m.factors()) cur[id] = e;
          first = false;
          continue;
        }
        for (auto it = cur.begin(); it != cur.end();) {
          int e = m.exponent(it->first);
          if (e == 0)
            it = cur.erase(it);
          else {
            it->second = std::min(it->second, e);
            ++it;
          }
        }
      }
      if (start) {
        low = cur;
        start = false;
      } else {
        for (auto it = low.begin(); it != low.end();) {
          auto jt = cur.find(it->first);
          if (jt == cur.end())
            it = low.erase(it);
          else {
            it->second = std::min(it->second, jt->second);
            ++it;
          }
        }
      }
    };
    scan(n);
    scan(d);
    if (!low.empty()) {
      Monomial g;
      for (auto& [id, e] : low) g = g.times(Monomial::var(id, e));
      P gp = n.one_like(g);
      n = poly_exact_divide(n, gp);
      d = poly_exact_divide(d, gp);
    }
    auto lc = d.leading_coefficient();
    if (!(lc == decltype(lc)(1))) {
      auto inv = decltype(lc)(1) / lc;
      n = n.scale(inv);
      d = d.scale(inv);
    }
  }

  bool is_zero() const { return n.is_zero(); }
  WeakFrac operator*(const WeakFrac& o) const {
    WeakFrac r{n * o.n, d * o.d};
    r.reduce();
    return r;
  }
  WeakFrac operator/(const WeakFrac& o) const {
    WeakFrac r{n * o.d, d * o.n};
    r.reduce();
    return r;
  }
  WeakFrac operator-(const WeakFrac& o) const {
    WeakFrac r{n * o.d - o.n * d, d * o.d};
    r.reduce();
    return r;
  }
};

template <class P>
P poly_gcd(const P& x, const P& y) {
  if (x.is_zero()) return poly_unit_normalize(y);
  if (y.is_zero()) return poly_unit_normalize(x);
  if (x.is_constant() || y.is_constant()) return x.one_like(Monomial());
  if (x.term_count() == 1) return poly_monomial_gcd(x.leading_monomial(), y);
  if (y.term_count() == 1) return poly_monomial_gcd(y.leading_monomial(), x);
  // Main variable: lowest joint degree keeps the Euclidean sequence short.
  int v = -1, best = 0;
  {
    std::map<int, int> deg;
    for (auto& [m, c] : x.terms())
      for (auto& [id, e] : m.factors()) deg[id] = std::max(deg[id], e);
    for (auto& [m, c] : y.terms())
      for (auto& [id, e] : m.factors()) deg[id] = std::max(deg[id], e);
    for (auto& [id, d] : deg)
      if (v < 0 || d < best) v = id, best = d;
  }
  P cx = poly_content_in(x, v), cy = poly_content_in(y, v);
  P c = poly_gcd(cx, cy);

  using FPoly = std::map<int, WeakFrac<P>>;
  auto view = [&](const P& p) {
    FPoly out;
    for (int e = p.degree_in(v); e >= 0; --e) {
      P cc = p.coeff_of(v, e);
      if (!cc.is_zero()) out[e] = WeakFrac<P>{cc, p.one_like(Monomial())};
    }
    return out;
  };
  auto fdeg = [](const FPoly& p) { return p.empty() ? -1 : p.rbegin()->first; };

  FPoly p = view(poly_exact_divide(x, cx));
  FPoly q = view(poly_exact_divide(y, cy));
  if (fdeg(p) < fdeg(q)) std::swap(p, q);
  while (!q.empty()) {
    int nb = fdeg(q);
    const WeakFrac<P>& lb = q.rbegin()->second;
    while (fdeg(p) >= nb) {
      int da = fdeg(p);
      WeakFrac<P> t = p.rbegin()->second / lb;
      for (auto& [e, cc] : q) {
        int k = e + da - nb;
        auto it = p.find(k);
        WeakFrac<P> nv =
            (it == p.end() ? WeakFrac<P>{x.zero_like(), x.one_like(Monomial())}
                           : it->second) -
            t * cc;
        if (nv.is_zero()) {
          if (it != p.end()) p.erase(it);
        } else if (it != p.end()) {
          it->second = std::move(nv);
        } else {
          p.emplace(k, std::move(nv));
        }
      }
    }
    std::swap(p, q);
  }
  if (fdeg(p) == 0) return poly_unit_normalize(c);
  // Clear coefficient denominators, then strip the content in v.
  P den = x.one_like(Monomial());
  for (auto& [e, cc] : p) den *= cc.d;
  P g = x.zero_like();
  for (auto& [e, cc] : p) g += (cc.n * poly_exact_divide(den, cc.d)).times_power(v, e);
  g = poly_exact_divide(g, poly_content_in(g, v));
  return poly_unit_normalize(c * g);
}

}  // namespace crmoduli::detail
