#include "csdual/real_roots.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace csdual {
namespace {

using Rational = mpq_class;
using Poly = std::vector<Rational>;  // power basis

void trim(Poly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  trim(d);
  return d;
}

Rational eval(const Poly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

int sign_at(const Poly& p, const Rational& x) { return sgn(eval(p, x)); }

// Polynomial long division a = q*b + r; b must be nonzero.
std::pair<Poly, Poly> divmod(Poly a, const Poly& b) {
  trim(a);
  Poly q;
  if (a.size() < b.size()) return {q, a};
  q.assign(a.size() - b.size() + 1, Rational(0));
  const Rational& lead = b.back();
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    Rational factor = a.back() / lead;
    q[shift] = factor;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= factor * b[i];
    a.pop_back();
    trim(a);
  }
  trim(q);
  return {q, a};
}

void make_monic(Poly& p) {
  if (p.empty()) return;
  Rational lead = p.back();
  for (auto& c : p) c /= lead;
}

Poly gcd(Poly a, Poly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  make_monic(a);
  return a;
}

// p(a + w*x) by Horner's scheme on polynomials.
Poly compose_affine(const Poly& p, const Rational& a, const Rational& w) {
  Poly r;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    Poly next(r.size() + 1, Rational(0));
    for (std::size_t i = 0; i < r.size(); ++i) {
      next[i] += r[i] * a;
      next[i + 1] += r[i] * w;
    }
    next[0] += *it;
    r = std::move(next);
  }
  trim(r);
  return r;
}

// Descartes bound on the number of roots of p in (a, b), via the Moebius
// map x = a + (b - a)/(1 + y) and a count of sign variations.
int descartes_bound(const Poly& p, const Rational& a, const Rational& b) {
  Poly scaled = compose_affine(p, a, b - a);
  const std::size_t n = scaled.size();
  if (n == 0) return 0;
  Poly reversed(scaled.rbegin(), scaled.rend());
  Poly shifted = compose_affine(reversed, Rational(1), Rational(1));
  int variations = 0;
  int last = 0;
  for (const auto& c : shifted) {
    const int s = sgn(c);
    if (s == 0) continue;
    if (last != 0 && s != last) ++variations;
    last = s;
  }
  return variations;
}

struct ExactEnclosure {
  Rational lo;
  Rational hi;
};

void isolate(const Poly& p, const Rational& a, const Rational& b, std::vector<ExactEnclosure>& out) {
  const int v = descartes_bound(p, a, b);
  if (v == 0) return;
  if (v == 1) {
    out.push_back({a, b});
    return;
  }
  Rational m = (a + b) / 2;
  isolate(p, a, m, out);
  if (sign_at(p, m) == 0) out.push_back({m, m});
  isolate(p, m, b, out);
}

// Shrinks an enclosure of a simple root by sign bisection. An endpoint may be
// an exact root of its own (the neighbour of a zero-width enclosure); the
// other endpoint or, failing that, the Descartes bound picks the half.
void refine(const Poly& p, ExactEnclosure& e, const Rational& tol) {
  if (e.lo == e.hi) return;
  int s_lo = sign_at(p, e.lo);
  int s_hi = sign_at(p, e.hi);
  while (e.hi - e.lo > tol) {
    Rational m = (e.lo + e.hi) / 2;
    const int s_m = sign_at(p, m);
    if (s_m == 0) {
      e.lo = m;
      e.hi = m;
      return;
    }
    bool go_right;
    if (s_lo != 0) {
      go_right = s_m == s_lo;
    } else if (s_hi != 0) {
      go_right = s_m != s_hi;
    } else {
      go_right = descartes_bound(p, e.lo, m) == 0;
    }
    if (go_right) {
      e.lo = m;
      s_lo = s_m;
    } else {
      e.hi = m;
      s_hi = s_m;
    }
  }
}

void bisect_once(const Poly& p, ExactEnclosure& e) {
  if (e.lo == e.hi) return;
  Rational half = (e.hi - e.lo) / 2;
  refine(p, e, half);
}

}  // namespace

RootIsolation isolate_unit_roots(std::span<const double> coeffs, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("root tolerance must be positive");
  RootIsolation result;

  Poly p;
  p.reserve(coeffs.size());
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite polynomial coefficient");
    p.emplace_back(c);
  }
  trim(p);
  if (p.empty()) {
    result.zero_polynomial = true;
    return result;
  }

  // Square-free part; roots at 0 and 1 lie outside the open interval.
  Poly sf = p;
  Poly dp = derivative(p);
  if (!dp.empty()) {
    Poly g = gcd(p, dp);
    if (g.size() > 1) sf = divmod(p, g).first;
  }
  while (!sf.empty() && sgn(sf.front()) == 0) sf.erase(sf.begin());
  {
    const Poly x_minus_one{Rational(-1), Rational(1)};
    while (sf.size() > 1 && sign_at(sf, Rational(1)) == 0) sf = divmod(sf, x_minus_one).first;
  }

  std::vector<ExactEnclosure> encl;
  if (sf.size() > 1) isolate(sf, Rational(0), Rational(1), encl);

  const Rational qtol(tol);
  for (auto& e : encl) refine(sf, e, qtol);

  // Separate enclosures from each other and from the ends so that every
  // open gap between them has a rational interior sample point.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < encl.size(); ++i) {
      if (encl[i].lo == 0) {
        bisect_once(sf, encl[i]);
        changed = true;
      }
      if (encl[i].hi == 1) {
        bisect_once(sf, encl[i]);
        changed = true;
      }
      if (i + 1 < encl.size() && encl[i].hi >= encl[i + 1].lo) {
        bisect_once(sf, encl[i]);
        bisect_once(sf, encl[i + 1]);
        changed = true;
      }
    }
  }

  Rational left = 0;
  for (std::size_t i = 0; i <= encl.size(); ++i) {
    Rational right = i < encl.size() ? encl[i].lo : Rational(1);
    Rational sample = (left + right) / 2;
    result.gap_signs.push_back(sign_at(p, sample));
    if (i < encl.size()) left = encl[i].hi;
  }
  for (const auto& e : encl) result.roots.push_back({e.lo.get_d(), e.hi.get_d()});
  return result;
}

}  // namespace csdual
