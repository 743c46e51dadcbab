#include "csdual/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>

namespace csdual::quad {

const Rule& gauss_legendre() {
  static const Rule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, kPoints>;
    const auto& abscissa = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    Rule r;
    // Boost stores the nonnegative half of a symmetric rule.
    int k = 0;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      r.x[k] = -abscissa[i];
      r.w[k++] = weights[i];
      r.x[k] = abscissa[i];
      r.w[k++] = weights[i];
    }
    return r;
  }();
  return rule;
}

NodeSet composite_nodes(std::span<const double> breaks, double max_width, double approach) {
  NodeSet ns;
  const Rule& r = gauss_legendre();
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (!(b > a)) continue;
    double x = a;
    for (bool last = false; !last;) {
      double w = std::min(max_width, approach * (1.0 - x));
      last = !(w > 0.0) || x + w >= b - 1e-15;
      if (last) w = b - x;
      const double half = 0.5 * w;
      const double mid = x + half;
      for (int j = 0; j < kPoints; ++j) {
        ns.x.push_back(mid + half * r.x[j]);
        ns.w.push_back(half * r.w[j]);
      }
      x += w;
    }
  }
  return ns;
}

std::vector<double> clean_breaks(std::vector<double> pts, double lo, double hi) {
  std::vector<double> out;
  out.reserve(pts.size() + 2);
  out.push_back(lo);
  for (double p : pts)
    if (p > lo && p < hi) out.push_back(p);
  out.push_back(hi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace csdual::quad
