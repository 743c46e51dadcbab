#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace csdual::quad {

inline constexpr int kPoints = 16;

/// 16-point Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::array<double, kPoints> x{};
  std::array<double, kPoints> w{};
};

const Rule& gauss_legendre();

template <class F>
double panel(F&& f, double a, double b) {
  const Rule& r = gauss_legendre();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (int i = 0; i < kPoints; ++i) acc += r.w[i] * f(mid + half * r.x[i]);
  return acc * half;
}

struct AdaptiveOptions {
  double tol = 1e-11;  // accepted |one panel - two halves| per unit length
  int max_depth = 48;
};

namespace detail {
template <class F>
double adapt(F& f, double a, double b, double whole, const AdaptiveOptions& opt, int depth) {
  const double m = 0.5 * (a + b);
  const double left = panel(f, a, m);
  const double right = panel(f, m, b);
  const double halves = left + right;
  const double diff = std::abs(halves - whole);
  if (depth >= opt.max_depth || diff <= opt.tol * (b - a) || diff <= 1e-15 * std::abs(halves) || b - a < 1e-13)
    return halves;
  return adapt(f, a, m, left, opt, depth + 1) + adapt(f, m, b, right, opt, depth + 1);
}
}  // namespace detail

/// Composite adaptive Gauss-Legendre over consecutive breakpoints. The
/// integrand must be smooth between breakpoints; panels are bisected until
/// two successive refinements agree to opt.tol per unit length.
template <class F>
double integrate(F&& f, std::span<const double> breaks, const AdaptiveOptions& opt = {}) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (!(b > a)) continue;
    total += detail::adapt(f, a, b, panel(f, a, b), opt, 0);
  }
  return total;
}

/// Fixed composite rule: nodes and weights of Gauss-Legendre panels that
/// respect every breakpoint, have width <= max_width, and shrink
/// geometrically toward t = 1 (width <= approach * (1 - left end)) so that
/// integrands blowing up like (1 - t)^{-k} just beyond the range stay
/// resolved.
struct NodeSet {
  std::vector<double> x;
  std::vector<double> w;
};

NodeSet composite_nodes(std::span<const double> breaks, double max_width = 1.0 / 32.0, double approach = 0.25);

/// Sorted, de-duplicated copy of the points that lie in [lo, hi], with lo
/// and hi included.
std::vector<double> clean_breaks(std::vector<double> pts, double lo, double hi);

}  // namespace csdual::quad
