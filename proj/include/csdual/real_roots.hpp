#pragma once

#include <span>
#include <vector>

namespace csdual {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double t) const { return lo <= t && t <= hi; }
};

/// Real roots of a polynomial in the open unit interval, isolated in exact
/// rational arithmetic.
///
/// `roots` holds one enclosure per distinct root, sorted and pairwise
/// disjoint, each of width <= tol (an exact rational root is reported as a
/// zero-width enclosure). `gap_signs[i]` is the sign (+1 or -1) of the
/// polynomial strictly between enclosure i-1 and enclosure i, with the
/// virtual enclosures 0 and 1 at the ends, so it has roots.size() + 1 entries.
struct RootIsolation {
  bool zero_polynomial = false;
  std::vector<Interval> roots;
  std::vector<int> gap_signs;
};

/// Coefficients are in the power basis (coeffs[i] multiplies t^i). Every
/// finite double is an exact dyadic rational, so the isolation is exact for
/// the polynomial the caller actually holds.
RootIsolation isolate_unit_roots(std::span<const double> coeffs, double tol);

}  // namespace csdual
