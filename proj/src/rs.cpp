#include <cmath>

#include "csdual/solver.hpp"

namespace csdual {

namespace {

double fixed_point_residual(const MixedModel& model, double q) {
  const double h2 = model.field() * model.field();
  const double om = 1.0 - q;
  return q - (model.xi(q, 1) + h2) * om * om;
}

// Bisection until the residual is below fp_tol or the bracket is two
// adjacent doubles.
double bisect_root(const MixedModel& model, double lo, double hi, double f_lo, double fp_tol) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = fixed_point_residual(model, mid);
    if (std::abs(f_mid) <= fp_tol * 1e-3) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  const double a = fixed_point_residual(model, lo), b = fixed_point_residual(model, hi);
  return std::abs(a) <= std::abs(b) ? lo : hi;
}

}  // namespace

RSDiagnostics rs_quick_tests(const MixedModel& model, const SolveOptions& opt) {
  RSDiagnostics d;
  const double xi2_one = model.xi(1.0, 2);
  const double h2 = model.field() * model.field();
  d.xi2_at_one_le_one = xi2_one <= 1.0;
  d.field_dominates = h2 >= xi2_one;

  std::vector<double> roots;
  const int cells = 1024;
  double prev_x = 0.0;
  double prev_f = fixed_point_residual(model, 0.0);
  if (prev_f == 0.0) roots.push_back(0.0);
  for (int i = 1; i <= cells; ++i) {
    const double x = static_cast<double>(i) / cells;
    // f(1) = 1 > 0; the last sample stays inside [0,1).
    const double xe = i == cells ? std::nextafter(1.0, 0.0) : x;
    const double f = fixed_point_residual(model, xe);
    if (f == 0.0) {
      roots.push_back(xe);
    } else if (prev_f != 0.0 && (f < 0.0) != (prev_f < 0.0)) {
      roots.push_back(bisect_root(model, prev_x, xe, prev_f, opt.fp_tol));
    }
    prev_x = xe;
    prev_f = f;
  }

  CertifyOptions copt;
  copt.gap_tol = opt.gap_tol;
  copt.coin_tol = opt.coin_tol;
  copt.quad_tol = opt.quad_tol;
  copt.mass_tol = opt.mass_tol;
  for (double q : roots) {
    FixedPointRoot r;
    r.q = q;
    r.residual = fixed_point_residual(model, q);
    r.replicon = 1.0 - model.xi(q, 2) * (1.0 - q) * (1.0 - q);
    const ParisiMeasure dq = ParisiMeasure::dirac(q);
    const DualFunction eta(model, dq);
    r.gap = primal_value(model, dq, {opt.quad_tol, opt.mass_tol}) - dual_value(eta, opt.quad_tol);
    r.obstacle_pass = r.gap <= opt.gap_tol;
    d.roots.push_back(r);
  }
  return d;
}

}  // namespace csdual
