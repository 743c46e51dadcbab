#include "csdual/primal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csdual/error.hpp"

namespace csdual {

double primal_value(const MixedModel& model, const Measure& mu, const PrimalOptions& opt) {
  require_probability(mu, opt.mass_tol);
  const double qs = mu.support_sup();
  const double h2 = model.field() * model.field();
  const double psi0 = mu.phi_deficit(0.0);
  double inner = 0.0;
  if (qs > 0.0) {
    const auto breaks = quad::clean_breaks(mu.breakpoints(), 0.0, qs);
    quad::AdaptiveOptions aopt;
    aopt.tol = opt.quad_tol;
    inner = quad::integrate(
        [&](double s) {
          const double psi = mu.phi_deficit(s);
          const double phi = (1.0 - s) - psi;
          return psi * (1.0 / (phi * (1.0 - s)) - model.xi(s, 2));
        },
        breaks, aopt);
  }
  return 0.5 * (model.xi(1.0) + inner + h2 * (1.0 - psi0));
}

double primal_dirac(const MixedModel& model, double q) {
  if (!(q >= 0.0) || !(q < 1.0)) throw InvalidMeasureError("delta_q needs q in [0,1)");
  const double h2 = model.field() * model.field();
  return 0.5 * (model.xi(1.0) - model.xi(q) + q / (1.0 - q) + std::log1p(-q) + h2 * (1.0 - q));
}

double mass_gradient(const MixedModel& model, const Measure& mu, double q, const PrimalOptions& opt) {
  require_probability(mu, opt.mass_tol);
  if (!(q >= 0.0) || !(q < 1.0)) throw InvalidMeasureError("mass_gradient needs q in [0,1)");
  const double top = std::max(q, mu.support_sup());
  const double h2 = model.field() * model.field();
  const double psi0 = mu.phi_deficit(0.0);
  double inner = 0.0;
  if (top > 0.0) {
    std::vector<double> pts = mu.breakpoints();
    pts.push_back(q);
    const auto breaks = quad::clean_breaks(std::move(pts), 0.0, top);
    quad::AdaptiveOptions aopt;
    aopt.tol = opt.quad_tol;
    inner = quad::integrate(
        [&](double s) {
          const double psi = mu.phi_deficit(s);
          const double phi = (1.0 - s) - psi;
          return (model.xi(s, 2) - 1.0 / (phi * phi)) * (psi - std::max(q - s, 0.0));
        },
        breaks, aopt);
  }
  return 0.5 * (inner + h2 * (psi0 - q));
}

double varineq_residual(const MixedModel& model, const Measure& mu, int probe_grid, const PrimalOptions& opt) {
  if (probe_grid < 1) throw ModelError("probe_grid must be positive");
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < probe_grid; ++i)
    lowest = std::min(lowest, mass_gradient(model, mu, static_cast<double>(i) / probe_grid, opt));
  quad::AdaptiveOptions aopt;
  aopt.tol = opt.quad_tol;
  const double mean = mu.expect([&](double q) { return mass_gradient(model, mu, q, opt); }, aopt);
  return lowest - mean;
}

}  // namespace csdual
