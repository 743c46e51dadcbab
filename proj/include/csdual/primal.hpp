#pragma once

#include "csdual/measure.hpp"
#include "csdual/model.hpp"

namespace csdual {

struct PrimalOptions {
  double quad_tol = 1e-11;
  double mass_tol = 1e-10;
};

/// Crisanti-Sommers functional
///   P(mu) = 1/2 ( int xi'' phi + int (1/phi - 1/(1-s)) + h^2 phi(0) ).
/// Evaluated in deficit form so that both integrals run over [0, q*] only:
///   P = 1/2 ( xi(1) - int xi'' psi + int psi / (phi (1-s)) + h^2 (1 - psi(0)) ).
double primal_value(const MixedModel& model, const Measure& mu, const PrimalOptions& opt = {});

/// P(delta_q) in closed form.
double primal_dirac(const MixedModel& model, double q);

/// Directional derivative of P at mu toward delta_q:
///   G(q) = d/de P((1-e) mu + e delta_q) at e = 0
///        = 1/2 ( int (xi'' - 1/phi^2) (psi - (q-s)_+) ds + h^2 (psi(0) - q) ).
/// Differs from the raw first variation only by a q-independent constant, so
/// differences G(q1) - G(q2) are the quantities the simplex constraint sees.
/// Finite for every q in [0,1); int G dmu = 0 and G = (gap - int gap dmu)/2.
double mass_gradient(const MixedModel& model, const Measure& mu, double q, const PrimalOptions& opt = {});

/// min_i G(i / probe_grid) - int G dmu over i = 0..probe_grid-1.
double varineq_residual(const MixedModel& model, const Measure& mu, int probe_grid, const PrimalOptions& opt = {});

}  // namespace csdual
