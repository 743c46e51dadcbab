#pragma once

#include <memory>
#include <vector>

#include "csdual/measure.hpp"
#include "csdual/model.hpp"
#include "csdual/primal.hpp"

namespace csdual {

struct DualOptions {
  double x_tol = 1e-12;     // location tolerance of the inf(eta - xi) search
  double scan_step = 1.0 / 1024.0;
  double panel_width = 1.0 / 256.0;
  double mass_tol = 1e-10;
};

/// Dual variable eta_mu with eta'' = 1/phi_mu^2, eta'(0) = -h^2, shifted so
/// that inf_[0,1) (eta - xi) = 0.
///
/// eta' and eta are tabulated at panel knots on [0, q*] (Gauss-Legendre per
/// panel, knots at every breakpoint of phi) and continued in closed form on
/// [q*, 1) where phi = 1 - t.
class DualFunction {
 public:
  DualFunction(const MixedModel& model, const Measure& mu, const DualOptions& opt = {});

  const MixedModel& model() const { return model_; }
  const Measure& measure() const { return *mu_; }
  const DualOptions& options() const { return opt_; }

  double q_star() const { return qs_; }
  /// Shift c, equal to the shifted eta at 0.
  double shift() const { return shift_; }
  /// Location of inf(eta - xi).
  double t_min() const { return t_min_; }

  double eta_pp(double t) const;
  double eta_p(double t) const;
  /// Unshifted primitive eta_0 with eta_0(0) = 0.
  double eta0(double t) const;
  double eta(double t) const { return eta0(t) + shift_; }

  /// eta - xi >= 0 and its derivative.
  double gap(double t) const { return eta(t) - model_.xi(t); }
  double gap_prime(double t) const { return eta_p(t) - model_.xi(t, 1); }

  /// Local minimizers of eta - xi found by the search, including 0, sorted.
  const std::vector<double>& local_minima() const { return minima_; }
  /// Right end of the searched range; eta' > xi'(1) beyond it.
  double search_limit() const { return limit_; }

 private:
  struct Knot {
    double x = 0.0;
    double d1 = 0.0;  // eta'(x)
    double d0 = 0.0;  // eta_0(x)
  };

  double phi(double t) const { return mu_->phi(t); }
  std::size_t panel_of(double t) const;
  void locate_infimum();

  MixedModel model_;
  std::shared_ptr<const Measure> mu_;
  DualOptions opt_;
  double qs_ = 0.0;
  std::vector<Knot> knots_;
  double shift_ = 0.0;
  double t_min_ = 0.0;
  double limit_ = 0.0;
  std::vector<double> minima_;
};

/// D(eta) = 1/2 ( int [2 sqrt(eta'') - eta''(1-s) - 1/(1-s)] ds - eta(0) + h^2 + xi(1) ),
/// with the integrand in the form -(u-1)^2/(1-s), u = (1-s)/phi; it vanishes
/// on [q*, 1).
double dual_value(const DualFunction& eta, double quad_tol = 1e-11);

/// eta~_mu(t) - xi(t).
double gap_function(const MixedModel& model, const Measure& mu, double t);

struct CertifyOptions {
  double gap_tol = 1e-8;
  double coin_tol = 1e-7;
  double quad_tol = 1e-11;
  double x_tol = 1e-12;
  double mass_tol = 1e-10;
  double deriv_tol = 1e-6;
};

struct ConsistencyEntry {
  double t = 0.0;
  double derivative_defect = 0.0;  // |eta' - xi'|
  double curvature_defect = 0.0;   // min(eta'' - xi'', 0)
};

struct CoincidenceComponent {
  double lo = 0.0;
  double hi = 0.0;
  double argmin = 0.0;
  double min_gap = 0.0;
  double curvature = 0.0;  // eta'' - xi'' at argmin
  bool interval = false;   // flat contact, as opposed to an isolated point
  double mass = 0.0;       // mu-mass of [lo, hi]
};

struct DualCertificate {
  double P = 0.0;
  double D = 0.0;
  double gap = 0.0;
  double complementarity_defect = 0.0;
  std::vector<ConsistencyEntry> consistency;
  double tail_regularity_defect = 0.0;
  std::vector<CoincidenceComponent> coincidence_set;
  /// Isolated coincidence points that carry no mass.
  std::vector<double> shallow_points;
  /// max |phi sqrt(xi'') - 1| over segments and flat coincidence components;
  /// 0 when there are none.
  double segment_identity_defect = 0.0;
  double shift = 0.0;
  double t_min = 0.0;
  double q_star = 0.0;
  CertifyOptions tolerances;

  bool within_gap() const { return gap <= tolerances.gap_tol; }
};

DualCertificate certify(const MixedModel& model, const Measure& mu, const CertifyOptions& opt = {});

}  // namespace csdual
