#include "csdual/dual.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "csdual/error.hpp"

namespace csdual {

namespace {

// int_a^b f over one Gauss-Legendre panel; a == b gives 0.
template <class F>
double panel_or_zero(F&& f, double a, double b) {
  return b > a ? quad::panel(f, a, b) : 0.0;
}

}  // namespace

DualFunction::DualFunction(const MixedModel& model, const Measure& mu, const DualOptions& opt)
    : model_(model), mu_(mu.clone()), opt_(opt) {
  require_probability(*mu_, opt_.mass_tol);
  qs_ = mu_->support_sup();
  const double h2 = model_.field() * model_.field();

  knots_.push_back({0.0, -h2, 0.0});
  if (qs_ > 0.0) {
    const auto breaks = quad::clean_breaks(mu_->breakpoints(), 0.0, qs_);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double b = breaks[i + 1];
      double a = breaks[i];
      while (a < b) {
        double w = std::min(opt_.panel_width, 0.25 * (1.0 - a));
        const double next = a + w >= b - 1e-15 ? b : a + w;
        const Knot& k = knots_.back();
        const double i1 = quad::panel([&](double s) { const double p = phi(s); return 1.0 / (p * p); }, a, next);
        const double i2 =
            quad::panel([&](double s) { const double p = phi(s); return (next - s) / (p * p); }, a, next);
        knots_.push_back({next, k.d1 + i1, k.d0 + k.d1 * (next - a) + i2});
        a = next;
      }
    }
  }
  locate_infimum();
}

std::size_t DualFunction::panel_of(double t) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t, [](double v, const Knot& k) { return v < k.x; });
  const std::size_t idx = static_cast<std::size_t>(it - knots_.begin());
  return idx == 0 ? 0 : idx - 1;
}

double DualFunction::eta_pp(double t) const {
  const double p = phi(t);
  return 1.0 / (p * p);
}

double DualFunction::eta_p(double t) const {
  if (t >= qs_) {
    const Knot& k = knots_.back();
    return k.d1 + (t - qs_) / ((1.0 - t) * (1.0 - qs_));
  }
  const Knot& k = knots_[panel_of(t)];
  return k.d1 + panel_or_zero([&](double s) { const double p = phi(s); return 1.0 / (p * p); }, k.x, t);
}

double DualFunction::eta0(double t) const {
  if (t >= qs_) {
    const Knot& k = knots_.back();
    const double u = (t - qs_) / (1.0 - qs_);
    return k.d0 + k.d1 * (t - qs_) + (-std::log1p(-u) - u);
  }
  const Knot& k = knots_[panel_of(t)];
  return k.d0 + k.d1 * (t - k.x) +
         panel_or_zero([&](double s) { const double p = phi(s); return (t - s) / (p * p); }, k.x, t);
}

void DualFunction::locate_infimum() {
  const double d1q = knots_.back().d1;
  const double K = model_.xi(1.0, 1) + 1.0 - d1q;
  limit_ = qs_;
  if (K > 0.0) {
    const double a = 1.0 - qs_;
    const double u = K * a / (1.0 + K * a);
    limit_ = std::max(qs_, qs_ + a * u);
  }
  limit_ = std::min(limit_, std::nextafter(1.0, 0.0));

  std::vector<double> xs;
  const double uniform_end = std::min(limit_, 1.0 - 1.0 / 64.0);
  const auto n_uniform = static_cast<std::int64_t>(std::floor(uniform_end / opt_.scan_step));
  for (std::int64_t i = 0; i <= n_uniform; ++i) xs.push_back(static_cast<double>(i) * opt_.scan_step);
  double x = xs.back();
  while (x < limit_) {
    x = std::min(limit_, std::max(x + opt_.scan_step * 1e-3, 1.0 - (1.0 - x) * 0.9));
    xs.push_back(x);
  }
  if (xs.back() < limit_) xs.push_back(limit_);
  for (double b : mu_->breakpoints())
    if (b <= limit_) xs.push_back(b);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto f = [&](double t) { return eta0(t) - model_.xi(t); };
  auto fp = [&](double t) { return eta_p(t) - model_.xi(t, 1); };

  std::vector<double> fv(xs.size()), dv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fv[i] = f(xs[i]);
    dv[i] = fp(xs[i]);
  }

  std::vector<double> cand{0.0};
  for (double b : mu_->breakpoints())
    if (b <= limit_) cand.push_back(b);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (dv[i] < 0.0 && dv[i + 1] >= 0.0) {
      if (dv[i + 1] == 0.0) {
        cand.push_back(xs[i + 1]);
        continue;
      }
      std::uintmax_t iters = 200;
      const double tol = opt_.x_tol;
      auto r = boost::math::tools::toms748_solve(
          fp, xs[i], xs[i + 1], dv[i], dv[i + 1],
          [tol](double lo, double hi) { return hi - lo <= tol; }, iters);
      cand.push_back(0.5 * (r.first + r.second));
    }
  }
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    if (fv[i] <= fv[i - 1] && fv[i] <= fv[i + 1]) {
      std::uintmax_t iters = 200;
      auto r = boost::math::tools::brent_find_minima(f, xs[i - 1], xs[i + 1], 40, iters);
      cand.push_back(r.first);
    }
  }
  if (fv.size() >= 2 && fv.back() <= fv[fv.size() - 2]) cand.push_back(xs.back());

  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  double best = std::numeric_limits<double>::infinity();
  for (double c : cand) {
    const double v = f(c);
    if (v < best) {
      best = v;
      t_min_ = c;
    }
  }
  shift_ = -best;
  minima_ = std::move(cand);
}

double dual_value(const DualFunction& eta, double quad_tol) {
  const Measure& mu = eta.measure();
  const MixedModel& model = eta.model();
  const double qs = eta.q_star();
  double inner = 0.0;
  if (qs > 0.0) {
    const auto breaks = quad::clean_breaks(mu.breakpoints(), 0.0, qs);
    quad::AdaptiveOptions aopt;
    aopt.tol = quad_tol;
    inner = quad::integrate(
        [&](double s) {
          const double psi = mu.phi_deficit(s);
          const double phi = (1.0 - s) - psi;
          const double r = psi / phi;
          return -r * r / (1.0 - s);
        },
        breaks, aopt);
  }
  const double h2 = model.field() * model.field();
  return 0.5 * (inner - eta.shift() + h2 + model.xi(1.0));
}

double gap_function(const MixedModel& model, const Measure& mu, double t) {
  if (!(t >= 0.0) || !(t < 1.0)) throw InvalidMeasureError("gap_function needs t in [0,1)");
  return DualFunction(model, mu).gap(t);
}

namespace {

// Boundary of {gap <= level} starting from a point inside it, moving toward
// `dir` (+1 or -1) and stopping at `edge`.
double expand(const DualFunction& eta, double from, int dir, double edge, double level, double step) {
  double inside = from;
  for (;;) {
    double next = inside + dir * step;
    if (dir > 0 ? next >= edge : next <= edge) next = edge;
    if (eta.gap(next) > level) {
      double out = next;
      for (int it = 0; it < 60 && std::abs(out - inside) > 1e-13; ++it) {
        const double mid = 0.5 * (inside + out);
        (eta.gap(mid) <= level ? inside : out) = mid;
      }
      return inside;
    }
    inside = next;
    if (inside == edge) return inside;
  }
}

double mass_in(const Measure& mu, double lo, double hi) {
  return mu.cdf(hi) - (lo > 0.0 ? mu.cdf(std::nextafter(lo, -1.0)) : 0.0);
}

}  // namespace

DualCertificate certify(const MixedModel& model, const Measure& mu, const CertifyOptions& opt) {
  DualCertificate cert;
  cert.tolerances = opt;
  PrimalOptions popt;
  popt.quad_tol = opt.quad_tol;
  popt.mass_tol = opt.mass_tol;
  cert.P = primal_value(model, mu, popt);

  DualOptions dopt;
  dopt.x_tol = opt.x_tol;
  dopt.mass_tol = opt.mass_tol;
  const DualFunction eta(model, mu, dopt);
  cert.D = dual_value(eta, opt.quad_tol);
  cert.gap = cert.P - cert.D;
  cert.shift = eta.shift();
  cert.t_min = eta.t_min();
  cert.q_star = eta.q_star();

  // Seeds for the coincidence set: local minima plus support points.
  std::vector<double> seeds = eta.local_minima();
  for (const Atom& a : mu.point_masses()) seeds.push_back(a.q);
  for (const Segment& s : mu.density_segments()) {
    seeds.push_back(s.r1);
    seeds.push_back(0.5 * (s.r1 + s.r2));
    seeds.push_back(s.r2);
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  const double edge = eta.search_limit();
  const double step = 1.0 / 1024.0;
  std::vector<CoincidenceComponent> comps;
  for (double s : seeds) {
    if (s > edge) continue;
    const double g = eta.gap(s);
    if (g > opt.coin_tol) continue;
    bool covered = false;
    for (CoincidenceComponent& c : comps) {
      if (s >= c.lo && s <= c.hi) {
        if (g < c.min_gap) {
          c.min_gap = g;
          c.argmin = s;
        }
        covered = true;
      }
    }
    if (covered) continue;
    CoincidenceComponent c;
    c.lo = expand(eta, s, -1, 0.0, opt.coin_tol, step);
    c.hi = expand(eta, s, +1, edge, opt.coin_tol, step);
    c.argmin = s;
    c.min_gap = g;
    comps.push_back(c);
  }
  std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.lo < b.lo; });
  for (const CoincidenceComponent& c : comps) {
    if (!cert.coincidence_set.empty() && c.lo <= cert.coincidence_set.back().hi + 2.0 * opt.x_tol) {
      CoincidenceComponent& last = cert.coincidence_set.back();
      last.hi = std::max(last.hi, c.hi);
      if (c.min_gap < last.min_gap) {
        last.min_gap = c.min_gap;
        last.argmin = c.argmin;
      }
    } else {
      cert.coincidence_set.push_back(c);
    }
  }

  const double flat_level = 1e-3 * opt.coin_tol;
  for (CoincidenceComponent& c : cert.coincidence_set) {
    c.curvature = eta.eta_pp(c.argmin) - model.xi(c.argmin, 2);
    c.interval = !(c.curvature >= 1e-3);
    c.mass = mass_in(mu, c.lo, c.hi);
    ConsistencyEntry e{c.argmin, std::abs(eta.gap_prime(c.argmin)), std::min(c.curvature, 0.0)};
    cert.consistency.push_back(e);
    if (c.interval) {
      for (int i = 1; i < 16; ++i) {
        const double t = c.lo + (c.hi - c.lo) * i / 16.0;
        if (eta.gap(t) > flat_level) continue;
        cert.consistency.push_back(
            {t, std::abs(eta.gap_prime(t)), std::min(eta.eta_pp(t) - model.xi(t, 2), 0.0)});
      }
    } else if (c.mass <= opt.mass_tol) {
      cert.shallow_points.push_back(c.argmin);
    }
  }

  for (const Atom& a : mu.point_masses())
    if (eta.gap(a.q) > opt.coin_tol) cert.complementarity_defect += a.m;
  if (const MixedModel* dm = mu.density_model()) {
    for (const Segment& s : mu.density_segments()) {
      const int pieces = 64;
      for (int i = 0; i < pieces; ++i) {
        const double a = s.r1 + (s.r2 - s.r1) * i / pieces;
        const double b = s.r1 + (s.r2 - s.r1) * (i + 1) / pieces;
        if (eta.gap(0.5 * (a + b)) > opt.coin_tol) cert.complementarity_defect += dm->g_prime(a) - dm->g_prime(b);
      }
      for (int i = 0; i <= 200; ++i) {
        const double t = s.r1 + (s.r2 - s.r1) * i / 200.0;
        cert.segment_identity_defect =
            std::max(cert.segment_identity_defect, std::abs(mu.phi(t) * std::sqrt(model.xi(t, 2)) - 1.0));
      }
    }
  }

  const double qs = eta.q_star();
  for (int k = 0; k < 64; ++k) {
    const double t = qs + (1.0 - qs) * (1.0 - std::exp2(-0.25 * k));
    const double one_minus = 1.0 - t;
    cert.tail_regularity_defect =
        std::max(cert.tail_regularity_defect, std::abs(eta.eta_pp(t) * one_minus * one_minus - 1.0));
  }
  return cert;
}

}  // namespace csdual
