#include "mass_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csdual/ansatz.hpp"
#include "csdual/quadrature.hpp"

namespace csdual::detail {

MassProblem::MassProblem(const MixedModel& model, std::vector<double> locations, std::vector<Segment> segments)
    : model_(&model), x_(std::move(locations)), segs_(std::move(segments)) {
  h2_ = model.field() * model.field();
  xi1_ = model.xi(1.0);

  std::vector<double> pts = x_;
  double top = 0.0;
  for (double x : x_) top = std::max(top, x);
  std::vector<Segment> live;
  for (const Segment& s : segs_) {
    if (!(s.r2 > s.r1)) continue;
    live.push_back(s);
    pts.push_back(s.r1);
    pts.push_back(s.r2);
    top = std::max(top, s.r2);
  }
  segs_ = live;
  double seg_mass = 0.0;
  std::optional<ParisiMeasure> seg_only;
  if (!segs_.empty()) {
    seg_only.emplace(std::vector<Atom>{}, segs_, model);
    seg_mass = seg_only->total_mass();
    psi0_seg_ = seg_only->phi_deficit(0.0);
  }
  free_ = 1.0 - seg_mass;

  if (top > 0.0) {
    const auto breaks = quad::clean_breaks(pts, 0.0, top);
    quad::NodeSet ns = quad::composite_nodes(breaks);
    s_ = std::move(ns.x);
    w_ = std::move(ns.w);
  }
  const std::size_t n = x_.size();
  xi2_.resize(s_.size());
  psi_seg_.assign(s_.size(), 0.0);
  kink_.resize(s_.size() * n);
  for (std::size_t i = 0; i < s_.size(); ++i) {
    xi2_[i] = model.xi(s_[i], 2);
    if (seg_only) psi_seg_[i] = seg_only->phi_deficit(s_[i]);
    for (std::size_t k = 0; k < n; ++k) kink_[i * n + k] = std::max(x_[k] - s_[i], 0.0);
  }
}

double MassProblem::value(std::span<const double> m) const {
  const std::size_t n = x_.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < s_.size(); ++i) {
    double psi = psi_seg_[i];
    const double* kr = &kink_[i * n];
    for (std::size_t k = 0; k < n; ++k) psi += m[k] * kr[k];
    const double om = 1.0 - s_[i];
    const double phi = om - psi;
    acc += w_[i] * psi * (1.0 / (phi * om) - xi2_[i]);
  }
  double psi0 = psi0_seg_;
  for (std::size_t k = 0; k < n; ++k) psi0 += m[k] * x_[k];
  return 0.5 * (xi1_ + acc + h2_ * (1.0 - psi0));
}

double MassProblem::derivatives(std::span<const double> m, std::vector<double>& G, std::vector<double>& H) const {
  const std::size_t n = x_.size();
  G.assign(n, 0.0);
  H.assign(n * n, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < s_.size(); ++i) {
    double psi = psi_seg_[i];
    const double* kr = &kink_[i * n];
    for (std::size_t k = 0; k < n; ++k) psi += m[k] * kr[k];
    const double om = 1.0 - s_[i];
    const double phi = om - psi;
    const double inv = 1.0 / phi;
    acc += w_[i] * psi * (inv / om - xi2_[i]);
    const double a = w_[i] * (xi2_[i] - inv * inv);
    const double c = w_[i] * inv * inv * inv;
    for (std::size_t k = 0; k < n; ++k) {
      G[k] += a * (psi - kr[k]);
      if (kr[k] == 0.0) continue;
      const double ck = c * kr[k];
      for (std::size_t l = k; l < n; ++l) H[k * n + l] += ck * kr[l];
    }
  }
  double psi0 = psi0_seg_;
  for (std::size_t k = 0; k < n; ++k) psi0 += m[k] * x_[k];
  for (std::size_t k = 0; k < n; ++k) {
    G[k] = 0.5 * (G[k] + h2_ * (psi0 - x_[k]));
    for (std::size_t l = 0; l < k; ++l) H[k * n + l] = H[l * n + k];
  }
  return 0.5 * (xi1_ + acc + h2_ * (1.0 - psi0));
}

namespace {

// min over the simplex {x >= 0, sum x = total} of g.(x - m) + 1/2 (x - m)' H (x - m)
// by accelerated projected gradient.
std::vector<double> solve_qp(const std::vector<double>& H, const std::vector<double>& g, std::span<const double> m,
                             double total) {
  const std::size_t n = g.size();
  double L = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double row = 0.0;
    for (std::size_t l = 0; l < n; ++l) row += std::abs(H[k * n + l]);
    L = std::max(L, row);
  }
  if (!(L > 0.0)) L = 1.0;
  std::vector<double> x(m.begin(), m.end()), y = x, prev = x, grad(n), step(n);
  double t = 1.0;
  for (int it = 0; it < 2000; ++it) {
    for (std::size_t k = 0; k < n; ++k) {
      double v = g[k];
      for (std::size_t l = 0; l < n; ++l) v += H[k * n + l] * (y[l] - m[l]);
      grad[k] = v;
      step[k] = y[k] - v / L;
    }
    prev = x;
    x = project_simplex(step, total);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    double moved = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      y[k] = x[k] + (t - 1.0) / t_next * (x[k] - prev[k]);
      moved = std::max(moved, std::abs(x[k] - prev[k]));
    }
    t = t_next;
    if (moved <= 1e-16) break;
  }
  return x;
}

double kkt_residual(const std::vector<double>& G, std::span<const double> m) {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < G.size(); ++k) {
    lo = std::min(lo, G[k]);
    if (m[k] > 0.0) hi = std::max(hi, G[k]);
  }
  return std::isfinite(hi) ? hi - lo : 0.0;
}

}  // namespace

MassProblem::Result MassProblem::minimize(std::span<const double> start, int max_iterations) const {
  Result r;
  const std::size_t n = x_.size();
  r.masses = project_simplex(start, std::max(free_, 0.0));
  std::vector<double> G, H;
  r.P = derivatives(r.masses, G, H);
  r.kkt = kkt_residual(G, r.masses);
  for (; r.iterations < max_iterations; ++r.iterations) {
    if (r.kkt <= 1e-14) break;
    const std::vector<double> target = solve_qp(H, G, r.masses, free_);
    std::vector<double> d(n);
    double slope = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = target[k] - r.masses[k];
      slope += G[k] * d[k];
    }
    if (!(slope < 0.0)) break;
    double step = 1.0;
    std::vector<double> trial(n);
    double P_trial = r.P;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
      for (std::size_t k = 0; k < n; ++k) trial[k] = std::max(r.masses[k] + step * d[k], 0.0);
      P_trial = value(trial);
      if (P_trial <= r.P + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    r.masses = trial;
    const double before = r.P;
    r.P = derivatives(r.masses, G, H);
    r.kkt = kkt_residual(G, r.masses);
    if (before - r.P <= 1e-16 * std::max(1.0, std::abs(r.P)) && step < 1.0) break;
  }
  return r;
}

}  // namespace csdual::detail
