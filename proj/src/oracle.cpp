#include <algorithm>
#include <cmath>
#include <limits>

#include "csdual/error.hpp"
#include "csdual/quadrature.hpp"
#include "csdual/solver.hpp"
#include "mass_problem.hpp"

namespace csdual {

namespace {

// P on probability weights over x_i = i/N. Inside cell j = [x_j, x_{j+1}]
// psi(s) = T1_j - s T0_j with T0_j = sum_{i>j} w_i, T1_j = sum_{i>j} w_i x_i,
// so every integral is a sum of fixed Gauss-Legendre panels per cell.
class GridProblem {
 public:
  GridProblem(const MixedModel& model, int N) : N_(N), h2_(model.field() * model.field()) {
    const auto& rule = quad::gauss_legendre();
    const int cells = N_ - 1;
    s_.resize(static_cast<std::size_t>(cells) * quad::kPoints);
    w_.resize(s_.size());
    xi2_.resize(s_.size());
    for (int j = 0; j < cells; ++j) {
      const double a = x(j), b = x(j + 1);
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (int m = 0; m < quad::kPoints; ++m) {
        const std::size_t k = idx(j, m);
        s_[k] = mid + half * rule.x[m];
        w_[k] = half * rule.w[m];
        xi2_[k] = model.xi(s_[k], 2);
      }
    }
    T0_.assign(N_, 0.0);
    T1_.assign(N_, 0.0);
    G_.assign(N_, 0.0);
  }

  double x(int i) const { return static_cast<double>(i) / N_; }

  void set_weights(const std::vector<double>& wt) {
    double t0 = 0.0, t1 = 0.0;
    for (int j = N_ - 1; j >= 0; --j) {
      T0_[j] = t0;
      T1_[j] = t1;
      t0 += wt[j];
      t1 += wt[j] * x(j);
    }
    psi0_ = t1;
  }

  // Normalized directional derivatives G(x_k) for every node.
  const std::vector<double>& gradient() {
    double c_psi = 0.0;
    double c0 = 0.0, c1 = 0.0;
    for (int k = 0; k < N_; ++k) {
      if (k > 0) {
        const int j = k - 1;
        for (int m = 0; m < quad::kPoints; ++m) {
          const std::size_t n = idx(j, m);
          const double s = s_[n];
          const double psi = T1_[j] - s * T0_[j];
          const double phi = 1.0 - s - psi;
          const double A = xi2_[n] - 1.0 / (phi * phi);
          c0 += w_[n] * A;
          c1 += w_[n] * A * s;
          c_psi += w_[n] * A * psi;
        }
      }
      G_[k] = c1 - x(k) * c0;  // c_psi added below once complete
    }
    for (int k = 0; k < N_; ++k) G_[k] = 0.5 * (c_psi + G_[k] + h2_ * (psi0_ - x(k)));
    return G_;
  }

  // dP/dgamma and d2P/dgamma2 along w + gamma (e_t - e_a).
  std::pair<double, double> line_derivatives(int t, int a, double gamma) const {
    const int top = std::max(t, a);
    const double xt = x(t), xa = x(a);
    double d1 = 0.0, d2 = 0.0;
    for (int j = 0; j < top; ++j) {
      for (int m = 0; m < quad::kPoints; ++m) {
        const std::size_t n = idx(j, m);
        const double s = s_[n];
        const double dpsi = std::max(xt - s, 0.0) - std::max(xa - s, 0.0);
        const double phi = 1.0 - s - (T1_[j] - s * T0_[j]) - gamma * dpsi;
        const double inv = 1.0 / phi;
        d1 += w_[n] * (inv * inv - xi2_[n]) * dpsi;
        d2 += w_[n] * dpsi * dpsi * inv * inv * inv;
      }
    }
    return {0.5 * (d1 - h2_ * (xt - xa)), d2};
  }

 private:
  std::size_t idx(int j, int m) const { return static_cast<std::size_t>(j) * quad::kPoints + m; }

  int N_;
  double h2_;
  double psi0_ = 0.0;
  std::vector<double> s_, w_, xi2_;
  std::vector<double> T0_, T1_, G_;
};

// Re-optimizes the masses on the current support (projected Newton on the
// simplex slice), keeping the conditional-gradient iterate feasible.
void corrective_step(const MixedModel& model, const GridProblem& prob, std::vector<double>& w) {
  std::vector<int> active;
  std::vector<double> x, m;
  for (int i = 0; i < static_cast<int>(w.size()); ++i)
    if (w[i] > 0.0) {
      active.push_back(i);
      x.push_back(prob.x(i));
      m.push_back(w[i]);
    }
  if (active.size() < 2) return;
  const detail::MassProblem mp(model, x, {});
  const auto r = mp.minimize(m, 8);
  if (!(r.P < mp.value(m))) return;
  for (std::size_t k = 0; k < active.size(); ++k) w[active[k]] = r.masses[k];
}

}  // namespace

OracleResult grid_oracle(const MixedModel& model, int N, const OracleOptions& opt) {
  if (N < 2) throw ModelError("grid_oracle: N must be at least 2");
  GridProblem prob(model, N);
  std::vector<double> w(N, 0.0);
  w[0] = 1.0;
  OracleResult res;

  int since_corrective = 0;
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (++since_corrective >= opt.corrective_every) {
      since_corrective = 0;
      corrective_step(model, prob, w);
    }
    prob.set_weights(w);
    const std::vector<double>& G = prob.gradient();
    int t = 0, a = -1;
    for (int i = 1; i < N; ++i)
      if (G[i] < G[t]) t = i;
    for (int i = 0; i < N; ++i)
      if (w[i] > 0.0 && (a < 0 || G[i] > G[a])) a = i;
    res.fw_gap = G[a] - G[t];
    if (res.fw_gap <= opt.fw_tol || a == t) break;

    // Newton on the line, gamma in [0, w_a].
    const double gmax = w[a];
    double gamma = 0.0;
    for (int it = 0; it < 3; ++it) {
      const auto [d1, d2] = prob.line_derivatives(t, a, gamma);
      if (!(d2 > 0.0)) break;
      const double next = std::clamp(gamma - d1 / d2, 0.0, gmax);
      if (next == gamma) break;
      gamma = next;
    }
    if (gamma <= 0.0) gamma = std::min(gmax, 1e-3 * gmax + 1e-16);
    w[t] += gamma;
    w[a] -= gamma;
    if (w[a] < 1e-300 || gamma == gmax) {
      w[t] += w[a];
      w[a] = 0.0;
    }
  }

  res.weights = GridMeasure(w);
  res.P_upper = primal_value(model, res.weights, {opt.quad_tol, 1e-8});
  const DualFunction eta(model, res.weights);
  res.D_lower = dual_value(eta, opt.quad_tol);

  for (int i = 0; i < N; ++i) {
    if (w[i] <= opt.cluster_weight_tol) continue;
    const double xi = res.weights.node(i);
    if (!res.clusters.empty() && xi - res.clusters.back().hi <= 2.0 / N + 1e-15) {
      OracleCluster& c = res.clusters.back();
      c.center = (c.center * c.mass + xi * w[i]) / (c.mass + w[i]);
      c.mass += w[i];
      c.hi = xi;
    } else {
      res.clusters.push_back({xi, xi, xi, w[i]});
    }
  }
  return res;
}

}  // namespace csdual
