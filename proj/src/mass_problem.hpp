#pragma once

#include <span>
#include <vector>

#include "csdual/measure.hpp"
#include "csdual/model.hpp"

namespace csdual::detail {

/// P restricted to measures with atoms at fixed locations and fixed density
/// segments, as a function of the atom masses. P is convex in the masses;
/// gradient and Hessian along the simplex slice are exact for the fixed
/// composite Gauss-Legendre rule used here.
class MassProblem {
 public:
  MassProblem(const MixedModel& model, std::vector<double> locations, std::vector<Segment> segments);

  std::size_t size() const { return x_.size(); }
  const std::vector<double>& locations() const { return x_; }
  const std::vector<Segment>& segments() const { return segs_; }
  /// 1 - segment mass: the total the atom masses must carry.
  double free_mass() const { return free_; }

  double value(std::span<const double> m) const;
  /// Value, directional derivatives G_k toward delta_{x_k}, and the Hessian
  /// H_kl = int (x_k - s)_+ (x_l - s)_+ / phi^3 (row-major).
  double derivatives(std::span<const double> m, std::vector<double>& G, std::vector<double>& H) const;

  struct Result {
    std::vector<double> masses;
    double P = 0.0;
    double kkt = 0.0;  // max G over the support minus min G
    int iterations = 0;
  };

  /// Projected Newton from `start` (projected onto the slice first).
  Result minimize(std::span<const double> start, int max_iterations = 60) const;

 private:
  const MixedModel* model_;
  std::vector<double> x_;
  std::vector<Segment> segs_;
  double free_ = 1.0;
  double h2_ = 0.0;
  double xi1_ = 0.0;
  double psi0_seg_ = 0.0;
  // Per node: abscissa, weight, xi'', segment deficit.
  std::vector<double> s_, w_, xi2_, psi_seg_;
  // kink_[i * n + k] = (x_k - s_i)_+
  std::vector<double> kink_;
};

}  // namespace csdual::detail
