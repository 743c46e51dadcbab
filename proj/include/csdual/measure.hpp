#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csdual/model.hpp"
#include "csdual/quadrature.hpp"

namespace csdual {

struct Atom {
  double q = 0.0;
  double m = 0.0;
};

/// Closed interval [r1, r2] carrying the density -frak_d of the linked model.
struct Segment {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Evaluation contract shared by the closed-form candidate measures and the
/// grid measures of the brute-force oracle.
///
/// phi is evaluated through its deficit psi(t) = (1 - t) - phi(t), which is
/// assembled from upper-tail masses: psi(t) = int_t^1 mu((u, 1]) du. This keeps
/// phi = 1 - t exact above the support and avoids cancellation in the
/// functionals, whose integrands all carry psi as a factor.
class Measure {
 public:
  virtual ~Measure() = default;

  /// mu([0, s]).
  virtual double cdf(double s) const = 0;
  virtual double phi_deficit(double t) const = 0;
  double phi(double t) const { return (1.0 - t) - phi_deficit(t); }

  /// Largest point of the support (atoms with positive mass, segments of
  /// positive length).
  virtual double support_sup() const = 0;
  virtual double total_mass() const = 0;

  /// Points where phi is not smooth, ascending.
  virtual std::vector<double> breakpoints() const = 0;

  virtual std::vector<Atom> point_masses() const = 0;
  virtual std::vector<Segment> density_segments() const { return {}; }
  /// Model whose -frak_d is the segment density; null when there are no segments.
  virtual const MixedModel* density_model() const { return nullptr; }

  /// Integral of f against the measure.
  virtual double expect(const std::function<double(double)>& f, const quad::AdaptiveOptions& opt = {}) const = 0;

  virtual std::unique_ptr<Measure> clone() const = 0;
};

/// Candidate optimizer: finitely many atoms plus segments with density
/// -frak_d. Segment densities are never sampled; every evaluation goes
/// through g = (xi'')^{-1/2} and g' in closed form.
class ParisiMeasure final : public Measure {
 public:
  ParisiMeasure(std::vector<Atom> atoms, std::vector<Segment> segments = {},
                std::optional<MixedModel> model = std::nullopt);

  static ParisiMeasure dirac(double q);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::optional<MixedModel>& model() const { return model_; }
  /// Closed-form segment mass g'(r1) - g'(r2).
  double segment_mass(std::size_t j) const { return cache_[j].mass; }
  double atom_mass() const;

  double cdf(double s) const override;
  double phi_deficit(double t) const override;
  double support_sup() const override;
  double total_mass() const override;
  std::vector<double> breakpoints() const override;
  std::vector<Atom> point_masses() const override;
  std::vector<Segment> density_segments() const override { return segments_; }
  const MixedModel* density_model() const override { return model_ ? &*model_ : nullptr; }
  double expect(const std::function<double(double)>& f, const quad::AdaptiveOptions& opt = {}) const override;
  std::unique_ptr<Measure> clone() const override { return std::make_unique<ParisiMeasure>(*this); }

 private:
  struct SegmentCache {
    double g1 = 0.0, gp1 = 0.0, g2 = 0.0, gp2 = 0.0, mass = 0.0;
  };

  std::vector<Atom> atoms_;
  std::vector<Segment> segments_;
  std::optional<MixedModel> model_;
  std::vector<SegmentCache> cache_;
};

/// Probability weights on the grid {i/N : i = 0..N-1}. The point 1 is never
/// a grid point, so every grid measure lies in Q.
class GridMeasure final : public Measure {
 public:
  explicit GridMeasure(std::vector<double> weights);

  int size() const { return static_cast<int>(w_.size()); }
  double node(int i) const { return static_cast<double>(i) / static_cast<double>(w_.size()); }
  const std::vector<double>& weights() const { return w_; }

  double cdf(double s) const override;
  double phi_deficit(double t) const override;
  double support_sup() const override;
  double total_mass() const override { return total_; }
  std::vector<double> breakpoints() const override;
  std::vector<Atom> point_masses() const override;
  double expect(const std::function<double(double)>& f, const quad::AdaptiveOptions& opt = {}) const override;
  std::unique_ptr<Measure> clone() const override { return std::make_unique<GridMeasure>(*this); }

 private:
  int cell_of(double t) const;

  std::vector<double> w_;
  std::vector<double> tail0_;  // sum_{i > k} w_i
  std::vector<double> tail1_;  // sum_{i > k} w_i x_i
  std::vector<double> head_;   // sum_{i <= k} w_i
  double total_ = 0.0;
};

/// Moves all mass at or above 1 - eps to the point 1 - eps.
ParisiMeasure truncate(const Measure& mu, double eps);

struct MeasureDiagnostics {
  double mass_residual = 0.0;  // total mass - 1
  std::vector<std::string> negative_masses;
  std::vector<std::string> segment_sign_violations;
  std::vector<std::string> ordering_violations;
  bool support_violation = false;  // support_sup >= 1

  bool ok(double mass_tol) const;
};

MeasureDiagnostics validate(const ParisiMeasure& mu, const SignPattern& pattern, double mass_tol = 1e-10);

/// Throws InvalidMeasureError unless mu is a probability measure in Q.
void require_probability(const Measure& mu, double mass_tol = 1e-10);

}  // namespace csdual
