#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csdual/ansatz.hpp"
#include "csdual/dual.hpp"
#include "csdual/measure.hpp"
#include "csdual/model.hpp"

namespace csdual {

struct SolveOptions {
  double gap_tol = 1e-8;
  double quad_tol = 1e-11;
  double coin_tol = 1e-7;
  double root_tol = 1e-12;
  double fp_tol = 1e-12;
  double mass_tol = 1e-10;
  double prune_tol = 1e-9;
  double merge_tol = 1e-7;
  /// A start keeps refining until its gap drops below refine_tol (or the
  /// simplex search converges). The gap is quadratic in location errors, so
  /// stopping at gap_tol would leave segment endpoints accurate only to about
  /// sqrt(gap_tol).
  double refine_tol = 1e-13;
  int n_starts = 8;
  std::uint64_t seed = 0;
  /// Budget of outer (simplex-search) iterations summed over all starts.
  /// 0 disables optimization: only the delta_0 seed is evaluated.
  int max_iterations = 4000;
};

enum class SolveStatus { Certified, Uncertified };

struct PhaseLabel {
  enum class Kind { RS, kRSB, fRSB };
  Kind kind = Kind::RS;
  int k = 0;  // kRSB only
  int atoms = 0;
  int segments = 0;

  std::string str() const;
};

struct FixedPointRoot {
  double q = 0.0;
  double residual = 0.0;  // q - (xi'(q) + h^2)(1 - q)^2
  double replicon = 0.0;  // 1 - xi''(q)(1 - q)^2
  bool obstacle_pass = false;
  double gap = 0.0;  // duality gap of delta_q
};

struct RSDiagnostics {
  std::vector<FixedPointRoot> roots;
  bool xi2_at_one_le_one = false;  // xi''(1) <= 1
  bool field_dominates = false;    // h^2 >= xi''(1)
};

/// Roots of q = (xi'(q) + h^2)(1 - q)^2 on [0,1) (sign scan over 1024 cells,
/// then bisection), replicon values, the two sufficient conditions, and the
/// full obstacle check eta_{delta_q} >= xi at each root (duality gap of
/// delta_q within gap_tol).
RSDiagnostics rs_quick_tests(const MixedModel& model, const SolveOptions& opt = {});

struct Telemetry {
  int iterations = 0;
  int restarts = 0;
  int inner_solves = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::Uncertified;
  ParisiMeasure measure = ParisiMeasure::dirac(0.0);
  double free_energy = 0.0;
  DualCertificate certificate;
  PhaseLabel phase;
  RSDiagnostics rs;
  SignPattern pattern;
  SolveOptions options;
  Telemetry telemetry;
};

SolveReport solve(const MixedModel& model, const SolveOptions& opt = {});

/// Census of a measure after pruning atoms of mass <= prune_tol.
PhaseLabel classify(const ParisiMeasure& mu, double prune_tol = 1e-9);

/// Removes atoms of mass <= prune_tol (their mass goes to the nearest
/// remaining atom), merges atoms closer than merge_tol, snaps atoms onto
/// nearby segment endpoints, and turns negligible segments into atoms.
/// Total mass is preserved.
ParisiMeasure prune_and_merge(const ParisiMeasure& mu, double prune_tol, double merge_tol);

struct OracleCluster {
  double lo = 0.0;
  double hi = 0.0;
  double center = 0.0;  // mass-weighted
  double mass = 0.0;
};

struct OracleResult {
  double P_upper = 0.0;
  double D_lower = 0.0;
  GridMeasure weights{std::vector<double>{1.0}};
  std::vector<OracleCluster> clusters;
  int iterations = 0;
  double fw_gap = 0.0;
};

struct OracleOptions {
  double fw_tol = 1e-10;
  int max_iterations = 200000;
  double cluster_weight_tol = 1e-6;
  double quad_tol = 1e-11;
  /// Period (in conditional-gradient iterations) of the fully corrective
  /// re-optimization of masses on the current support.
  int corrective_every = 50;
};

/// Conditional-gradient minimization of P over probability weights on
/// {i/N : i = 0..N-1}, returning the bracket [D(eta_mu^), P(mu^)] and the
/// support clusters (merge radius 2/N, weights below cluster_weight_tol
/// ignored).
OracleResult grid_oracle(const MixedModel& model, int N, const OracleOptions& opt = {});

struct SweepRow {
  double beta = 0.0;
  double h = 0.0;
  double F = 0.0;
  double gap = 0.0;
  std::string phase;
  int n_atoms = 0;
  int n_segments = 0;
  std::string status;  // certified | uncertified | error
  std::string error;
};

/// Solves every (beta, h) cell with c_p = beta^2 * template c_p. Rows come
/// back in grid order (beta-major) regardless of the number of workers.
std::vector<SweepRow> sweep(const MixedModel& model_template, const std::vector<double>& beta_grid,
                            const std::vector<double>& h_grid, const SolveOptions& opt, int jobs);

}  // namespace csdual
