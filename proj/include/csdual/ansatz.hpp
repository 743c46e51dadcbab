#pragma once

#include <span>
#include <vector>

#include "csdual/measure.hpp"
#include "csdual/model.hpp"

namespace csdual {

/// One component of the sign pattern turned into four parameters.
///
/// AtomPair (component where frak_d > 0, or the frak_d == 0 case):
///   [q1, q2, m1, m2], two atoms in the closed box.
/// Segment (component where frak_d <= 0):
///   [r1, r2, n1, n2], density -frak_d on [r1, r2] plus atoms n1 at r1 and
///   n2 at r2.
struct Slot {
  enum class Kind { AtomPair, Segment };
  Kind kind = Kind::AtomPair;
  Interval box;
};

/// Parameter vectors are packed component-major in the order of the slots,
/// each slot contributing [location 1, location 2, mass 1, mass 2].
struct AnsatzFamily {
  PatternKind pattern_kind = PatternKind::Mixed;
  std::vector<Slot> slots;
  /// Upper bound on every location (keeps realized measures in Q).
  double location_cap = 1.0 - 1e-9;

  std::size_t dimension() const { return 4 * slots.size(); }
  std::size_t segment_count() const;
};

AnsatzFamily family_from_pattern(const SignPattern& pattern, double location_cap = 1.0 - 1e-9);

struct Realization {
  ParisiMeasure measure;
  double mass_residual = 0.0;  // total mass - 1
};

/// Builds the measure. Degenerate slots (coinciding atoms, zero masses,
/// r1 == r2) are allowed. Throws InvalidMeasureError when a segment has
/// negative mass beyond mass_tol or the segments alone carry more than
/// 1 + mass_tol.
Realization realize(const AnsatzFamily& family, std::span<const double> params, const MixedModel& model,
                    double mass_tol = 1e-10);

/// Total closed-form segment mass sum_j g'(r1_j) - g'(r2_j) of a parameter vector.
double segment_mass(const AnsatzFamily& family, std::span<const double> params, const MixedModel& model);

/// Clamps locations into their boxes, orders each pair, and replaces the
/// masses by their Euclidean projection onto {m >= 0, sum m = 1 - segment mass}.
/// Throws InfeasibleError when the segments alone carry more than unit mass.
std::vector<double> project_feasible(const AnsatzFamily& family, std::span<const double> params,
                                     const MixedModel& model);

/// Inverse of realize for measures already in the family. Atoms on a
/// boundary shared by two components go to the lower-index slot. Throws
/// InvalidMeasureError when the measure is not representable.
std::vector<double> pack(const AnsatzFamily& family, const ParisiMeasure& mu);

/// Euclidean projection of v onto {x >= 0, sum x = total}.
std::vector<double> project_simplex(std::span<const double> v, double total);

}  // namespace csdual
