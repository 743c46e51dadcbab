#include "csdual/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csdual/error.hpp"

namespace csdual {

std::size_t AnsatzFamily::segment_count() const {
  return static_cast<std::size_t>(
      std::count_if(slots.begin(), slots.end(), [](const Slot& s) { return s.kind == Slot::Kind::Segment; }));
}

AnsatzFamily family_from_pattern(const SignPattern& pattern, double location_cap) {
  AnsatzFamily fam;
  fam.pattern_kind = pattern.kind;
  fam.location_cap = location_cap;
  auto capped = [&](Interval i) {
    i.hi = std::min(i.hi, location_cap);
    i.lo = std::min(i.lo, i.hi);
    return i;
  };
  if (pattern.kind == PatternKind::IdenticallyZero) {
    fam.slots.push_back({Slot::Kind::AtomPair, capped({0.0, 1.0})});
    return fam;
  }
  for (const auto& c : pattern.components())
    fam.slots.push_back({c.positive ? Slot::Kind::AtomPair : Slot::Kind::Segment, capped(c.span)});
  return fam;
}

namespace {

void check_size(const AnsatzFamily& family, std::span<const double> params) {
  if (params.size() != family.dimension())
    throw InvalidMeasureError("parameter vector has size " + std::to_string(params.size()) + ", family needs " +
                              std::to_string(family.dimension()));
}

}  // namespace

double segment_mass(const AnsatzFamily& family, std::span<const double> params, const MixedModel& model) {
  check_size(family, params);
  double total = 0.0;
  for (std::size_t k = 0; k < family.slots.size(); ++k) {
    if (family.slots[k].kind != Slot::Kind::Segment) continue;
    const double r1 = params[4 * k], r2 = params[4 * k + 1];
    if (r2 > r1) total += model.g_prime(r1) - model.g_prime(r2);
  }
  return total;
}

Realization realize(const AnsatzFamily& family, std::span<const double> params, const MixedModel& model,
                    double mass_tol) {
  check_size(family, params);
  std::vector<Atom> atoms;
  std::vector<Segment> segments;
  double seg_total = 0.0;
  for (std::size_t k = 0; k < family.slots.size(); ++k) {
    const double* p = params.data() + 4 * k;
    if (family.slots[k].kind == Slot::Kind::Segment && p[1] > p[0]) {
      const double m = model.g_prime(p[0]) - model.g_prime(p[1]);
      if (m < -mass_tol) throw InvalidMeasureError("segment carries negative mass; it leaves {frak_d <= 0}");
      segments.push_back({p[0], p[1]});
      seg_total += m;
    }
    atoms.push_back({p[0], p[2]});
    atoms.push_back({p[1], p[3]});
  }
  if (seg_total > 1.0 + mass_tol) throw InvalidMeasureError("segments alone carry more than unit mass");
  std::optional<MixedModel> link;
  if (!segments.empty()) link = model;
  ParisiMeasure mu(std::move(atoms), std::move(segments), std::move(link));
  const double residual = mu.total_mass() - 1.0;
  return {std::move(mu), residual};
}

std::vector<double> project_simplex(std::span<const double> v, double total) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    const double t = (cumulative - total) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  std::vector<double> x(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = std::max(v[i] - theta, 0.0);
  return x;
}

std::vector<double> project_feasible(const AnsatzFamily& family, std::span<const double> params,
                                     const MixedModel& model) {
  check_size(family, params);
  std::vector<double> out(params.begin(), params.end());
  std::vector<double> masses;
  for (std::size_t k = 0; k < family.slots.size(); ++k) {
    double* p = out.data() + 4 * k;
    const Interval& box = family.slots[k].box;
    p[0] = std::clamp(p[0], box.lo, box.hi);
    p[1] = std::clamp(p[1], box.lo, box.hi);
    if (p[0] > p[1]) {
      std::swap(p[0], p[1]);
      std::swap(p[2], p[3]);
    }
    masses.push_back(p[2]);
    masses.push_back(p[3]);
  }
  const double seg = segment_mass(family, out, model);
  if (seg > 1.0) throw InfeasibleError("segment mass " + std::to_string(seg) + " exceeds 1");
  const std::vector<double> proj = project_simplex(masses, 1.0 - seg);
  for (std::size_t k = 0; k < family.slots.size(); ++k) {
    out[4 * k + 2] = proj[2 * k];
    out[4 * k + 3] = proj[2 * k + 1];
  }
  return out;
}

std::vector<double> pack(const AnsatzFamily& family, const ParisiMeasure& mu) {
  std::vector<double> out(family.dimension(), 0.0);
  std::vector<int> used(family.slots.size(), 0);
  for (std::size_t k = 0; k < family.slots.size(); ++k) {
    out[4 * k] = out[4 * k + 1] = family.slots[k].box.lo;
  }

  for (const Segment& s : mu.segments()) {
    if (!(s.r2 > s.r1)) continue;
    bool placed = false;
    for (std::size_t k = 0; k < family.slots.size() && !placed; ++k) {
      const Slot& slot = family.slots[k];
      if (slot.kind != Slot::Kind::Segment || used[k] != 0) continue;
      if (s.r1 < slot.box.lo || s.r2 > slot.box.hi) continue;
      out[4 * k] = s.r1;
      out[4 * k + 1] = s.r2;
      used[k] = 3;  // both location slots taken by the segment
      placed = true;
    }
    if (!placed) throw InvalidMeasureError("segment does not fit any nonpositive component");
  }

  for (const Atom& a : mu.atoms()) {
    if (a.m == 0.0) continue;
    bool placed = false;
    for (std::size_t k = 0; k < family.slots.size() && !placed; ++k) {
      const Slot& slot = family.slots[k];
      if (a.q < slot.box.lo || a.q > slot.box.hi) continue;
      double* p = out.data() + 4 * k;
      if (used[k] == 3) {
        // Segment endpoints.
        for (int j = 0; j < 2 && !placed; ++j) {
          if (a.q == p[j]) {
            p[2 + j] += a.m;
            placed = true;
          }
        }
        continue;
      }
      if (used[k] < 2) {
        if (used[k] == 1 && a.q == p[0]) {
          p[2] += a.m;
        } else {
          p[used[k]] = a.q;
          p[2 + used[k]] = a.m;
          ++used[k];
        }
        placed = true;
      }
    }
    if (!placed) throw InvalidMeasureError("atom at " + std::to_string(a.q) + " does not fit the family");
  }

  for (std::size_t k = 0; k < family.slots.size(); ++k) {
    double* p = out.data() + 4 * k;
    if (used[k] == 1) p[1] = p[0];
    if (family.slots[k].kind == Slot::Kind::Segment && used[k] == 2) {
      // Two atoms in a nonpositive component without a segment would need
      // the density between them.
      if (p[1] != p[0]) throw InvalidMeasureError("two separate atoms in a nonpositive component");
    }
    if (p[0] > p[1]) {
      std::swap(p[0], p[1]);
      std::swap(p[2], p[3]);
    }
  }
  return out;
}

}  // namespace csdual
