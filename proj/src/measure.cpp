#include "csdual/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csdual/error.hpp"

namespace csdual {

ParisiMeasure::ParisiMeasure(std::vector<Atom> atoms, std::vector<Segment> segments, std::optional<MixedModel> model)
    : atoms_(std::move(atoms)), segments_(std::move(segments)), model_(std::move(model)) {
  for (const Atom& a : atoms_)
    if (!std::isfinite(a.q) || !std::isfinite(a.m) || a.q < 0.0 || a.q > 1.0)
      throw InvalidMeasureError("atom location must lie in [0,1] and mass must be finite");
  for (const Segment& s : segments_)
    if (!std::isfinite(s.r1) || !std::isfinite(s.r2) || s.r1 < 0.0 || s.r2 > 1.0 || s.r1 > s.r2)
      throw InvalidMeasureError("segment endpoints must satisfy 0 <= r1 <= r2 <= 1");
  if (!segments_.empty() && !model_) throw InvalidMeasureError("segments need the model defining their density");

  std::stable_sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.q < b.q; });
  std::stable_sort(segments_.begin(), segments_.end(), [](const Segment& a, const Segment& b) { return a.r1 < b.r1; });

  cache_.reserve(segments_.size());
  for (const Segment& s : segments_) {
    if (!(model_->xi(s.r1, 2) > 0.0))
      throw SingularPointError("segment touches a point where xi'' = 0");
    SegmentCache c;
    c.g1 = model_->g(s.r1);
    c.gp1 = model_->g_prime(s.r1);
    c.g2 = model_->g(s.r2);
    c.gp2 = model_->g_prime(s.r2);
    c.mass = s.r2 > s.r1 ? c.gp1 - c.gp2 : 0.0;
    cache_.push_back(c);
  }
}

ParisiMeasure ParisiMeasure::dirac(double q) { return ParisiMeasure({{q, 1.0}}); }

double ParisiMeasure::atom_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms_) m += a.m;
  return m;
}

double ParisiMeasure::cdf(double s) const {
  double acc = 0.0;
  for (const Atom& a : atoms_)
    if (a.q <= s) acc += a.m;
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const Segment& seg = segments_[j];
    if (s < seg.r1 || !(seg.r2 > seg.r1)) continue;
    acc += s >= seg.r2 ? cache_[j].mass : cache_[j].gp1 - model_->g_prime(s);
  }
  return acc;
}

double ParisiMeasure::phi_deficit(double t) const {
  double acc = 0.0;
  for (const Atom& a : atoms_)
    if (a.q > t) acc += a.m * (a.q - t);
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const Segment& seg = segments_[j];
    if (t >= seg.r2 || !(seg.r2 > seg.r1)) continue;
    const SegmentCache& c = cache_[j];
    // int_t^1 (mass of the segment above u) du
    if (t < seg.r1) acc += c.mass * (seg.r1 - t);
    const double tp = std::max(t, seg.r1);
    const double g_tp = tp == seg.r1 ? c.g1 : model_->g(tp);
    acc += (c.g2 - g_tp) - c.gp2 * (seg.r2 - tp);
  }
  return acc;
}

double ParisiMeasure::support_sup() const {
  double top = 0.0;
  for (const Atom& a : atoms_)
    if (a.m > 0.0) top = std::max(top, a.q);
  for (std::size_t j = 0; j < segments_.size(); ++j)
    if (segments_[j].r2 > segments_[j].r1 && cache_[j].mass > 0.0) top = std::max(top, segments_[j].r2);
  return top;
}

double ParisiMeasure::total_mass() const {
  double m = atom_mass();
  for (const SegmentCache& c : cache_) m += c.mass;
  return m;
}

std::vector<double> ParisiMeasure::breakpoints() const {
  std::vector<double> pts;
  for (const Atom& a : atoms_)
    if (a.m > 0.0) pts.push_back(a.q);
  for (const Segment& s : segments_) {
    if (!(s.r2 > s.r1)) continue;
    pts.push_back(s.r1);
    pts.push_back(s.r2);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<Atom> ParisiMeasure::point_masses() const {
  std::vector<Atom> out;
  for (const Atom& a : atoms_)
    if (a.m > 0.0) out.push_back(a);
  return out;
}

double ParisiMeasure::expect(const std::function<double(double)>& f, const quad::AdaptiveOptions& opt) const {
  double acc = 0.0;
  for (const Atom& a : atoms_)
    if (a.m != 0.0) acc += a.m * f(a.q);
  for (const Segment& s : segments_) {
    if (!(s.r2 > s.r1)) continue;
    const double br[2] = {s.r1, s.r2};
    acc += quad::integrate([&](double u) { return -frak_d(*model_, u) * f(u); }, br, opt);
  }
  return acc;
}

GridMeasure::GridMeasure(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw InvalidMeasureError("grid measure needs at least one point");
  const int n = size();
  tail0_.assign(w_.size(), 0.0);
  tail1_.assign(w_.size(), 0.0);
  head_.assign(w_.size(), 0.0);
  double t0 = 0.0, t1 = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    tail0_[k] = t0;
    tail1_[k] = t1;
    if (!std::isfinite(w_[k])) throw InvalidMeasureError("grid weights must be finite");
    t0 += w_[k];
    t1 += w_[k] * node(k);
  }
  double h = 0.0;
  for (int k = 0; k < n; ++k) {
    h += w_[k];
    head_[k] = h;
  }
  total_ = h;
}

int GridMeasure::cell_of(double t) const {
  const int n = size();
  int k = static_cast<int>(std::floor(t * n));
  k = std::clamp(k, 0, n - 1);
  while (k + 1 < n && node(k + 1) <= t) ++k;
  while (k > 0 && node(k) > t) --k;
  return k;
}

double GridMeasure::cdf(double s) const {
  if (s < 0.0) return 0.0;
  return head_[cell_of(s)];
}

double GridMeasure::phi_deficit(double t) const {
  if (t <= 0.0) return tail1_[0] + w_[0] * node(0) - t * (tail0_[0] + w_[0]);
  const int k = cell_of(t);
  return tail1_[k] - t * tail0_[k];
}

double GridMeasure::support_sup() const {
  for (int k = size() - 1; k >= 0; --k)
    if (w_[k] > 0.0) return node(k);
  return 0.0;
}

std::vector<double> GridMeasure::breakpoints() const {
  std::vector<double> pts;
  for (int k = 0; k < size(); ++k)
    if (w_[k] > 0.0) pts.push_back(node(k));
  return pts;
}

std::vector<Atom> GridMeasure::point_masses() const {
  std::vector<Atom> out;
  for (int k = 0; k < size(); ++k)
    if (w_[k] > 0.0) out.push_back({node(k), w_[k]});
  return out;
}

double GridMeasure::expect(const std::function<double(double)>& f, const quad::AdaptiveOptions&) const {
  double acc = 0.0;
  for (int k = 0; k < size(); ++k)
    if (w_[k] != 0.0) acc += w_[k] * f(node(k));
  return acc;
}

ParisiMeasure truncate(const Measure& mu, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw InvalidMeasureError("truncation needs eps in (0,1)");
  const double cut = 1.0 - eps;
  std::vector<Atom> atoms;
  std::vector<Segment> segments;
  double moved = 0.0;
  for (const Atom& a : mu.point_masses()) {
    if (a.q < cut) {
      atoms.push_back(a);
    } else {
      moved += a.m;
    }
  }
  const MixedModel* model = mu.density_model();
  for (const Segment& s : mu.density_segments()) {
    if (!(s.r2 > s.r1)) continue;
    if (s.r2 <= cut) {
      segments.push_back(s);
    } else if (s.r1 >= cut) {
      moved += model->g_prime(s.r1) - model->g_prime(s.r2);
    } else {
      segments.push_back({s.r1, cut});
      moved += model->g_prime(cut) - model->g_prime(s.r2);
    }
  }
  if (moved > 0.0) atoms.push_back({cut, moved});
  std::optional<MixedModel> link;
  if (!segments.empty()) link = *model;
  return ParisiMeasure(std::move(atoms), std::move(segments), std::move(link));
}

bool MeasureDiagnostics::ok(double mass_tol) const {
  return std::abs(mass_residual) <= mass_tol && negative_masses.empty() && segment_sign_violations.empty() &&
         ordering_violations.empty() && !support_violation;
}

namespace {
std::string fmt_interval(double a, double b) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << a << ", " << b << "]";
  return os.str();
}
}  // namespace

MeasureDiagnostics validate(const ParisiMeasure& mu, const SignPattern& pattern, double mass_tol) {
  MeasureDiagnostics d;
  d.mass_residual = mu.total_mass() - 1.0;
  for (const Atom& a : mu.atoms())
    if (a.m < 0.0) d.negative_masses.push_back("atom at " + std::to_string(a.q) + " has mass " + std::to_string(a.m));
  const auto& segs = mu.segments();
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const Segment& s = segs[j];
    if (mu.segment_mass(j) < -mass_tol)
      d.negative_masses.push_back("segment " + fmt_interval(s.r1, s.r2) + " has negative mass");
    bool inside = pattern.kind == PatternKind::IdenticallyZero;
    for (const Interval& c : pattern.nonpositive_components) inside = inside || (c.lo <= s.r1 && s.r2 <= c.hi);
    if (!inside) d.segment_sign_violations.push_back("segment " + fmt_interval(s.r1, s.r2) + " leaves {frak_d <= 0}");
    if (j + 1 < segs.size() && segs[j + 1].r1 < s.r2)
      d.ordering_violations.push_back("segments " + fmt_interval(s.r1, s.r2) + " and " +
                                      fmt_interval(segs[j + 1].r1, segs[j + 1].r2) + " overlap");
    for (const Atom& a : mu.atoms())
      if (a.m != 0.0 && a.q > s.r1 && a.q < s.r2)
        d.ordering_violations.push_back("atom at " + std::to_string(a.q) + " inside segment " +
                                        fmt_interval(s.r1, s.r2));
  }
  d.support_violation = mu.support_sup() >= 1.0;
  return d;
}

void require_probability(const Measure& mu, double mass_tol) {
  for (const Atom& a : mu.point_masses())
    if (a.m < 0.0) throw InvalidMeasureError("negative atom mass");
  const double m = mu.total_mass();
  if (!(std::abs(m - 1.0) <= mass_tol))
    throw InvalidMeasureError("total mass " + std::to_string(m) + " differs from 1 beyond mass_tol");
  if (!(mu.support_sup() < 1.0)) throw InvalidMeasureError("support reaches 1: measure is outside Q");
}

}  // namespace csdual
