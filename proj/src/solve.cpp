#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "csdual/error.hpp"
#include "csdual/solver.hpp"
#include "mass_problem.hpp"

namespace csdual {

std::string PhaseLabel::str() const {
  switch (kind) {
    case Kind::RS:
      return "RS";
    case Kind::kRSB:
      return std::to_string(k) + "RSB";
    case Kind::fRSB:
      return "fRSB";
  }
  return "?";
}

PhaseLabel classify(const ParisiMeasure& mu, double prune_tol) {
  PhaseLabel label;
  for (const Atom& a : mu.atoms())
    if (a.m > prune_tol) ++label.atoms;
  for (std::size_t j = 0; j < mu.segments().size(); ++j) {
    const Segment& s = mu.segments()[j];
    if (s.r2 > s.r1 && mu.segment_mass(j) > prune_tol) ++label.segments;
  }
  if (label.segments > 0) {
    label.kind = PhaseLabel::Kind::fRSB;
  } else if (label.atoms <= 1) {
    label.kind = PhaseLabel::Kind::RS;
  } else {
    label.kind = PhaseLabel::Kind::kRSB;
    label.k = label.atoms - 1;
  }
  return label;
}

ParisiMeasure prune_and_merge(const ParisiMeasure& mu, double prune_tol, double merge_tol) {
  std::vector<Segment> segs;
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < mu.segments().size(); ++j) {
    const Segment& s = mu.segments()[j];
    if (!(s.r2 > s.r1)) continue;
    const double m = mu.segment_mass(j);
    if (s.r2 - s.r1 <= merge_tol || m <= prune_tol) {
      atoms.push_back({s.r1, m});
    } else {
      segs.push_back(s);
    }
  }
  for (const Atom& a : mu.atoms())
    if (a.m != 0.0) atoms.push_back(a);

  // Snap atoms onto segment endpoints.
  for (Atom& a : atoms)
    for (const Segment& s : segs) {
      if (std::abs(a.q - s.r1) <= merge_tol) a.q = s.r1;
      if (std::abs(a.q - s.r2) <= merge_tol) a.q = s.r2;
    }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.q < b.q; });

  // Merge close atoms (mass-weighted location, endpoints of segments win).
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && a.q - merged.back().q <= merge_tol) {
      Atom& b = merged.back();
      bool b_pinned = false, a_pinned = false;
      for (const Segment& s : segs) {
        b_pinned = b_pinned || b.q == s.r1 || b.q == s.r2;
        a_pinned = a_pinned || a.q == s.r1 || a.q == s.r2;
      }
      const double m = a.m + b.m;
      if (a_pinned && !b_pinned) {
        b.q = a.q;
      } else if (!b_pinned && m > 0.0) {
        b.q = (a.q * a.m + b.q * b.m) / m;
      }
      b.m = m;
    } else {
      merged.push_back(a);
    }
  }

  // Prune light atoms, moving their mass to the nearest heavy atom.
  std::vector<Atom> heavy, light;
  for (const Atom& a : merged) (a.m > prune_tol ? heavy : light).push_back(a);
  if (heavy.empty() && !merged.empty() && segs.empty()) {
    auto it = std::max_element(merged.begin(), merged.end(), [](const Atom& a, const Atom& b) { return a.m < b.m; });
    heavy.push_back(*it);
    light.clear();
    for (auto jt = merged.begin(); jt != merged.end(); ++jt)
      if (jt != it) light.push_back(*jt);
  }
  for (const Atom& a : light) {
    if (heavy.empty()) {
      // Only segments remain; attach the mass to the closest endpoint.
      double best = segs.front().r1, dist = std::numeric_limits<double>::infinity();
      for (const Segment& s : segs)
        for (double e : {s.r1, s.r2})
          if (std::abs(e - a.q) < dist) {
            dist = std::abs(e - a.q);
            best = e;
          }
      heavy.push_back({best, a.m});
      continue;
    }
    auto it = std::min_element(heavy.begin(), heavy.end(), [&](const Atom& x, const Atom& y) {
      return std::abs(x.q - a.q) < std::abs(y.q - a.q);
    });
    it->m += a.m;
  }
  std::optional<MixedModel> link;
  if (!segs.empty()) link = *mu.model();
  return ParisiMeasure(std::move(heavy), std::move(segs), std::move(link));
}

namespace {

using Clock = std::chrono::steady_clock;

struct Candidate {
  std::vector<double> params;
  std::optional<ParisiMeasure> mu;
  double P = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
};

class Engine {
 public:
  Engine(const MixedModel& model, const AnsatzFamily& fam, const SolveOptions& opt, Telemetry& tel)
      : model_(model), fam_(fam), opt_(opt), tel_(tel) {}

  const AnsatzFamily& family() const { return fam_; }
  std::size_t n_loc() const { return 2 * fam_.slots.size(); }

  double gap_of(const ParisiMeasure& mu) const {
    PrimalOptions popt{opt_.quad_tol, opt_.mass_tol};
    const double P = primal_value(model_, mu, popt);
    DualOptions dopt;
    dopt.mass_tol = opt_.mass_tol;
    const DualFunction eta(model_, mu, dopt);
    return P - dual_value(eta, opt_.quad_tol);
  }

  // Clamp and order locations of a full parameter vector in place.
  void tidy(std::vector<double>& p) const {
    for (std::size_t k = 0; k < fam_.slots.size(); ++k) {
      const Interval& box = fam_.slots[k].box;
      double* q = p.data() + 4 * k;
      q[0] = std::clamp(q[0], box.lo, box.hi);
      q[1] = std::clamp(q[1], box.lo, box.hi);
      if (q[0] > q[1]) {
        std::swap(q[0], q[1]);
        std::swap(q[2], q[3]);
      }
    }
  }

  // Minimizes over masses for the locations in p (warm-started from the
  // masses in p). Returns +inf when the segments alone exceed unit mass.
  double inner(std::vector<double>& p) {
    tidy(p);
    const double seg = segment_mass(fam_, p, model_);
    if (seg > 1.0) return std::numeric_limits<double>::infinity();
    std::vector<double> locs, warm;
    std::vector<Segment> segs;
    for (std::size_t k = 0; k < fam_.slots.size(); ++k) {
      const double* q = p.data() + 4 * k;
      locs.push_back(q[0]);
      locs.push_back(q[1]);
      warm.push_back(q[2]);
      warm.push_back(q[3]);
      if (fam_.slots[k].kind == Slot::Kind::Segment && q[1] > q[0]) segs.push_back({q[0], q[1]});
    }
    const detail::MassProblem mp(model_, locs, segs);
    const auto res = mp.minimize(warm);
    ++tel_.inner_solves;
    for (std::size_t k = 0; k < fam_.slots.size(); ++k) {
      p[4 * k + 2] = res.masses[2 * k];
      p[4 * k + 3] = res.masses[2 * k + 1];
    }
    return res.P;
  }

  Candidate make(std::vector<double> p) {
    Candidate c;
    c.P = inner(p);
    c.params = std::move(p);
    if (std::isfinite(c.P)) c.mu = realize(fam_, c.params, model_, opt_.mass_tol).measure;
    return c;
  }

  void certify_candidate(Candidate& c) const {
    if (c.mu && !std::isfinite(c.gap)) c.gap = gap_of(*c.mu);
  }

  // One Nelder-Mead run over the locations, masses re-optimized at every
  // evaluation.
  Candidate nelder_mead(const Candidate& start, int budget, int& used) {
    struct Ctx {
      Engine* self;
      std::vector<double> base;
      Candidate best;
    } ctx{this, start.params, start};

    const std::size_t n = n_loc();
    gsl_multimin_function fn;
    fn.n = n;
    fn.params = &ctx;
    fn.f = [](const gsl_vector* v, void* raw) -> double {
      auto* c = static_cast<Ctx*>(raw);
      std::vector<double> p = c->best.params;
      for (std::size_t k = 0; k < v->size / 2; ++k) {
        p[4 * k] = gsl_vector_get(v, 2 * k);
        p[4 * k + 1] = gsl_vector_get(v, 2 * k + 1);
      }
      const double P = c->self->inner(p);
      if (P < c->best.P) {
        c->best.P = P;
        c->best.params = p;
        c->best.mu.reset();
        c->best.gap = std::numeric_limits<double>::infinity();
      }
      return std::isfinite(P) ? P : 1e6;
    };

    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* step = gsl_vector_alloc(n);
    for (std::size_t k = 0; k < fam_.slots.size(); ++k) {
      const Interval& box = fam_.slots[k].box;
      const double s = std::max(0.05 * (box.hi - box.lo), 1e-4);
      gsl_vector_set(x, 2 * k, start.params[4 * k]);
      gsl_vector_set(x, 2 * k + 1, start.params[4 * k + 1]);
      gsl_vector_set(step, 2 * k, s);
      gsl_vector_set(step, 2 * k + 1, s);
    }
    gsl_multimin_fminimizer* nm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(nm, &fn, x, step);
    double last_checked = std::numeric_limits<double>::infinity();
    double anchor = ctx.best.P;
    int anchor_it = 0;
    for (int it = 0; it < budget; ++it) {
      if (gsl_multimin_fminimizer_iterate(nm) != GSL_SUCCESS) break;
      ++used;
      const double size = gsl_multimin_fminimizer_size(nm);
      if (size < 1e-10) break;
      // Stagnation: P has hit its rounding floor.
      if (ctx.best.P < anchor - 1e-15 * std::max(1.0, std::abs(anchor))) {
        anchor = ctx.best.P;
        anchor_it = it;
      } else if (it - anchor_it > 200) {
        break;
      }
      if ((it + 1) % 50 == 0 && ctx.best.P < last_checked) {
        last_checked = ctx.best.P;
        finish(ctx.best);
        if (ctx.best.gap <= opt_.refine_tol) break;
      }
    }
    gsl_multimin_fminimizer_free(nm);
    gsl_vector_free(step);
    gsl_vector_free(x);
    finish(ctx.best);
    return ctx.best;
  }

  void finish(Candidate& c) const {
    if (!c.mu && std::isfinite(c.P)) c.mu = realize(fam_, c.params, model_, opt_.mass_tol).measure;
    certify_candidate(c);
  }

  // Moves atoms of pair slots onto local minima of the gap function of the
  // current measure and re-solves the masses, while the gap decreases.
  Candidate polish(Candidate c, int rounds) {
    finish(c);
    for (int r = 0; r < rounds && c.gap > opt_.refine_tol && c.mu; ++r) {
      DualOptions dopt;
      dopt.mass_tol = opt_.mass_tol;
      const DualFunction eta(model_, *c.mu, dopt);
      std::vector<std::pair<double, double>> minima;  // (gap, t)
      for (double t : eta.local_minima()) minima.emplace_back(eta.gap(t), t);
      std::sort(minima.begin(), minima.end());

      std::vector<double> p = c.params;
      for (std::size_t k = 0; k < fam_.slots.size(); ++k) {
        if (fam_.slots[k].kind != Slot::Kind::AtomPair) continue;
        const Interval& box = fam_.slots[k].box;
        double* q = p.data() + 4 * k;
        std::vector<double> in_box;
        for (const auto& [g, t] : minima)
          if (t >= box.lo && t <= box.hi) in_box.push_back(t);
        if (in_box.empty()) continue;
        std::vector<bool> taken(in_box.size(), false);
        for (int j = 0; j < 2; ++j) {
          if (q[2 + j] <= opt_.prune_tol) continue;
          std::size_t best = 0;
          for (std::size_t i = 1; i < in_box.size(); ++i)
            if (std::abs(in_box[i] - q[j]) < std::abs(in_box[best] - q[j])) best = i;
          q[j] = in_box[best];
          taken[best] = true;
        }
        for (int j = 0; j < 2; ++j) {
          if (q[2 + j] > opt_.prune_tol) continue;
          for (std::size_t i = 0; i < in_box.size(); ++i)
            if (!taken[i]) {
              q[j] = in_box[i];
              taken[i] = true;
              break;
            }
        }
      }
      Candidate next = make(p);
      if (!std::isfinite(next.P)) break;
      finish(next);
      // P is flat to rounding near the optimum; the gap still resolves
      // location errors there.
      if (!(next.gap < c.gap)) break;
      c = std::move(next);
    }
    return c;
  }

 private:
  const MixedModel& model_;
  const AnsatzFamily& fam_;
  const SolveOptions& opt_;
  Telemetry& tel_;
};

// Locations spread over every slot, masses zero; full-width segments,
// shortened when they alone would carry too much mass.
std::vector<double> spread_start(const AnsatzFamily& fam, const MixedModel& model) {
  std::vector<double> p(fam.dimension(), 0.0);
  for (std::size_t k = 0; k < fam.slots.size(); ++k) {
    const Interval& box = fam.slots[k].box;
    if (fam.slots[k].kind == Slot::Kind::Segment) {
      p[4 * k] = box.lo;
      p[4 * k + 1] = box.hi;
    } else {
      p[4 * k] = box.lo + (box.hi - box.lo) / 3.0;
      p[4 * k + 1] = box.lo + 2.0 * (box.hi - box.lo) / 3.0;
    }
  }
  for (int it = 0; it < 60 && segment_mass(fam, p, model) > 0.5; ++it)
    for (std::size_t k = 0; k < fam.slots.size(); ++k)
      if (fam.slots[k].kind == Slot::Kind::Segment) p[4 * k + 1] = p[4 * k] + 0.7 * (p[4 * k + 1] - p[4 * k]);
  return p;
}

std::size_t slot_of(const AnsatzFamily& fam, double q) {
  for (std::size_t k = 0; k < fam.slots.size(); ++k)
    if (q >= fam.slots[k].box.lo && q <= fam.slots[k].box.hi) return k;
  return fam.slots.size() - 1;
}

// Places the atoms of mu into a spread start (first free location of the
// slot containing each atom).
std::vector<double> seeded_start(const AnsatzFamily& fam, const MixedModel& model, const std::vector<Atom>& atoms) {
  std::vector<double> p = spread_start(fam, model);
  std::vector<int> used(fam.slots.size(), 0);
  for (const Atom& a : atoms) {
    const std::size_t k = slot_of(fam, a.q);
    if (used[k] >= 2) continue;
    double* q = p.data() + 4 * k;
    if (fam.slots[k].kind == Slot::Kind::Segment) {
      // Keep the segment; put the atom at the nearer endpoint.
      const int j = std::abs(a.q - q[0]) <= std::abs(a.q - q[1]) ? 0 : 1;
      q[2 + j] += a.m;
      ++used[k];
      continue;
    }
    q[used[k]] = a.q;
    q[2 + used[k]] = a.m;
    ++used[k];
  }
  return p;
}

std::vector<double> random_start(const AnsatzFamily& fam, const MixedModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> p(fam.dimension(), 0.0);
  for (std::size_t k = 0; k < fam.slots.size(); ++k) {
    const Interval& box = fam.slots[k].box;
    for (int j = 0; j < 2; ++j) {
      p[4 * k + j] = box.lo + (box.hi - box.lo) * unit(rng);
      p[4 * k + 2 + j] = unit(rng);
    }
  }
  for (int it = 0; it < 60 && segment_mass(fam, p, model) > 0.9; ++it)
    for (std::size_t k = 0; k < fam.slots.size(); ++k)
      if (fam.slots[k].kind == Slot::Kind::Segment) {
        const double lo = std::min(p[4 * k], p[4 * k + 1]);
        const double hi = std::max(p[4 * k], p[4 * k + 1]);
        p[4 * k] = lo;
        p[4 * k + 1] = lo + 0.7 * (hi - lo);
      }
  return p;
}

// Atoms not pinned to a segment endpoint move onto the nearest local minimum
// of the gap function; masses are re-solved; repeated while the gap drops.
struct Refined {
  std::optional<ParisiMeasure> mu;
  double gap = std::numeric_limits<double>::infinity();
};

double gap_of(const MixedModel& model, const ParisiMeasure& mu, const SolveOptions& opt) {
  const double P = primal_value(model, mu, {opt.quad_tol, opt.mass_tol});
  DualOptions dopt;
  dopt.mass_tol = opt.mass_tol;
  const DualFunction eta(model, mu, dopt);
  return P - dual_value(eta, opt.quad_tol);
}

Refined refine_atoms(const MixedModel& model, std::vector<double> locs, const std::vector<Segment>& segs,
                     const SolveOptions& opt) {
  Refined best;
  std::vector<double> warm(locs.size(), 1.0);
  std::optional<MixedModel> link;
  if (!segs.empty()) link = model;
  for (int round = 0; round < 30; ++round) {
    const detail::MassProblem mp(model, locs, segs);
    if (mp.free_mass() < 0.0) break;
    const auto res = mp.minimize(warm);
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < locs.size(); ++k) atoms.push_back({locs[k], res.masses[k]});
    ParisiMeasure mu(atoms, segs, link);
    const double gap = gap_of(model, mu, opt);
    if (!(gap < best.gap)) break;
    best.gap = gap;
    best.mu = mu;
    if (gap <= opt.refine_tol) break;
    const DualFunction eta(model, mu);
    const std::vector<double>& minima = eta.local_minima();
    for (double& x : locs) {
      bool pinned = false;
      for (const Segment& s : segs) pinned = pinned || x == s.r1 || x == s.r2;
      if (pinned || minima.empty()) continue;
      x = *std::min_element(minima.begin(), minima.end(),
                            [&](double a, double b) { return std::abs(a - x) < std::abs(b - x); });
    }
    warm = res.masses;
  }
  return best;
}

// Tries structurally simpler measures (segments collapsed to a point, nearby
// atoms merged, light atoms dropped) and keeps each one that still certifies.
ParisiMeasure simplify(const MixedModel& model, ParisiMeasure mu, const SolveOptions& opt, Telemetry& tel) {
  constexpr double kMergeRadius = 1e-3;
  constexpr double kLightMass = 1e-4;
  const AnsatzFamily family = family_from_pattern(sign_pattern(model, opt.root_tol));
  auto atoms_of = [&](const ParisiMeasure& m) {
    std::vector<Atom> out;
    for (const Atom& a : m.atoms())
      if (a.m > opt.prune_tol) out.push_back(a);
    return out;
  };
  auto accept = [&](std::vector<double> locs, const std::vector<Segment>& segs) {
    ++tel.inner_solves;
    const Refined r = refine_atoms(model, std::move(locs), segs, opt);
    if (!r.mu || r.gap > opt.gap_tol) return false;
    mu = prune_and_merge(*r.mu, opt.prune_tol, opt.merge_tol);
    return true;
  };

  for (bool progress = true; progress;) {
    progress = false;
    const std::vector<Segment> segs = mu.segments();
    const std::vector<Atom> atoms = atoms_of(mu);

    for (std::size_t j = 0; j < segs.size() && !progress; ++j) {
      std::vector<Segment> rest = segs;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(j));
      std::vector<double> locs;
      double at = segs[j].r1, heaviest = -1.0;
      for (const Atom& a : atoms) {
        if (a.q >= segs[j].r1 && a.q <= segs[j].r2) {
          if (a.m > heaviest) {
            heaviest = a.m;
            at = a.q;
          }
          continue;
        }
        locs.push_back(a.q);
      }
      locs.push_back(at);
      std::sort(locs.begin(), locs.end());
      progress = accept(locs, rest);
    }

    // Segment ends that stop just short of their slot edge.
    for (std::size_t j = 0; j < segs.size() && !progress; ++j) {
      for (const Slot& slot : family.slots) {
        if (slot.kind != Slot::Kind::Segment || segs[j].r1 < slot.box.lo || segs[j].r2 > slot.box.hi) continue;
        Segment snapped = segs[j];
        if (snapped.r1 > slot.box.lo && snapped.r1 - slot.box.lo < kMergeRadius) snapped.r1 = slot.box.lo;
        if (snapped.r2 < slot.box.hi && slot.box.hi - snapped.r2 < kMergeRadius) snapped.r2 = slot.box.hi;
        if (snapped.r1 == segs[j].r1 && snapped.r2 == segs[j].r2) continue;
        std::vector<Segment> next = segs;
        next[j] = snapped;
        std::vector<double> locs;
        for (const Atom& a : atoms)
          if (a.q < snapped.r1 || a.q > snapped.r2 || a.q == snapped.r1 || a.q == snapped.r2) locs.push_back(a.q);
        for (double end : {snapped.r1, snapped.r2})
          if (std::find(locs.begin(), locs.end(), end) == locs.end()) locs.push_back(end);
        std::sort(locs.begin(), locs.end());
        progress = accept(locs, next);
      }
    }

    for (std::size_t i = 0; i + 1 < atoms.size() && !progress; ++i) {
      if (atoms[i + 1].q - atoms[i].q > kMergeRadius) continue;
      std::vector<double> locs;
      for (std::size_t k = 0; k < atoms.size(); ++k)
        if (k != i && k != i + 1) locs.push_back(atoms[k].q);
      const double w = atoms[i].m + atoms[i + 1].m;
      locs.push_back((atoms[i].q * atoms[i].m + atoms[i + 1].q * atoms[i + 1].m) / w);
      std::sort(locs.begin(), locs.end());
      progress = accept(locs, segs);
    }

    for (std::size_t i = 0; i < atoms.size() && !progress && atoms.size() > 1; ++i) {
      if (atoms[i].m > kLightMass) continue;
      std::vector<double> locs;
      for (std::size_t k = 0; k < atoms.size(); ++k)
        if (k != i) locs.push_back(atoms[k].q);
      progress = accept(locs, segs);
    }
  }
  return mu;
}

}  // namespace

SolveReport solve(const MixedModel& model, const SolveOptions& opt) {
  const auto t0 = Clock::now();
  SolveReport rep;
  rep.options = opt;
  rep.telemetry.seed = opt.seed;
  rep.pattern = sign_pattern(model, opt.root_tol);
  rep.rs = rs_quick_tests(model, opt);

  CertifyOptions copt;
  copt.gap_tol = opt.gap_tol;
  copt.coin_tol = opt.coin_tol;
  copt.quad_tol = opt.quad_tol;
  copt.mass_tol = opt.mass_tol;

  // RS seeds: delta_0 and delta_q at every fixed-point root.
  std::optional<ParisiMeasure> best;
  double best_P = std::numeric_limits<double>::infinity();
  double best_gap = std::numeric_limits<double>::infinity();
  auto offer = [&](const ParisiMeasure& mu, double P, double gap) {
    // Among certified candidates the smaller gap wins; otherwise the lower P.
    const bool better =
        gap <= opt.gap_tol ? (best_gap > opt.gap_tol || gap < best_gap) : (best_gap > opt.gap_tol && P < best_P);
    if (better) {
      best = mu;
      best_P = P;
      best_gap = gap;
    }
  };

  {
    const ParisiMeasure d0 = ParisiMeasure::dirac(0.0);
    const PrimalOptions popt{opt.quad_tol, opt.mass_tol};
    const double P0 = primal_value(model, d0, popt);
    const DualFunction eta(model, d0);
    offer(d0, P0, P0 - dual_value(eta, opt.quad_tol));
  }
  if (opt.max_iterations > 0) {
    for (const FixedPointRoot& r : rep.rs.roots) {
      if (r.q == 0.0) continue;
      const ParisiMeasure dq = ParisiMeasure::dirac(r.q);
      offer(dq, primal_dirac(model, r.q), r.gap);
    }
  }

  if (opt.max_iterations > 0 && best_gap > opt.gap_tol) {
    const AnsatzFamily fam = family_from_pattern(rep.pattern);
    Engine eng(model, fam, opt, rep.telemetry);
    std::mt19937_64 rng(opt.seed);
    int used = 0;
    std::optional<Candidate> top;
    auto take = [&](Candidate c) {
      if (!c.mu) return;
      offer(*c.mu, c.P, c.gap);
      if (!top || c.P < top->P) top = std::move(c);
    };

    for (int s = 0; s < std::max(opt.n_starts, 1) && best_gap > opt.gap_tol && used < opt.max_iterations; ++s) {
      std::vector<double> p;
      switch (s) {
        case 0:
          p = seeded_start(fam, model, best->point_masses());
          break;
        case 1: {
          // Atoms at the lowest local minima of the gap function of the best
          // measure so far.
          const DualFunction eta(model, top && top->mu ? *top->mu : *best);
          std::vector<std::pair<double, double>> mins;
          for (double t : eta.local_minima()) mins.emplace_back(eta.gap(t), t);
          std::sort(mins.begin(), mins.end());
          std::vector<Atom> atoms;
          for (const auto& [g, t] : mins) atoms.push_back({t, 1.0});
          p = seeded_start(fam, model, atoms);
          break;
        }
        case 2:
          p = spread_start(fam, model);
          for (std::size_t k = 0; k < fam.slots.size(); ++k) p[4 * k + 2] = p[4 * k + 3] = 1.0;
          break;
        default:
          p = random_start(fam, model, rng);
          break;
      }
      ++rep.telemetry.restarts;
      Candidate c = eng.make(p);
      if (!std::isfinite(c.P)) continue;
      eng.finish(c);
      if (c.gap > opt.refine_tol) c = eng.nelder_mead(c, opt.max_iterations - used, used);
      if (c.gap > opt.refine_tol) c = eng.polish(std::move(c), 30);
      take(std::move(c));
      // A second pass from the polished point often closes the remaining gap.
      if (top && top->gap > opt.refine_tol && used < opt.max_iterations) {
        Candidate again = eng.nelder_mead(*top, opt.max_iterations - used, used);
        again = eng.polish(std::move(again), 30);
        take(std::move(again));
      }
    }
    rep.telemetry.iterations = used;
  }

  // Clean-up and final certificate.
  ParisiMeasure final_mu = best_gap <= opt.gap_tol ? simplify(model, *best, opt, rep.telemetry) : *best;
  DualCertificate cert = certify(model, final_mu, copt);
  const ParisiMeasure pruned = prune_and_merge(final_mu, opt.prune_tol, opt.merge_tol);
  try {
    DualCertificate pc = certify(model, pruned, copt);
    if (pc.gap <= opt.gap_tol || pc.gap <= cert.gap) {
      final_mu = pruned;
      cert = std::move(pc);
    }
  } catch (const InvalidMeasureError&) {
  }

  rep.measure = final_mu;
  rep.certificate = cert;
  rep.free_energy = cert.P;
  rep.phase = classify(final_mu, opt.prune_tol);
  rep.status = cert.gap <= opt.gap_tol ? SolveStatus::Certified : SolveStatus::Uncertified;
  rep.telemetry.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

}  // namespace csdual
