#include "csdual/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "csdual/error.hpp"

namespace csdual {

MixedModel::MixedModel(std::vector<Term> terms, double field) : terms_(std::move(terms)), field_(field) {
  if (terms_.empty()) throw ModelError("model needs at least one term");
  bool any_positive = false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    if (t.degree < 2) throw ModelError("degree " + std::to_string(t.degree) + " < 2");
    if (i > 0 && t.degree <= terms_[i - 1].degree) throw ModelError("degrees must be strictly increasing");
    if (!std::isfinite(t.coeff) || t.coeff < 0.0) throw ModelError("coefficients must be finite and nonnegative");
    any_positive = any_positive || t.coeff > 0.0;
  }
  if (!any_positive) throw ModelError("at least one coefficient must be positive");
  if (!std::isfinite(field_) || field_ < 0.0) throw ModelError("field h must be finite and nonnegative");
}

int MixedModel::leading_degree() const {
  for (const Term& t : terms_)
    if (t.coeff > 0.0) return t.degree;
  return terms_.back().degree;
}

double MixedModel::xi(double t, int order) const {
  double acc = 0.0;
  for (const Term& term : terms_) {
    const int p = term.degree;
    if (p < order) continue;
    double falling = 1.0;
    for (int j = 0; j < order; ++j) falling *= static_cast<double>(p - j);
    const int power = p - order;
    acc += term.coeff * falling * (power == 0 ? 1.0 : std::pow(t, power));
  }
  return acc;
}

double MixedModel::g(double t) const { return 1.0 / std::sqrt(xi(t, 2)); }

double MixedModel::g_prime(double t) const {
  const double x2 = xi(t, 2);
  return -0.5 * xi(t, 3) / (x2 * std::sqrt(x2));
}

std::vector<double> MixedModel::coefficients() const {
  std::vector<double> c(static_cast<std::size_t>(max_degree()) + 1, 0.0);
  for (const Term& t : terms_) c[static_cast<std::size_t>(t.degree)] = t.coeff;
  return c;
}

MixedModel MixedModel::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw ModelError("scale factor must be positive");
  std::vector<Term> out = terms_;
  for (Term& t : out) t.coeff *= lambda;
  return MixedModel(std::move(out), field_);
}

MixedModel MixedModel::with_field(double field) const { return MixedModel(terms_, field); }

double xi_eval(const MixedModel& model, double t, int order) {
  if (order < 0 || order > 4) throw ModelError("derivative order must be in 0..4");
  if (!(t >= 0.0)) throw ModelError("xi is evaluated on t >= 0 only");
  return model.xi(t, order);
}

namespace {

std::vector<double> derivative_coeffs(const std::vector<double>& c, int order) {
  std::vector<double> d;
  for (std::size_t i = static_cast<std::size_t>(order); i < c.size(); ++i) {
    double falling = 1.0;
    for (int j = 0; j < order; ++j) falling *= static_cast<double>(i - static_cast<std::size_t>(j));
    d.push_back(c[i] * falling);
  }
  return d;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

}  // namespace

std::vector<double> discriminant_coefficients(const MixedModel& model) {
  const std::vector<double> c = model.coefficients();
  const auto d2 = derivative_coeffs(c, 2);
  const auto d3 = derivative_coeffs(c, 3);
  const auto d4 = derivative_coeffs(c, 4);
  auto sq = multiply(d3, d3);
  auto cross = multiply(d2, d4);
  std::vector<double> s(std::max(sq.size(), cross.size()), 0.0);
  for (std::size_t i = 0; i < sq.size(); ++i) s[i] += 3.0 * sq[i];
  for (std::size_t i = 0; i < cross.size(); ++i) s[i] -= 2.0 * cross[i];
  return s;
}

double discriminant(const MixedModel& model, double t) {
  const double x2 = model.xi(t, 2);
  const double x3 = model.xi(t, 3);
  const double x4 = model.xi(t, 4);
  return 3.0 * x3 * x3 - 2.0 * x2 * x4;
}

double frak_d(const MixedModel& model, double t) {
  const double x2 = model.xi(t, 2);
  if (!(x2 > 0.0)) throw SingularPointError("xi''(" + std::to_string(t) + ") = 0: frak_d is singular there");
  return discriminant(model, t) / (4.0 * x2 * x2 * std::sqrt(x2));
}

std::vector<SignPattern::Component> SignPattern::components() const {
  std::vector<Component> out;
  for (const Interval& i : positive_components) out.push_back({i, true});
  for (const Interval& i : nonpositive_components) out.push_back({i, false});
  std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
    if (a.span.lo != b.span.lo) return a.span.lo < b.span.lo;
    return a.span.hi < b.span.hi;
  });
  return out;
}

SignPattern sign_pattern(const MixedModel& model, double root_tol) {
  const std::vector<double> s = discriminant_coefficients(model);
  const RootIsolation iso = isolate_unit_roots(s, root_tol);

  SignPattern pattern;
  pattern.root_tol = root_tol;
  if (iso.zero_polynomial) {
    pattern.kind = PatternKind::IdenticallyZero;
    return pattern;
  }
  pattern.kind = PatternKind::Mixed;
  pattern.roots = iso.roots;

  // Walk gaps and roots left to right, merging every root and nonpositive
  // gap into the closed component it touches.
  bool open_nonpositive = false;
  double np_start = 0.0;
  double left = 0.0;
  const std::size_t k = iso.roots.size();
  for (std::size_t i = 0; i <= k; ++i) {
    const double right = i < k ? iso.roots[i].lo : 1.0;
    if (iso.gap_signs[i] > 0) {
      if (open_nonpositive) {
        pattern.nonpositive_components.push_back({np_start, left});
        open_nonpositive = false;
      }
      pattern.positive_components.push_back({left, right});
    } else if (!open_nonpositive) {
      open_nonpositive = true;
      np_start = left;
    }
    if (i < k) {
      if (!open_nonpositive) {
        open_nonpositive = true;
        np_start = iso.roots[i].lo;
      }
      left = iso.roots[i].hi;
    }
  }
  if (open_nonpositive) pattern.nonpositive_components.push_back({np_start, 1.0});
  return pattern;
}

}  // namespace csdual
