#pragma once

#include <vector>

#include "csdual/real_roots.hpp"

namespace csdual {

/// One monomial c_p t^p of the mixture; c_p already carries beta^2.
struct Term {
  int degree = 2;
  double coeff = 0.0;
};

/// Mixed p-spin model xi(t) = sum_p c_p t^p together with the external
/// field h. Finite mixtures only; validated on construction.
class MixedModel {
 public:
  MixedModel(std::vector<Term> terms, double field);

  const std::vector<Term>& terms() const { return terms_; }
  double field() const { return field_; }
  int max_degree() const { return terms_.back().degree; }
  /// Lowest degree carrying a positive coefficient.
  int leading_degree() const;

  /// xi^{(order)}(t); no domain checks (see xi_eval for the checked entry).
  double xi(double t, int order = 0) const;

  /// g = (xi'')^{-1/2} and its first derivative. Segment densities of
  /// candidate measures are -g'', so segment masses are differences of g'.
  double g(double t) const;
  double g_prime(double t) const;

  /// Dense power-basis coefficients of xi (index = power).
  std::vector<double> coefficients() const;

  MixedModel scaled(double lambda) const;
  MixedModel with_field(double field) const;

 private:
  std::vector<Term> terms_;
  double field_ = 0.0;
};

/// Checked evaluation of xi^{(order)}(t); rejects t < 0 and order outside 0..4.
double xi_eval(const MixedModel& model, double t, int order);

/// Power-basis coefficients of s = 3 (xi''')^2 - 2 xi'' xi''''.
std::vector<double> discriminant_coefficients(const MixedModel& model);

/// s(t); same sign as frak_d on (0,1).
double discriminant(const MixedModel& model, double t);

/// frak_d = ((xi'')^{-1/2})'' = s / (4 (xi'')^{5/2}). Throws SingularPointError
/// where xi''(t) = 0.
double frak_d(const MixedModel& model, double t);

enum class PatternKind { IdenticallyZero, Mixed };

/// Sign structure of frak_d on [0,1). Positive components are open intervals,
/// nonpositive ones are closed and absorb every root enclosure they touch.
struct SignPattern {
  struct Component {
    Interval span;
    bool positive = false;
  };

  PatternKind kind = PatternKind::Mixed;
  std::vector<Interval> positive_components;
  std::vector<Interval> nonpositive_components;
  std::vector<Interval> roots;
  double root_tol = 1e-12;

  /// All components in increasing order of position.
  std::vector<Component> components() const;
};

SignPattern sign_pattern(const MixedModel& model, double root_tol = 1e-12);

}  // namespace csdual
