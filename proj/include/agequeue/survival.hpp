#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "agequeue/rng.hpp"

namespace agequeue {

inline constexpr double kDefaultMaxAge = 110.0;

/// Raised when a survival quantity is requested outside its support.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct LifeTableRow {
  double age;
  double survival;
};

/// Survival function S(x) of one sex, truncated at a hard maximum age.
///
/// Parametric kinds are evaluated in closed form on [0, max_age) and are zero
/// from max_age on. Life tables interpolate exponentially between rows
/// (constant hazard per segment); the last segment falls linearly to zero at
/// the final age, which becomes max_age.
class SurvivalModel {
 public:
  enum class Kind { exponential, weibull, gompertz, life_table };

  /// Exponential lifetime, S(x) = exp(-rate x).
  static SurvivalModel exponential(double rate, double max_age = kDefaultMaxAge);
  /// S(x) = exp(-(x / scale)^shape).
  static SurvivalModel weibull(double shape, double scale, double max_age = kDefaultMaxAge);
  /// Hazard a exp(b x).
  static SurvivalModel gompertz(double a, double b, double max_age = kDefaultMaxAge);
  /// Throws std::invalid_argument when the rows do not describe a survival
  /// curve: first row (0, 1), strictly increasing ages, non-increasing
  /// survival that stays positive until the final row, final survival 0.
  static SurvivalModel life_table(std::vector<LifeTableRow> rows);

  SurvivalModel() : SurvivalModel(exponential(1.0)) {}

  Kind kind() const { return kind_; }
  double max_age() const { return max_age_; }
  bool analytic() const { return kind_ != Kind::life_table; }
  const std::vector<LifeTableRow>& rows() const { return rows_; }
  double param_a() const { return a_; }
  double param_b() const { return b_; }

  double survival(double x) const;
  /// Right derivative S'(x); zero from max_age on.
  double derivative(double x) const;
  /// -S'(x)/S(x). Throws DomainError for x >= max_age or S(x) == 0.
  double hazard(double x) const;
  /// S'(0). For life tables this is minus the hazard of the first segment.
  double initial_slope() const { return derivative(0.0); }

  /// inf{x : S(x) <= u}, clamped to [0, max_age].
  double quantile(double u) const;
  /// Residual lifetime quantile for someone already aged `age`, drawn from
  /// S(age + .) / S(age).
  double residual_quantile(double age, double u) const;

 private:
  SurvivalModel(Kind kind, double a, double b, double max_age)
      : kind_(kind), a_(a), b_(b), max_age_(max_age) {}

  std::size_t segment(double x) const;

  Kind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  double max_age_;
  std::vector<LifeTableRow> rows_;
  std::vector<double> segment_hazard_;
};

/// Inverse-transform lifetime draw; always in [0, max_age].
double sample_lifetime(const SurvivalModel& s, Rng& rng);

}  // namespace agequeue
