#pragma once

#include <limits>
#include <vector>

namespace agequeue {

struct AgeRate {
  double age;
  double rate;
};

struct TimeFactor {
  double time;
  double factor;
};

/// Birth intensity b(x, t) of a female aged x at time t:
/// base(x) * c(t), zero outside [0, max_age].
///
/// base is constant, a parabolic hump on [lo, hi] peaking at `peak` in the
/// middle, or a piecewise-linear table (zero outside its first/last ages).
/// c(t) is piecewise linear through the given points, held flat beyond them,
/// and 1 when absent.
class FertilitySchedule {
 public:
  enum class Kind { constant, window, table };

  static FertilitySchedule constant(double rate);
  static FertilitySchedule window(double lo, double hi, double peak);
  /// Throws std::invalid_argument for non-increasing ages or negative rates.
  static FertilitySchedule table(std::vector<AgeRate> rows);

  /// Identically zero.
  FertilitySchedule() = default;

  /// Copy with a time modulation; throws on non-increasing times or
  /// negative factors.
  FertilitySchedule with_time_factor(std::vector<TimeFactor> points) const;
  /// Copy that is zero from `max_age` on.
  FertilitySchedule restricted_to(double max_age) const;

  Kind kind() const { return kind_; }
  double rate(double age, double t) const;
  /// Supremum of b over all ages and times.
  double bound() const;
  bool identically_zero() const { return bound() == 0.0; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double peak() const { return peak_; }
  const std::vector<AgeRate>& rows() const { return rows_; }
  const std::vector<TimeFactor>& time_factor() const { return time_factor_; }

 private:
  double base(double age) const;
  double factor(double t) const;

  Kind kind_ = Kind::constant;
  double lo_ = 0.0;
  double hi_ = std::numeric_limits<double>::infinity();
  double peak_ = 0.0;
  double max_age_ = std::numeric_limits<double>::infinity();
  std::vector<AgeRate> rows_;
  std::vector<TimeFactor> time_factor_;
};

}  // namespace agequeue
