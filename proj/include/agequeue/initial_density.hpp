#pragma once

#include <limits>
#include <vector>

namespace agequeue {

struct DensityPoint {
  double age;
  double value;
};

/// Initial age density (persons per unit age per unit N) of one sex.
///
/// Kinds: zero; scale * exp(-rate x); a box `density` on [lo, hi); a
/// piecewise-linear table that is zero outside its first and last ages.
/// value() returns the mean of the left and right limits at a jump, so
/// trapezoidal sums over grids that contain the jump stay second order.
class InitialDensity {
 public:
  enum class Kind { zero, exponential, uniform, table };

  static InitialDensity zero() { return {}; }
  static InitialDensity exponential(double scale, double rate);
  static InitialDensity uniform(double lo, double hi, double density);
  /// Throws std::invalid_argument for non-increasing ages; negative values
  /// are accepted here and rejected by scenario validation.
  static InitialDensity table(std::vector<DensityPoint> points);

  /// Copy that vanishes from `max_age` on.
  InitialDensity restricted_to(double max_age) const;

  Kind kind() const { return kind_; }
  double value(double x) const;
  /// Exact integral over [a, b).
  double mass(double a, double b) const;
  /// Smallest sampled value (table points or the analytic form), for
  /// non-negativity checks.
  double min_value() const;
  /// Age beyond which the density is zero (infinity for untruncated
  /// exponentials).
  double support_end() const;

  const std::vector<DensityPoint>& points() const { return points_; }
  double p0() const { return p0_; }
  double p1() const { return p1_; }
  double p2() const { return p2_; }

 private:
  double raw(double x) const;

  Kind kind_ = Kind::zero;
  double p0_ = 0.0;  // scale | lo
  double p1_ = 0.0;  // rate  | hi
  double p2_ = 0.0;  //       | density
  double max_age_ = std::numeric_limits<double>::infinity();
  std::vector<DensityPoint> points_;
};

}  // namespace agequeue
