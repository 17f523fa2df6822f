#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace agequeue {

/// Values on the age/time grid, one row per time step: at(k, j) = f(x_j, t_k).
class GridField {
 public:
  GridField() = default;
  GridField(int times, int ages, double fill = 0.0)
      : times_(times), ages_(ages), data_(static_cast<std::size_t>(times) * ages, fill) {}

  int times() const { return times_; }
  int ages() const { return ages_; }

  double& at(int k, int j) { return data_[index(k, j)]; }
  double at(int k, int j) const { return data_[index(k, j)]; }

  std::span<const double> row(int k) const {
    return {data_.data() + static_cast<std::size_t>(k) * ages_, static_cast<std::size_t>(ages_)};
  }
  std::span<double> row(int k) {
    return {data_.data() + static_cast<std::size_t>(k) * ages_, static_cast<std::size_t>(ages_)};
  }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int k, int j) const { return static_cast<std::size_t>(k) * ages_ + j; }

  int times_ = 0;
  int ages_ = 0;
  std::vector<double> data_;
};

/// Composite trapezoid of equally spaced samples.
inline double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

/// Trapezoid of a grid row over [lo, hi); both ends must be grid ages.
/// Ages past the end of the row contribute zero.
double bin_integral(std::span<const double> row, double h, double lo, double hi);

}  // namespace agequeue
