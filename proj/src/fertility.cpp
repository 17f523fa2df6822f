#include "agequeue/fertility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agequeue {

namespace {

template <typename Row, typename X, typename Y>
double interpolate(const std::vector<Row>& rows, double v, X x, Y y) {
  auto it = std::upper_bound(rows.begin(), rows.end(), v,
                             [&](double value, const Row& r) { return value < x(r); });
  if (it == rows.begin()) return y(rows.front());
  if (it == rows.end()) return y(rows.back());
  const Row& a = *(it - 1);
  const Row& b = *it;
  const double w = (v - x(a)) / (x(b) - x(a));
  return y(a) + w * (y(b) - y(a));
}

}  // namespace

FertilitySchedule FertilitySchedule::constant(double rate) {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("fertility rate must be non-negative and finite");
  }
  FertilitySchedule f;
  f.kind_ = Kind::constant;
  f.peak_ = rate;
  f.lo_ = 0.0;
  return f;
}

FertilitySchedule FertilitySchedule::window(double lo, double hi, double peak) {
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("fertility window needs 0 <= lo < hi");
  }
  if (!(peak >= 0.0) || !std::isfinite(peak)) {
    throw std::invalid_argument("fertility peak must be non-negative and finite");
  }
  FertilitySchedule f;
  f.kind_ = Kind::window;
  f.lo_ = lo;
  f.hi_ = hi;
  f.peak_ = peak;
  return f;
}

FertilitySchedule FertilitySchedule::table(std::vector<AgeRate> rows) {
  if (rows.empty()) throw std::invalid_argument("fertility table is empty");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].rate >= 0.0) || !std::isfinite(rows[i].rate)) {
      throw std::invalid_argument("fertility table has a negative rate at row " + std::to_string(i + 1));
    }
    if (rows[i].age < 0.0) throw std::invalid_argument("fertility table has a negative age");
    if (i > 0 && !(rows[i].age > rows[i - 1].age)) {
      throw std::invalid_argument("fertility table ages must be strictly increasing (row " +
                                  std::to_string(i + 1) + ")");
    }
  }
  FertilitySchedule f;
  f.kind_ = Kind::table;
  f.lo_ = rows.front().age;
  f.hi_ = rows.back().age;
  f.rows_ = std::move(rows);
  return f;
}

FertilitySchedule FertilitySchedule::with_time_factor(std::vector<TimeFactor> points) const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].factor >= 0.0) || !std::isfinite(points[i].factor)) {
      throw std::invalid_argument("fertility time factor must be non-negative");
    }
    if (i > 0 && !(points[i].time > points[i - 1].time)) {
      throw std::invalid_argument("fertility time factor times must be strictly increasing");
    }
  }
  FertilitySchedule f = *this;
  f.time_factor_ = std::move(points);
  return f;
}

FertilitySchedule FertilitySchedule::restricted_to(double max_age) const {
  FertilitySchedule f = *this;
  f.max_age_ = max_age;
  return f;
}

double FertilitySchedule::base(double age) const {
  if (age < 0.0 || age >= max_age_) return 0.0;
  switch (kind_) {
    case Kind::constant:
      return peak_;
    case Kind::window: {
      if (age < lo_ || age > hi_) return 0.0;
      const double w = hi_ - lo_;
      return 4.0 * peak_ * (age - lo_) * (hi_ - age) / (w * w);
    }
    case Kind::table:
      if (age < lo_ || age > hi_) return 0.0;
      return interpolate(rows_, age, [](const AgeRate& r) { return r.age; },
                         [](const AgeRate& r) { return r.rate; });
  }
  return 0.0;
}

double FertilitySchedule::factor(double t) const {
  if (time_factor_.empty()) return 1.0;
  return interpolate(time_factor_, t, [](const TimeFactor& p) { return p.time; },
                     [](const TimeFactor& p) { return p.factor; });
}

double FertilitySchedule::rate(double age, double t) const { return base(age) * factor(t); }

double FertilitySchedule::bound() const {
  double base_max = 0.0;
  switch (kind_) {
    case Kind::constant:
    case Kind::window:
      base_max = peak_;
      break;
    case Kind::table:
      for (const auto& r : rows_) base_max = std::max(base_max, r.rate);
      break;
  }
  double factor_max = time_factor_.empty() ? 1.0 : 0.0;
  for (const auto& p : time_factor_) factor_max = std::max(factor_max, p.factor);
  return base_max * factor_max;
}

}  // namespace agequeue
