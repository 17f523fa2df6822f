#include "agequeue/initial_density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agequeue {

InitialDensity InitialDensity::exponential(double scale, double rate) {
  if (!(rate > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("exponential initial density needs rate > 0");
  }
  InitialDensity d;
  d.kind_ = Kind::exponential;
  d.p0_ = scale;
  d.p1_ = rate;
  return d;
}

InitialDensity InitialDensity::uniform(double lo, double hi, double density) {
  if (!(lo >= 0.0) || !(hi > lo)) throw std::invalid_argument("uniform initial density needs 0 <= lo < hi");
  InitialDensity d;
  d.kind_ = Kind::uniform;
  d.p0_ = lo;
  d.p1_ = hi;
  d.p2_ = density;
  return d;
}

InitialDensity InitialDensity::table(std::vector<DensityPoint> points) {
  if (points.empty()) throw std::invalid_argument("initial density table is empty");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].age > points[i - 1].age)) {
      throw std::invalid_argument("initial density ages must be strictly increasing (row " +
                                  std::to_string(i + 1) + ")");
    }
  }
  if (points.front().age < 0.0) throw std::invalid_argument("initial density has a negative age");
  InitialDensity d;
  d.kind_ = Kind::table;
  d.points_ = std::move(points);
  return d;
}

InitialDensity InitialDensity::restricted_to(double max_age) const {
  InitialDensity d = *this;
  d.max_age_ = max_age;
  return d;
}

double InitialDensity::raw(double x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::exponential:
      return p0_ * std::exp(-p1_ * x);
    case Kind::uniform:
      if (x == p0_ && x > 0.0) return 0.5 * p2_;
      if (x == p1_) return 0.5 * p2_;
      return (x >= p0_ && x < p1_) ? p2_ : 0.0;
    case Kind::table: {
      const auto& p = points_;
      if (x < p.front().age || x > p.back().age) return 0.0;
      if (x == p.front().age && x > 0.0) return 0.5 * p.front().value;
      if (x == p.back().age) return 0.5 * p.back().value;
      auto it = std::upper_bound(p.begin(), p.end(), x,
                                 [](double v, const DensityPoint& q) { return v < q.age; });
      if (it == p.end()) return p.back().value;
      const auto& a = *(it - 1);
      const auto& b = *it;
      return a.value + (x - a.age) / (b.age - a.age) * (b.value - a.value);
    }
  }
  return 0.0;
}

double InitialDensity::value(double x) const {
  if (x < 0.0 || x > max_age_) return 0.0;
  if (x == max_age_) return 0.5 * raw(x);
  return raw(x);
}

double InitialDensity::mass(double a, double b) const {
  a = std::max(a, 0.0);
  b = std::min(b, max_age_);
  if (!(b > a)) return 0.0;
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::exponential:
      return p0_ / p1_ * (std::exp(-p1_ * a) - std::exp(-p1_ * b));
    case Kind::uniform:
      return p2_ * std::max(0.0, std::min(b, p1_) - std::max(a, p0_));
    case Kind::table: {
      // exact for piecewise-linear: trapezoid over the breakpoints inside [a, b)
      a = std::max(a, points_.front().age);
      b = std::min(b, points_.back().age);
      if (!(b > a)) return 0.0;
      auto inside = [this](double x) {
        auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                   [](double v, const DensityPoint& q) { return v < q.age; });
        if (it == points_.begin()) return points_.front().value;
        if (it == points_.end()) return points_.back().value;
        const auto& lo = *(it - 1);
        const auto& hi = *it;
        return lo.value + (x - lo.age) / (hi.age - lo.age) * (hi.value - lo.value);
      };
      std::vector<double> xs{a};
      for (const auto& q : points_) {
        if (q.age > a && q.age < b) xs.push_back(q.age);
      }
      xs.push_back(b);
      double total = 0.0;
      for (std::size_t i = 1; i < xs.size(); ++i) {
        const double lo = xs[i - 1];
        const double hi = xs[i];
        total += 0.5 * (hi - lo) * (inside(lo) + inside(hi));
      }
      return total;
    }
  }
  return 0.0;
}

double InitialDensity::min_value() const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::exponential:
      return std::min(p0_, 0.0);
    case Kind::uniform:
      return std::min(p2_, 0.0);
    case Kind::table: {
      double m = 0.0;
      for (const auto& q : points_) m = std::min(m, q.value);
      return m;
    }
  }
  return 0.0;
}

double InitialDensity::support_end() const {
  double end = 0.0;
  switch (kind_) {
    case Kind::zero:
      end = 0.0;
      break;
    case Kind::exponential:
      end = p0_ == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      break;
    case Kind::uniform:
      end = p2_ == 0.0 ? 0.0 : p1_;
      break;
    case Kind::table:
      end = points_.back().age;
      break;
  }
  return std::min(end, max_age_);
}

}  // namespace agequeue
