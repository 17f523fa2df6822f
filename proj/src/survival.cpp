#include "agequeue/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace agequeue {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

SurvivalModel SurvivalModel::exponential(double rate, double max_age) {
  require_positive(rate, "exponential rate");
  require_positive(max_age, "max_age");
  return {Kind::exponential, rate, 0.0, max_age};
}

SurvivalModel SurvivalModel::weibull(double shape, double scale, double max_age) {
  require_positive(shape, "weibull shape");
  require_positive(scale, "weibull scale");
  require_positive(max_age, "max_age");
  return {Kind::weibull, shape, scale, max_age};
}

SurvivalModel SurvivalModel::gompertz(double a, double b, double max_age) {
  require_positive(a, "gompertz a");
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("gompertz b must be non-negative");
  require_positive(max_age, "max_age");
  return {Kind::gompertz, a, b, max_age};
}

SurvivalModel SurvivalModel::life_table(std::vector<LifeTableRow> rows) {
  if (rows.size() < 2) throw std::invalid_argument("life table needs at least two rows");
  if (rows.front().age != 0.0) throw std::invalid_argument("life table must start at age 0");
  if (rows.front().survival != 1.0) throw std::invalid_argument("life table must have S(0) = 1");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].age > rows[i - 1].age)) {
      throw std::invalid_argument("life table ages must be strictly increasing (row " +
                                  std::to_string(i + 1) + ")");
    }
    if (rows[i].survival > rows[i - 1].survival) {
      throw std::invalid_argument("life table survival increases at row " + std::to_string(i + 1));
    }
    if (rows[i].survival < 0.0) throw std::invalid_argument("life table survival is negative");
    if (i + 1 < rows.size() && rows[i].survival <= 0.0) {
      throw std::invalid_argument("life table survival must stay positive before the final row");
    }
  }
  if (rows.back().survival != 0.0) {
    throw std::invalid_argument("life table must end with survival 0 at the maximum age");
  }
  SurvivalModel s(Kind::life_table, 0.0, 0.0, rows.back().age);
  s.segment_hazard_.resize(rows.size() - 1);
  for (std::size_t i = 0; i + 2 < rows.size(); ++i) {
    s.segment_hazard_[i] =
        std::log(rows[i].survival / rows[i + 1].survival) / (rows[i + 1].age - rows[i].age);
  }
  s.segment_hazard_.back() = std::numeric_limits<double>::quiet_NaN();  // linear tail
  s.rows_ = std::move(rows);
  return s;
}

std::size_t SurvivalModel::segment(double x) const {
  auto it = std::upper_bound(rows_.begin(), rows_.end(), x,
                             [](double v, const LifeTableRow& r) { return v < r.age; });
  return static_cast<std::size_t>(it - rows_.begin()) - 1;
}

double SurvivalModel::survival(double x) const {
  if (x <= 0.0) return 1.0;
  if (x >= max_age_) return 0.0;
  switch (kind_) {
    case Kind::exponential:
      return std::exp(-a_ * x);
    case Kind::weibull:
      return std::exp(-std::pow(x / b_, a_));
    case Kind::gompertz:
      if (b_ == 0.0) return std::exp(-a_ * x);
      return std::exp(-a_ / b_ * std::expm1(b_ * x));
    case Kind::life_table: {
      const std::size_t i = segment(x);
      const auto& lo = rows_[i];
      if (i + 2 == rows_.size()) return lo.survival * (1.0 - (x - lo.age) / (max_age_ - lo.age));
      return lo.survival * std::exp(-segment_hazard_[i] * (x - lo.age));
    }
  }
  return 0.0;
}

double SurvivalModel::derivative(double x) const {
  if (x >= max_age_) return 0.0;
  x = std::max(x, 0.0);
  switch (kind_) {
    case Kind::exponential:
      return -a_ * survival(x);
    case Kind::weibull: {
      const double rate = a_ * std::pow(x, a_ - 1.0) / std::pow(b_, a_);
      if (x == 0.0 && a_ < 1.0) return -std::numeric_limits<double>::infinity();
      return -rate * survival(x);
    }
    case Kind::gompertz:
      return -a_ * std::exp(b_ * x) * survival(x);
    case Kind::life_table: {
      const std::size_t i = segment(x);
      if (i + 2 == rows_.size()) return -rows_[i].survival / (max_age_ - rows_[i].age);
      return -segment_hazard_[i] * survival(x);
    }
  }
  return 0.0;
}

double SurvivalModel::hazard(double x) const {
  if (x < 0.0) throw DomainError("hazard: negative age");
  if (x >= max_age_) throw DomainError("hazard: age " + std::to_string(x) + " beyond max age");
  const double s = survival(x);
  if (s <= 0.0) throw DomainError("hazard: S(x) = 0 at age " + std::to_string(x));
  return -derivative(x) / s;
}

double SurvivalModel::quantile(double u) const {
  if (u >= 1.0) return 0.0;
  if (u <= 0.0) return max_age_;
  double x = max_age_;
  switch (kind_) {
    case Kind::exponential:
      x = -std::log(u) / a_;
      break;
    case Kind::weibull:
      x = b_ * std::pow(-std::log(u), 1.0 / a_);
      break;
    case Kind::gompertz:
      x = b_ == 0.0 ? -std::log(u) / a_ : std::log1p(-b_ / a_ * std::log(u)) / b_;
      break;
    case Kind::life_table: {
      std::size_t i = 1;
      while (rows_[i].survival > u) ++i;
      const auto& lo = rows_[i - 1];
      if (i + 1 == rows_.size()) {
        x = lo.age + (max_age_ - lo.age) * (1.0 - u / lo.survival);
      } else {
        x = lo.age + std::log(lo.survival / u) / segment_hazard_[i - 1];
      }
      break;
    }
  }
  return std::clamp(x, 0.0, max_age_);
}

double SurvivalModel::residual_quantile(double age, double u) const {
  const double s = survival(age);
  if (s <= 0.0) return 0.0;
  return std::max(quantile(u * s) - age, 0.0);
}

double sample_lifetime(const SurvivalModel& s, Rng& rng) { return s.quantile(rng.uniform()); }

}  // namespace agequeue
