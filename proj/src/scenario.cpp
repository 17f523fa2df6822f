#include "agequeue/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace agequeue {

namespace {

std::string join(const std::vector<std::string>& errors) {
  std::string out = "invalid scenario:";
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

void check_survival(const SurvivalModel& s, const std::string& path, std::vector<std::string>& errors) {
  if (s.survival(0.0) != 1.0) errors.push_back(path + ": S(0) must be 1");
  // monotone on a dense grid, zero at max age
  const int n = 4096;
  double prev = 1.0;
  for (int i = 0; i <= n; ++i) {
    const double x = s.max_age() * i / n;
    const double v = s.survival(x);
    if (v > prev || v < 0.0 || v > 1.0) {
      errors.push_back(path + ": survival not non-increasing in [0,1] near age " + std::to_string(x));
      break;
    }
    prev = v;
  }
  if (!(s.survival(s.max_age()) < 1e-12)) errors.push_back(path + ": S(max_age) must vanish");
}

void check_initial(const InitialDensity& d, const SurvivalModel& s, const std::string& path,
                   std::vector<std::string>& errors) {
  if (d.min_value() < 0.0) errors.push_back(path + ": density has a negative entry");
  if (d.kind() == InitialDensity::Kind::table && d.points().back().age > s.max_age()) {
    for (const auto& p : d.points()) {
      if (p.age > s.max_age() && p.value != 0.0) {
        errors.push_back(path + ": density must be zero beyond max age " + std::to_string(s.max_age()));
        break;
      }
    }
  }
  // Truncation at max age may only drop a negligible tail.
  const double total = d.mass(0.0, std::numeric_limits<double>::infinity());
  if (d.mass(s.max_age(), std::numeric_limits<double>::infinity()) > 1e-9 * std::max(total, 1e-300)) {
    errors.push_back(path + ": density has mass beyond max age " + std::to_string(s.max_age()));
  }
  // persons at ages the survival model cannot carry
  const double end = std::min(d.support_end(), s.max_age());
  const int n = 1024;
  for (int i = 0; i < n; ++i) {
    const double x = end * i / n;
    if (d.value(x) > 0.0 && s.survival(x) <= 0.0) {
      errors.push_back(path + ": positive density where survival is zero (age " + std::to_string(x) + ")");
      break;
    }
  }
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

std::optional<long> grid_steps(double t, double h) {
  const double q = t / h;
  const double k = std::round(q);
  if (std::abs(q - k) > 1e-9 * std::max(1.0, std::abs(q))) return std::nullopt;
  return static_cast<long>(k);
}

int AgeTimeGrid::time_index(double t) const {
  const auto k = grid_steps(t, h);
  if (!k || *k < 0 || *k > time_steps) {
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the grid");
  }
  return static_cast<int>(*k);
}

int AgeTimeGrid::age_index(double x) const {
  const auto j = grid_steps(x, h);
  if (!j || *j < 0) throw std::invalid_argument("age " + std::to_string(x) + " is not on the grid");
  return static_cast<int>(*j);
}

std::vector<std::string> scenario_errors(const ScenarioConfig& cfg) {
  std::vector<std::string> errors;
  if (!(cfg.r >= 0.0 && cfg.r <= 1.0)) errors.push_back("r: out of [0,1]");
  if (cfg.N < 1) errors.push_back("N: must be a positive integer");
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) errors.push_back("h: must be positive");
  if (!(cfg.t_max >= 0.0) || !std::isfinite(cfg.t_max)) {
    errors.push_back("t_max: must be non-negative");
  } else if (cfg.h > 0.0 && !grid_steps(cfg.t_max, cfg.h)) {
    errors.push_back("t_max: must be a multiple of h");
  }
  if (cfg.replications < 1) errors.push_back("replications: must be positive");

  check_survival(cfg.female_survival, "survival_female", errors);
  check_survival(cfg.male_survival, "survival_male", errors);

  const double bound = cfg.fertility.bound();
  if (cfg.declared_bmax) {
    if (!(*cfg.declared_bmax >= 0.0) || !std::isfinite(*cfg.declared_bmax)) {
      errors.push_back("fertility.b_max: must be finite and non-negative");
    } else if (bound > *cfg.declared_bmax) {
      errors.push_back("fertility.b_max: schedule exceeds the declared bound");
    }
  }
  if (!std::isfinite(bound)) errors.push_back("fertility: unbounded intensity");

  check_initial(cfg.female_initial, cfg.female_survival, "initial_female", errors);
  check_initial(cfg.male_initial, cfg.male_survival, "initial_male", errors);

  const auto& obs = cfg.observation;
  if (!(obs.bin_width > 0.0)) {
    errors.push_back("observation.bin_width: must be positive");
  } else if (cfg.h > 0.0 && !grid_steps(obs.bin_width, cfg.h)) {
    errors.push_back("observation.bin_width: must be a multiple of h");
  }
  if (!(obs.max_age > 0.0)) {
    errors.push_back("observation.max_age: must be positive");
  } else if (obs.bin_width > 0.0 && !grid_steps(obs.max_age, obs.bin_width)) {
    errors.push_back("observation.max_age: must be a multiple of bin_width");
  }
  for (std::size_t i = 0; i < obs.times.size(); ++i) {
    const double t = obs.times[i];
    if (!(t >= 0.0 && t <= cfg.t_max) || (cfg.h > 0.0 && !grid_steps(t, cfg.h))) {
      errors.push_back("observation.times[" + std::to_string(i) + "]: must be a grid time in [0, t_max]");
    }
    if (i > 0 && !(t > obs.times[i - 1])) {
      errors.push_back("observation.times: must be strictly increasing");
    }
  }
  return errors;
}

Scenario validate_scenario(const ScenarioConfig& cfg) {
  auto errors = scenario_errors(cfg);
  if (!errors.empty()) throw ScenarioError(std::move(errors));

  Scenario s;
  s.cfg_ = cfg;
  const double omega1 = cfg.female_survival.max_age();
  const double omega2 = cfg.male_survival.max_age();
  s.cfg_.fertility = cfg.fertility.restricted_to(omega1);
  s.cfg_.female_initial = cfg.female_initial.restricted_to(omega1);
  s.cfg_.male_initial = cfg.male_initial.restricted_to(omega2);
  s.bmax_ = cfg.declared_bmax.value_or(cfg.fertility.bound());
  s.omega_ = std::max(omega1, omega2);
  s.grid_.h = cfg.h;
  s.grid_.age_steps = static_cast<int>(std::ceil(s.omega_ / cfg.h - 1e-9));
  s.grid_.time_steps = static_cast<int>(*grid_steps(cfg.t_max, cfg.h));
  return s;
}

}  // namespace agequeue

namespace agequeue {

std::vector<std::int64_t> initial_bin_counts(const Scenario& s, Sex sex) {
  const auto& d = s.initial(sex);
  const double h = s.config().h;
  const double end = d.support_end();
  if (!(end > 0.0)) return {};
  const auto bins = static_cast<std::size_t>(std::ceil(std::min(end, s.survival(sex).max_age()) / h - 1e-9));
  const double n = static_cast<double>(s.config().N);
  std::vector<double> quota(bins);
  double total = 0.0;
  for (std::size_t j = 0; j < bins; ++j) {
    quota[j] = n * d.mass(j * h, (j + 1) * h);
    total += quota[j];
  }
  std::vector<std::int64_t> counts(bins);
  std::vector<std::pair<double, std::size_t>> remainders(bins);
  std::int64_t assigned = 0;
  for (std::size_t j = 0; j < bins; ++j) {
    const double f = std::floor(quota[j]);
    counts[j] = static_cast<std::int64_t>(f);
    assigned += counts[j];
    remainders[j] = {quota[j] - f, j};
  }
  std::int64_t left = std::llround(total) - assigned;
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; left > 0 && i < remainders.size(); ++i, --left) {
    ++counts[remainders[i].second];
  }
  return counts;
}

}  // namespace agequeue
