#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agequeue/fertility.hpp"
#include "agequeue/initial_density.hpp"
#include "agequeue/survival.hpp"

namespace agequeue {

enum class Sex { female, male };

/// Which DES observations feed the Monte Carlo comparisons.
struct ObservationPlan {
  double bin_width = 1.0;
  double max_age = 10.0;
  std::vector<double> times;
};

/// Pass thresholds of the Monte Carlo reports.
struct Thresholds {
  double z_mean = 3.0;
  double z_variance = 3.0;
  double z_normal = 4.0;
  double mean_floor = 0.95;
  double variance_floor = 0.95;
  double normality_floor = 0.90;
};

/// Full model instance as read from a scenario file.
struct ScenarioConfig {
  SurvivalModel female_survival;
  SurvivalModel male_survival;
  FertilitySchedule fertility;
  std::optional<double> declared_bmax;
  double r = 0.5;
  std::int64_t N = 1000;
  InitialDensity female_initial;
  InitialDensity male_initial;
  double t_max = 5.0;
  double h = 0.25;
  std::uint64_t seed = 1;
  int replications = 100;
  ObservationPlan observation;
  /// Evaluate the renewal kernel at the mother's birth cohort time
  /// b(y, t - y) instead of b(y, t). Sensitivity switch, off by default.
  bool fertility_kernel_lagged = false;
  Thresholds thresholds;
};

/// Aggregated validation failure; each entry is "field.path: message".
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Uniform grid with one step h in age and time: x_j = j h, t_k = k h.
struct AgeTimeGrid {
  double h = 0.25;
  int age_steps = 0;   // J, with J h >= max age
  int time_steps = 0;  // K = t_max / h

  double age(int j) const { return j * h; }
  double time(int k) const { return k * h; }
  int ages() const { return age_steps + 1; }
  int times() const { return time_steps + 1; }
  /// Index of a grid time; throws std::invalid_argument off grid.
  int time_index(double t) const;
  /// Index of a grid age (may exceed age_steps); throws off grid.
  int age_index(double x) const;
};

/// A ScenarioConfig that passed validation. Immutable.
class Scenario {
 public:
  const ScenarioConfig& config() const { return cfg_; }
  const SurvivalModel& survival(Sex s) const {
    return s == Sex::female ? cfg_.female_survival : cfg_.male_survival;
  }
  const InitialDensity& initial(Sex s) const {
    return s == Sex::female ? cfg_.female_initial : cfg_.male_initial;
  }
  const FertilitySchedule& fertility() const { return cfg_.fertility; }
  /// Dominating birth rate for thinning.
  double bmax() const { return bmax_; }
  double omega() const { return omega_; }
  AgeTimeGrid grid() const { return grid_; }

 private:
  friend Scenario validate_scenario(const ScenarioConfig& cfg);
  ScenarioConfig cfg_;
  double bmax_ = 0.0;
  double omega_ = 0.0;
  AgeTimeGrid grid_;
};

/// Every violated invariant, with its field path. Empty when valid.
std::vector<std::string> scenario_errors(const ScenarioConfig& cfg);

/// Checks all invariants and normalizes: fertility and initial densities
/// are cut at the female / per-sex maximum age. Throws ScenarioError.
Scenario validate_scenario(const ScenarioConfig& cfg);

/// Returns k such that |t - k h| is within round-off, or nullopt.
std::optional<long> grid_steps(double t, double h);

}  // namespace agequeue

namespace agequeue {

/// Deterministic initial placement: bin j = [j h, (j+1) h) receives the
/// largest-remainder rounding of N times the exact density mass of the bin.
/// The total equals round(N * total mass).
std::vector<std::int64_t> initial_bin_counts(const Scenario& s, Sex sex);

}  // namespace agequeue
