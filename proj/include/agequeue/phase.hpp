#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "agequeue/rng.hpp"
#include "agequeue/scenario.hpp"
#include "agequeue/survival.hpp"

namespace agequeue {

/// Phase-type approximation of a lifetime: exponential phases of rate mu,
/// continuing from phase i with probability q_i = S(i/mu) / S((i-1)/mu).
struct PhaseModel {
  double mu = 1.0;
  std::vector<double> continue_probs;  // q_1 .. q_{n_max}

  int n_max() const { return static_cast<int>(continue_probs.size()); }
  double q(int i) const { return i >= 1 && i <= n_max() ? continue_probs[i - 1] : 0.0; }
};

/// Phase truncation index ceil(omega mu) + 1.
int phase_truncation(const SurvivalModel& s, double mu);

/// q_i; 0 when phase i is unreachable (S((i-1)/mu) = 0).
double phase_continue_prob(const SurvivalModel& s, double mu, int i);

/// P(nu = n) = S((n-1)/mu) - S(n/mu).
double phase_count_pmf(const SurvivalModel& s, double mu, int n);

PhaseModel build_phase_model(const SurvivalModel& s, double mu);

/// E[nu] / mu by summation of the phase-count pmf.
double ph_mean_service(const SurvivalModel& s, double mu);

/// CDF of tau = tau_1 + ... + tau_nu: sum_n P(nu = n) Erlang(n, mu)(x).
/// Poisson terms outside mean +- 12 sd (+12) are dropped.
double ph_service_cdf(const SurvivalModel& s, double mu, double x);

/// ph_service_cdf over many ages; OpenMP over the ages.
std::vector<double> ph_service_cdf_grid(const SurvivalModel& s, double mu, std::span<const double> xs);
/// Single-threaded reference for ph_service_cdf_grid.
std::vector<double> ph_service_cdf_grid_serial(const SurvivalModel& s, double mu,
                                               std::span<const double> xs);

/// Evaluation ages for convergence checks: `points` equally spaced ages on
/// [0, x_end], x_end covering the support up to S < 1e-10.
std::vector<double> phase_check_ages(const SurvivalModel& s, int points);

/// sup over `xs` of |ph_service_cdf - (1 - S)|.
double ph_ks_distance(const SurvivalModel& s, double mu, std::span<const double> xs);

/// Occupancy of the phase system: n(i) type-1 and l(i) type-2 counts,
/// index i-1 for phase i.
struct PhaseState {
  double time = 0.0;
  std::vector<std::int64_t> female;
  std::vector<std::int64_t> male;

  std::int64_t total(Sex sex) const;
};

struct PhaseTrajectory {
  std::vector<PhaseState> samples;
  /// Time integrals of total occupancy over [0, horizon].
  double female_occupancy_time = 0.0;
  double male_occupancy_time = 0.0;
  std::int64_t births = 0;
  std::int64_t departures = 0;
};

/// Scenario initial densities mapped onto phases: the placement of
/// initial_bin_counts, someone aged a entering phase floor(a mu) + 1.
PhaseState initial_phase_state(const Scenario& s, double mu1, double mu2);

/// Continuous-time Markov chain of the phase system up to `horizon`,
/// sampled at `sample_times` (sorted, within [0, horizon]).
///
/// Next-reaction scheme: every occupant carries an exponential phase clock;
/// type-1 occupants also carry a birth clock at the dominating rate b_max,
/// whose rings are accepted with probability b(i/mu1, t) / b_max.
PhaseTrajectory simulate_phase_system(const Scenario& s, double mu1, double mu2,
                                      const PhaseState& initial, double horizon,
                                      std::span<const double> sample_times, Rng& rng);

PhaseTrajectory simulate_phase_system(const Scenario& s, double mu1, double mu2, double horizon,
                                      std::span<const double> sample_times, Rng& rng);

}  // namespace agequeue
