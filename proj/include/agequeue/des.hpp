#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "agequeue/rng.hpp"
#include "agequeue/scenario.hpp"

namespace agequeue {

struct Individual {
  Sex sex;
  double birth_time;
  double death_time;

  double age(double t) const { return t - birth_time; }
};

/// Alive counts per age bin [edges[k], edges[k+1]) at one time.
struct BinnedCounts {
  double time = 0.0;
  std::vector<double> edges;
  std::vector<std::int64_t> female;
  std::vector<std::int64_t> male;

  std::int64_t total(Sex sex) const;
};

/// Exact simulator state: alive individuals, clock, pending events.
/// Every alive individual has death_time > time().
class PopulationState {
 public:
  double time() const { return time_; }
  const std::vector<Individual>& alive() const { return alive_; }
  std::size_t count(Sex sex) const;
  std::size_t pending_events() const { return queue_.size(); }

 private:
  friend PopulationState init_population(const Scenario& s, Rng& rng);
  friend void advance_population(PopulationState& state, const Scenario& s, Rng& rng, double t);

  struct Event {
    double time;
    bool birth;  // false: death
    std::uint64_t seq;
    std::uint64_t id;

    bool operator>(const Event& o) const {
      if (time != o.time) return time > o.time;
      if (birth != o.birth) return birth;  // deaths first at ties
      return seq > o.seq;
    }
  };

  void add(const Individual& person, Rng& rng, double bmax);
  void remove(std::uint64_t id);

  double time_ = 0.0;
  std::vector<Individual> alive_;
  std::vector<std::uint64_t> ids_;        // ids_[i] is the id of alive_[i]
  std::vector<std::int64_t> position_;    // id -> index in alive_, -1 when dead
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
};

/// Deterministic placement of initial_bin_counts at bin midpoints; residual
/// lifetimes drawn from S(a + .) / S(a).
PopulationState init_population(const Scenario& s, Rng& rng);

/// Processes every event with time <= t and moves the clock to t.
///
/// Deaths happen at their pre-drawn times. Each female carries a candidate
/// birth clock at the dominating rate b_max; a ring at time u is accepted
/// with probability b(age, u) / b_max and creates a newborn of age 0, female
/// with probability r, with a fresh lifetime. Deaths precede births at ties.
void advance_population(PopulationState& state, const Scenario& s, Rng& rng, double t);

/// Alive counts by age t - birth_time; edges must be strictly increasing.
BinnedCounts bin_counts(const PopulationState& state, double t, std::span<const double> edges);

/// One trajectory observed at `observe_times` (sorted grid times).
std::vector<BinnedCounts> run(const Scenario& s, Rng& rng, std::span<const double> observe_times,
                              std::span<const double> edges);

using Ensemble = std::vector<std::vector<BinnedCounts>>;

/// Replications 0..R-1, replication i seeded by stream_seed(seed, i).
/// OpenMP over replications; output is independent of the worker count.
Ensemble run_ensemble(const Scenario& s, std::span<const double> observe_times,
                      std::span<const double> edges, int replications, std::uint64_t seed);

/// Single-threaded reference for run_ensemble.
Ensemble run_ensemble_serial(const Scenario& s, std::span<const double> observe_times,
                             std::span<const double> edges, int replications, std::uint64_t seed);

/// Bin edges 0, w, 2w, ..., max_age of an observation plan.
std::vector<double> observation_edges(const ObservationPlan& plan);

}  // namespace agequeue
