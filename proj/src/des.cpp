#include "agequeue/des.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "agequeue/parallel.hpp"

namespace agequeue {

std::int64_t BinnedCounts::total(Sex sex) const {
  std::int64_t n = 0;
  for (auto c : sex == Sex::female ? female : male) n += c;
  return n;
}

std::size_t PopulationState::count(Sex sex) const {
  return static_cast<std::size_t>(
      std::count_if(alive_.begin(), alive_.end(), [sex](const Individual& p) { return p.sex == sex; }));
}

void PopulationState::add(const Individual& person, Rng& rng, double bmax) {
  const std::uint64_t id = position_.size();
  position_.push_back(static_cast<std::int64_t>(alive_.size()));
  alive_.push_back(person);
  ids_.push_back(id);
  queue_.push({person.death_time, false, seq_++, id});
  if (person.sex == Sex::female && bmax > 0.0) {
    const double candidate = std::max(time_, person.birth_time) + rng.exponential(bmax);
    if (candidate < person.death_time) queue_.push({candidate, true, seq_++, id});
  }
}

void PopulationState::remove(std::uint64_t id) {
  const auto i = static_cast<std::size_t>(position_[id]);
  const std::size_t last = alive_.size() - 1;
  if (i != last) {
    alive_[i] = alive_[last];
    ids_[i] = ids_[last];
    position_[ids_[i]] = static_cast<std::int64_t>(i);
  }
  alive_.pop_back();
  ids_.pop_back();
  position_[id] = -1;
}

PopulationState init_population(const Scenario& s, Rng& rng) {
  PopulationState state;
  const double h = s.config().h;
  for (Sex sex : {Sex::female, Sex::male}) {
    const auto& surv = s.survival(sex);
    const auto counts = initial_bin_counts(s, sex);
    for (std::size_t j = 0; j < counts.size(); ++j) {
      const double age = (j + 0.5) * h;
      for (std::int64_t c = 0; c < counts[j]; ++c) {
        const double residual = surv.residual_quantile(age, rng.uniform());
        state.add({sex, -age, residual}, rng, s.bmax());
      }
    }
  }
  return state;
}

void advance_population(PopulationState& state, const Scenario& s, Rng& rng, double t) {
  if (t < state.time_) throw std::invalid_argument("cannot move the population clock backwards");
  const double bmax = s.bmax();
  const double r = s.config().r;
  while (!state.queue_.empty() && state.queue_.top().time <= t) {
    const auto ev = state.queue_.top();
    state.queue_.pop();
    state.time_ = ev.time;
    if (!ev.birth) {
      state.remove(ev.id);
      continue;
    }
    const Individual mother = state.alive_[static_cast<std::size_t>(state.position_[ev.id])];
    const double rate = s.fertility().rate(mother.age(ev.time), ev.time);
    if (rng.uniform() * bmax < rate) {
      const Sex sex = rng.bernoulli(r) ? Sex::female : Sex::male;
      const double lifetime = sample_lifetime(s.survival(sex), rng);
      state.add({sex, ev.time, ev.time + lifetime}, rng, bmax);
    }
    const double next = ev.time + rng.exponential(bmax);
    if (next < mother.death_time) state.queue_.push({next, true, state.seq_++, ev.id});
  }
  state.time_ = t;
}

BinnedCounts bin_counts(const PopulationState& state, double t, std::span<const double> edges) {
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (!(edges[k] > edges[k - 1])) throw std::invalid_argument("bin edges must be strictly increasing");
  }
  BinnedCounts out;
  out.time = t;
  out.edges.assign(edges.begin(), edges.end());
  const std::size_t bins = edges.empty() ? 0 : edges.size() - 1;
  out.female.assign(bins, 0);
  out.male.assign(bins, 0);
  if (bins == 0) return out;
  for (const auto& p : state.alive()) {
    if (!(p.death_time > t) || p.birth_time > t) continue;
    const double age = p.age(t);
    if (age < edges.front() || age >= edges.back()) continue;
    const auto k = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), age) - edges.begin()) - 1;
    ++(p.sex == Sex::female ? out.female : out.male)[k];
  }
  return out;
}

std::vector<BinnedCounts> run(const Scenario& s, Rng& rng, std::span<const double> observe_times,
                              std::span<const double> edges) {
  for (std::size_t i = 0; i < observe_times.size(); ++i) {
    const double t = observe_times[i];
    if (t < 0.0 || !grid_steps(t, s.config().h)) {
      throw std::invalid_argument("observe time " + std::to_string(t) + " is not a grid time");
    }
    if (i > 0 && !(t > observe_times[i - 1])) throw std::invalid_argument("observe times must increase");
  }
  PopulationState state = init_population(s, rng);
  std::vector<BinnedCounts> out;
  out.reserve(observe_times.size());
  for (double t : observe_times) {
    advance_population(state, s, rng, t);
    out.push_back(bin_counts(state, t, edges));
  }
  return out;
}

Ensemble run_ensemble(const Scenario& s, std::span<const double> observe_times,
                      std::span<const double> edges, int replications, std::uint64_t seed) {
  Ensemble out(static_cast<std::size_t>(std::max(replications, 0)));
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (int i = 0; i < replications; ++i) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    out[i] = run(s, rng, observe_times, edges);
  }
  return out;
}

Ensemble run_ensemble_serial(const Scenario& s, std::span<const double> observe_times,
                             std::span<const double> edges, int replications, std::uint64_t seed) {
  Ensemble out;
  for (int i = 0; i < replications; ++i) {
    Rng rng(stream_seed(seed, static_cast<std::uint64_t>(i)));
    out.push_back(run(s, rng, observe_times, edges));
  }
  return out;
}

std::vector<double> observation_edges(const ObservationPlan& plan) {
  const auto bins = grid_steps(plan.max_age, plan.bin_width);
  if (!bins || *bins < 1) throw std::invalid_argument("observation max_age must be a multiple of bin_width");
  std::vector<double> edges(static_cast<std::size_t>(*bins) + 1);
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k] = static_cast<double>(k) * plan.bin_width;
  return edges;
}

}  // namespace agequeue
