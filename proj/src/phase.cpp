#include "agequeue/phase.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "agequeue/parallel.hpp"

namespace agequeue {

int phase_truncation(const SurvivalModel& s, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("phase rate must be positive");
  return static_cast<int>(std::ceil(s.max_age() * mu)) + 1;
}

double phase_continue_prob(const SurvivalModel& s, double mu, int i) {
  if (i < 1) throw std::invalid_argument("phase index starts at 1");
  if (!(mu > 0.0)) throw std::invalid_argument("phase rate must be positive");
  const double prev = s.survival((i - 1) / mu);
  if (prev <= 0.0) return 0.0;
  return s.survival(i / mu) / prev;
}

double phase_count_pmf(const SurvivalModel& s, double mu, int n) {
  if (n < 1) throw std::invalid_argument("phase count starts at 1");
  return s.survival((n - 1) / mu) - s.survival(n / mu);
}

PhaseModel build_phase_model(const SurvivalModel& s, double mu) {
  PhaseModel m;
  m.mu = mu;
  const int n = phase_truncation(s, mu);
  m.continue_probs.resize(n);
  for (int i = 1; i <= n; ++i) m.continue_probs[i - 1] = phase_continue_prob(s, mu, i);
  return m;
}

double ph_mean_service(const SurvivalModel& s, double mu) {
  const int n_max = phase_truncation(s, mu);
  double mean = 0.0;
  for (int n = 1; n <= n_max; ++n) mean += n * phase_count_pmf(s, mu, n);
  return mean / mu;
}

double ph_service_cdf(const SurvivalModel& s, double mu, double x) {
  if (!(x > 0.0)) return 0.0;
  const int n_max = phase_truncation(s, mu);
  const double lambda = mu * x;
  const double spread = 12.0 * std::sqrt(lambda) + 12.0;
  const long first = std::max(0L, static_cast<long>(std::floor(lambda - spread)));
  const long last = std::min(static_cast<long>(n_max), static_cast<long>(std::ceil(lambda + spread)));
  if (first >= n_max) return 1.0;

  // Erlang(n)(x) = P(Poisson(lambda) >= n) is 1 for n <= first to within the
  // dropped tail, so those phase counts contribute P(nu <= first) in bulk.
  double cdf = 1.0 - s.survival(first / mu);
  double poisson = std::exp(-lambda + first * std::log(lambda) - std::lgamma(first + 1.0));
  double cumulative = 0.0;
  for (long n = first + 1; n <= last; ++n) {
    cumulative += poisson;  // sum of Poisson terms first .. n-1
    cdf += phase_count_pmf(s, mu, static_cast<int>(n)) * std::max(0.0, 1.0 - cumulative);
    poisson *= lambda / n;
  }
  return std::clamp(cdf, 0.0, 1.0);
}

std::vector<double> ph_service_cdf_grid(const SurvivalModel& s, double mu, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  const auto n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(worker_count())
  for (long i = 0; i < n; ++i) out[i] = ph_service_cdf(s, mu, xs[i]);
  return out;
}

std::vector<double> ph_service_cdf_grid_serial(const SurvivalModel& s, double mu,
                                               std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(ph_service_cdf(s, mu, x));
  return out;
}

std::vector<double> phase_check_ages(const SurvivalModel& s, int points) {
  const double end = std::min(s.max_age(), s.quantile(1e-10));
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = end * i / (points - 1);
  return xs;
}

double ph_ks_distance(const SurvivalModel& s, double mu, std::span<const double> xs) {
  const auto ph = ph_service_cdf_grid(s, mu, xs);
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ks = std::max(ks, std::abs(ph[i] - (1.0 - s.survival(xs[i]))));
  }
  return ks;
}

std::int64_t PhaseState::total(Sex sex) const {
  const auto& v = sex == Sex::female ? female : male;
  std::int64_t n = 0;
  for (auto c : v) n += c;
  return n;
}

PhaseState initial_phase_state(const Scenario& s, double mu1, double mu2) {
  PhaseState st;
  const double h = s.config().h;
  auto place = [&](Sex sex, double mu, std::vector<std::int64_t>& occ) {
    occ.assign(phase_truncation(s.survival(sex), mu), 0);
    const auto counts = initial_bin_counts(s, sex);
    for (std::size_t j = 0; j < counts.size(); ++j) {
      const double age = (j + 0.5) * h;
      const auto phase = std::min<std::size_t>(static_cast<std::size_t>(std::floor(age * mu)), occ.size() - 1);
      occ[phase] += counts[j];
    }
  };
  place(Sex::female, mu1, st.female);
  place(Sex::male, mu2, st.male);
  return st;
}

namespace {

struct PhaseEvent {
  double time;
  std::uint64_t seq;
  std::uint32_t who;
  bool birth;  // false: phase completion

  bool operator>(const PhaseEvent& o) const {
    if (time != o.time) return time > o.time;
    if (birth != o.birth) return birth;  // completions (departures) first at ties
    return seq > o.seq;
  }
};

struct Occupant {
  Sex sex;
  int phase;  // 1-based
  bool alive;
};

}  // namespace

PhaseTrajectory simulate_phase_system(const Scenario& s, double mu1, double mu2,
                                      const PhaseState& initial, double horizon,
                                      std::span<const double> sample_times, Rng& rng) {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw std::invalid_argument("phase rates must be positive");
  if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
    throw std::invalid_argument("sample times must be sorted");
  }
  const PhaseModel female_model = build_phase_model(s.survival(Sex::female), mu1);
  const PhaseModel male_model = build_phase_model(s.survival(Sex::male), mu2);
  const double bmax = s.bmax();
  const double r = s.config().r;

  PhaseTrajectory traj;
  std::vector<Occupant> occupants;
  std::vector<std::int64_t> female(female_model.n_max(), 0);
  std::vector<std::int64_t> male(male_model.n_max(), 0);
  std::int64_t alive_female = 0;
  std::int64_t alive_male = 0;
  std::priority_queue<PhaseEvent, std::vector<PhaseEvent>, std::greater<>> queue;
  std::uint64_t seq = 0;
  double now = 0.0;

  auto add = [&](Sex sex, int phase) {
    const auto id = static_cast<std::uint32_t>(occupants.size());
    occupants.push_back({sex, phase, true});
    const double mu = sex == Sex::female ? mu1 : mu2;
    queue.push({now + rng.exponential(mu), seq++, id, false});
    if (sex == Sex::female) {
      ++female[phase - 1];
      ++alive_female;
      if (bmax > 0.0) queue.push({now + rng.exponential(bmax), seq++, id, true});
    } else {
      ++male[phase - 1];
      ++alive_male;
    }
  };

  auto seed_from = [&](Sex sex, const std::vector<std::int64_t>& occ) {
    const int limit = sex == Sex::female ? female_model.n_max() : male_model.n_max();
    for (std::size_t i = 0; i < occ.size(); ++i) {
      if (occ[i] < 0) throw std::invalid_argument("negative phase occupancy");
      if (occ[i] > 0 && static_cast<int>(i) >= limit) throw std::invalid_argument("occupancy beyond n_max");
      for (std::int64_t c = 0; c < occ[i]; ++c) add(sex, static_cast<int>(i) + 1);
    }
  };
  seed_from(Sex::female, initial.female);
  seed_from(Sex::male, initial.male);

  std::size_t next_sample = 0;
  auto advance = [&](double t) {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t) {
      const double ts = sample_times[next_sample++];
      if (ts > horizon) break;
      traj.samples.push_back({ts, female, male});
    }
    traj.female_occupancy_time += (t - now) * static_cast<double>(alive_female);
    traj.male_occupancy_time += (t - now) * static_cast<double>(alive_male);
    now = t;
  };

  while (!queue.empty() && queue.top().time <= horizon) {
    const PhaseEvent ev = queue.top();
    queue.pop();
    Occupant& o = occupants[ev.who];
    if (!o.alive) continue;
    advance(ev.time);
    if (ev.birth) {
      const double rate = s.fertility().rate(o.phase / mu1, now);
      if (rng.uniform() * bmax < rate) {
        ++traj.births;
        add(rng.bernoulli(r) ? Sex::female : Sex::male, 1);
      }
      queue.push({now + rng.exponential(bmax), seq++, ev.who, true});
      continue;
    }
    const PhaseModel& model = o.sex == Sex::female ? female_model : male_model;
    auto& occ = o.sex == Sex::female ? female : male;
    --occ[o.phase - 1];
    if (rng.uniform() < model.q(o.phase)) {
      ++o.phase;
      ++occ[o.phase - 1];
      queue.push({now + rng.exponential(model.mu), seq++, ev.who, false});
    } else {
      o.alive = false;
      ++traj.departures;
      if (o.sex == Sex::female) {
        --alive_female;
      } else {
        --alive_male;
      }
    }
  }
  advance(horizon);
  return traj;
}

PhaseTrajectory simulate_phase_system(const Scenario& s, double mu1, double mu2, double horizon,
                                      std::span<const double> sample_times, Rng& rng) {
  return simulate_phase_system(s, mu1, mu2, initial_phase_state(s, mu1, mu2), horizon, sample_times, rng);
}

}  // namespace agequeue
