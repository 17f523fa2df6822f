// Wall-clock comparison of the OpenMP kernels with their serial references.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "agequeue/des.hpp"
#include "agequeue/meanfield.hpp"
#include "agequeue/moments.hpp"
#include "agequeue/parallel.hpp"
#include "agequeue/phase.hpp"

using namespace agequeue;

namespace {

double seconds(const std::function<void()>& f, int repeats) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-22s serial %9.4f s   parallel %9.4f s   speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

Scenario toy(double h) {
  ScenarioConfig c;
  c.female_survival = SurvivalModel::exponential(1.0, 40.0);
  c.male_survival = SurvivalModel::exponential(1.0, 40.0);
  c.fertility = FertilitySchedule::constant(2.0);
  c.r = 0.5;
  c.N = 1000;
  c.female_initial = InitialDensity::exponential(1.0, 1.0);
  c.male_initial = InitialDensity::exponential(1.0, 1.0);
  c.t_max = 5.0;
  c.h = h;
  c.observation = {1.0, 10.0, {1.0, 3.0, 5.0}};
  return validate_scenario(c);
}

}  // namespace

int main() {
  std::printf("workers: %d\n", worker_count());

  const Scenario des_scn = toy(0.25);
  const auto edges = observation_edges(des_scn.config().observation);
  const auto& times = des_scn.config().observation.times;
  report("des ensemble (R=200)",
         seconds([&] { run_ensemble_serial(des_scn, times, edges, 200, 7); }, 3),
         seconds([&] { run_ensemble(des_scn, times, edges, 200, 7); }, 3));

  const auto weib = SurvivalModel::weibull(2.0, 1.0, 10.0);
  const auto xs = phase_check_ages(weib, 2000);
  report("ph cdf grid (mu=100)",
         seconds([&] { ph_service_cdf_grid_serial(weib, 100.0, xs); }, 3),
         seconds([&] { ph_service_cdf_grid(weib, 100.0, xs); }, 3));

  const Scenario fine = toy(0.01);
  const MeanField mf = solve_meanfield(fine);
  report("moments (h=0.01)",
         seconds([&] { solve_moments_serial(fine, mf.density); }, 3),
         seconds([&] { solve_moments(fine, mf.density); }, 3));
  return 0;
}
