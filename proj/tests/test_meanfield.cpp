#include <doctest.h>

#include <cmath>
#include <vector>

#include "agequeue/meanfield.hpp"
#include "support.hpp"

using namespace agequeue;
using doctest::Approx;

namespace {

double max_phi_error(double beta, double h) {
  const Scenario s = validate_scenario(testing::stationary_toy(beta, h));
  const BirthFlow f = solve_phi(s);
  double worst = 0.0;
  for (int k = 0; k <= f.grid.time_steps; ++k) {
    worst = std::max(worst, std::abs(f.female[k] - 0.5 * beta * std::exp((0.5 * beta - 1.0) * f.grid.time(k))));
  }
  return worst;
}

}  // namespace

TEST_SUITE("birth flow") {
  TEST_CASE("no fertility, no births") {
    const Scenario s = validate_scenario(testing::binomial_scenario());
    const BirthFlow f = solve_phi(s);
    for (double v : f.female) CHECK(v == 0.0);
    for (double v : f.male) CHECK(v == 0.0);
  }

  TEST_CASE("stationary toy has a constant unit flow") {
    const BirthFlow f = solve_phi(validate_scenario(testing::stationary_toy(2.0, 0.05)));
    for (double v : f.female) CHECK(v == Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("growing toy at t = 1") {
    const Scenario s = validate_scenario(testing::stationary_toy(4.0, 0.01));
    const BirthFlow f = solve_phi(s);
    CHECK(std::abs(f.female[s.grid().time_index(1.0)] - 5.4365636569) <= 1e-3);
  }

  TEST_CASE("refinement reduces the error by at least 1.8x") {
    const double coarse = max_phi_error(4.0, 0.05);
    const double fine = max_phi_error(4.0, 0.025);
    CHECK(coarse / fine >= 1.8);
  }

  TEST_CASE("male flow is proportional to the female flow") {
    ScenarioConfig c = testing::stationary_toy(3.0, 0.05);
    c.r = 0.3;
    c.fertility = FertilitySchedule::window(0.5, 4.0, 3.0);
    const BirthFlow f = solve_phi(validate_scenario(c));
    for (std::size_t k = 0; k < f.female.size(); ++k) {
      CHECK(std::abs(f.male[k] * 0.3 - f.female[k] * 0.7) <= 1e-10 * std::max(1.0, f.female[k]));
    }
  }

  TEST_CASE("r = 0: the female flow vanishes and the male flow is explicit") {
    ScenarioConfig c = testing::stationary_toy(2.0, 0.05);
    c.r = 0.0;
    const BirthFlow f = solve_phi(validate_scenario(c));
    for (double v : f.female) CHECK(v == 0.0);
    // females only die out: varphi(t) = beta int e^{-x} e^{-t} dx = 2 e^{-t}
    CHECK(f.male[20] == Approx(2.0 * std::exp(-1.0)).epsilon(1e-3));
  }

  TEST_CASE("the lagged kernel is identical for time-invariant fertility") {
    ScenarioConfig c = testing::stationary_toy(2.0, 0.05);
    const BirthFlow a = solve_phi(validate_scenario(c));
    c.fertility_kernel_lagged = true;
    const BirthFlow b = solve_phi(validate_scenario(c));
    for (std::size_t k = 0; k < a.female.size(); ++k) CHECK(a.female[k] == Approx(b.female[k]).epsilon(1e-12));
  }

  TEST_CASE("the lagged kernel differs under a time factor") {
    ScenarioConfig c = testing::stationary_toy(2.0, 0.05);
    c.fertility = FertilitySchedule::constant(2.0).with_time_factor({{0.0, 1.0}, {5.0, 2.0}});
    c.declared_bmax = 4.0;
    const BirthFlow a = solve_phi(validate_scenario(c));
    c.fertility_kernel_lagged = true;
    const BirthFlow b = solve_phi(validate_scenario(c));
    CHECK(std::abs(a.female.back() - b.female.back()) > 1e-3);
  }
}

TEST_SUITE("densities") {
  TEST_CASE("stationary toy: g = m = e^{-x}") {
    const Scenario s = validate_scenario(testing::stationary_toy(2.0, 0.05));
    const MeanField mf = solve_meanfield(s);
    for (int k : {0, 20, 60, 100}) {
      for (int j : {0, 10, 20, 60, 100}) {
        const double x = mf.density.grid.age(j);
        CHECK(mf.density.g.at(k, j) == Approx(std::exp(-x)).epsilon(1e-3));
        CHECK(mf.density.m.at(k, j) == Approx(std::exp(-x)).epsilon(1e-3));
      }
    }
  }

  TEST_CASE("t = 0 reproduces the initial density") {
    const Scenario s = validate_scenario(testing::binomial_scenario());
    const MeanField mf = solve_meanfield(s);
    for (int j = 0; j < mf.density.grid.ages(); ++j) {
      CHECK(mf.density.g.at(0, j) == s.initial(Sex::female).value(mf.density.grid.age(j)));
    }
  }

  TEST_CASE("without births everyone is gone after the maximum age") {
    ScenarioConfig c = testing::binomial_scenario();
    c.female_survival = SurvivalModel::life_table({{0, 1}, {1, 0.5}, {2, 0}});
    c.t_max = 3.0;
    const MeanField mf = solve_meanfield(validate_scenario(c));
    for (int j = 0; j < mf.density.grid.ages(); ++j) CHECK(mf.density.g.at(mf.density.grid.time_steps, j) == 0.0);
  }

  TEST_CASE("r = 1: males are only the initial cohort") {
    ScenarioConfig c = testing::stationary_toy(1.0, 0.05);
    c.r = 1.0;
    const MeanField mf = solve_meanfield(validate_scenario(c));
    const auto& grid = mf.density.grid;
    for (int k : {20, 60}) {
      for (int j = 0; j < k; ++j) CHECK(mf.density.m.at(k, j) == 0.0);
      CHECK(mf.density.m.at(k, k + 5) == Approx(std::exp(-grid.age(k + 5))).epsilon(1e-12));
    }
  }

  TEST_CASE("mass is conserved without births") {
    const Scenario s = validate_scenario(testing::binomial_scenario(0.05));
    const MeanField mf = solve_meanfield(s);
    const auto& grid = mf.density.grid;
    // exponential lifetimes: the oracle is e^{-t} times the initial mass
    for (int k : {0, 5, 10, 20}) {
      const double mass = trapezoid(mf.density.g.row(k), grid.h);
      CHECK(std::abs(mass - std::exp(-grid.time(k))) <= 1e-3);
    }
  }

  TEST_CASE("inconsistent initial density is rejected") {
    ScenarioConfig c = testing::binomial_scenario();
    c.female_initial = InitialDensity::uniform(0.0, 50.0, 0.02);
    CHECK_THROWS_AS(validate_scenario(c), ScenarioError);
  }

  TEST_CASE("bin means") {
    const Scenario s = validate_scenario(testing::stationary_toy(2.0, 0.05));
    const MeanField mf = solve_meanfield(s);
    const std::vector<double> edges{0.75, 1.25};
    CHECK(mean_bin_counts(s, mf.density, Sex::female, 3.0, edges)[0] ==
          Approx(1000.0 * testing::exp_mass(0.75, 1.25)).epsilon(1e-3));
    const std::vector<double> off{0.76, 1.25};
    CHECK_THROWS_AS(mean_bin_counts(s, mf.density, Sex::female, 3.0, off), std::invalid_argument);
  }
}

TEST_SUITE("residuals") {
  TEST_CASE("stationary toy: first-order residual") {
    const Scenario a = validate_scenario(testing::stationary_toy(2.0, 0.05));
    const Scenario b = validate_scenario(testing::stationary_toy(2.0, 0.025));
    const double ra = transport_residual(solve_meanfield(a).density.g, a.survival(Sex::female), a.grid()).max_norm;
    const double rb = transport_residual(solve_meanfield(b).density.g, b.survival(Sex::female), b.grid()).max_norm;
    CHECK(ra <= 0.05);
    CHECK(ra / rb == Approx(2.0).epsilon(0.2));
  }

  TEST_CASE("zero field, zero residual") {
    const Scenario s = validate_scenario(testing::stationary_toy(2.0, 0.25));
    GridField zero(s.grid().times(), s.grid().ages());
    CHECK(transport_residual(zero, s.survival(Sex::female), s.grid()).max_norm == 0.0);
  }

  TEST_CASE("a corrupted node stands out") {
    const Scenario s = validate_scenario(testing::stationary_toy(2.0, 0.05));
    GridField g = solve_meanfield(s).density.g;
    const double baseline = transport_residual(g, s.survival(Sex::female), s.grid()).max_norm;
    g.at(40, 10) *= 2.0;
    const auto r = transport_residual(g, s.survival(Sex::female), s.grid());
    CHECK(std::abs(r.residual.at(40, 10)) > 10.0 * baseline);
    CHECK(r.worst_time == 40);
    CHECK(r.worst_age == 10);
  }

  TEST_CASE("boundary conditions") {
    const Scenario s = validate_scenario(testing::stationary_toy(2.0, 0.01));
    const MeanField mf = solve_meanfield(s);
    const auto bc = boundary_check(s, mf.density, mf.flow);
    CHECK(bc.female <= 1e-3);
    CHECK(bc.male <= 1e-3);

    const Scenario z = validate_scenario(testing::binomial_scenario());
    const MeanField mz = solve_meanfield(z);
    const auto bz = boundary_check(z, mz.density, mz.flow);
    CHECK(bz.female == 0.0);
    CHECK(bz.male == 0.0);

    ScenarioConfig c = testing::stationary_toy(1.0, 0.05);
    c.r = 1.0;
    const Scenario one = validate_scenario(c);
    const MeanField m1 = solve_meanfield(one);
    CHECK(boundary_check(one, m1.density, m1.flow).male == 0.0);
  }
}
