#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "agequeue/meanfield.hpp"
#include "agequeue/moments.hpp"
#include "support.hpp"

using namespace agequeue;
using doctest::Approx;

namespace {

struct Solved {
  Scenario scenario;
  MeanField mf;
  MomentField f;
};

Solved solve(const ScenarioConfig& c, MomentOptions opt = {}) {
  Scenario s = validate_scenario(c);
  MeanField mf = solve_meanfield(s);
  MomentField f = solve_moments(s, mf.density, opt);
  return {std::move(s), std::move(mf), std::move(f)};
}

double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// Stationary toy closed forms (S = e^{-x}, g = e^{-x}, beta = 2, r = 1/2).
double toy_r1(double x, double t) {
  return x < t ? std::exp(-2.0 * x) * (std::exp(x) - 1.0 - x) : std::exp(-x) * (1.0 - std::exp(-t) * (1.0 + t));
}

// sigma1^2(t) = e^{-2t} int_0^t e^{2y} (r phi + 2 r int r1(x,y) b dx) dy, phi = 1.
double toy_sigma1_zero(double t) {
  auto births = [](double y) {
    return 2.0 * (simpson([y](double x) { return toy_r1(x, y); }, 0.0, y, 200) +
                  simpson([y](double x) { return toy_r1(x, y); }, y, 40.0, 2000));
  };
  return std::exp(-2.0 * t) * simpson([&](double y) { return std::exp(2.0 * y) * (0.5 + births(y)); }, 0.0, t, 200);
}

}  // namespace

TEST_SUITE("moment fields") {
  TEST_CASE("stationary toy sigma1^2 and sigma2^2 below the diagonal") {
    const Solved s = solve(testing::stationary_toy(2.0, 0.01));
    const auto& g = s.f.grid;
    const int k = g.time_index(2.0), j = g.age_index(1.0);
    CHECK(s.f.sigma1_sq_age.at(k, j) == Approx(0.2325441579).epsilon(1e-3));
    CHECK(s.f.sigma2_sq_age.at(k, j) == Approx(0.2325441579).epsilon(1e-3));
    // above the diagonal the initial cohort thins binomially: e^{-x} (1 - e^{-t})
    const int k1 = g.time_index(1.0), j3 = g.age_index(3.0);
    CHECK(s.f.sigma1_sq_age.at(k1, j3) == Approx(std::exp(-3.0) * (1.0 - std::exp(-1.0))).epsilon(1e-3));
  }

  TEST_CASE("r1 against the closed form") {
    const Solved s = solve(testing::stationary_toy(2.0, 0.01));
    const auto& g = s.f.grid;
    CHECK(s.f.r1.at(g.time_index(2.0), g.age_index(1.0)) == Approx(0.0972088747).epsilon(0.01));
    CHECK(s.f.r1.at(g.time_index(1.0), g.age_index(3.0)) == Approx(toy_r1(3.0, 1.0)).epsilon(0.01));
  }

  TEST_CASE("r12 against the closed form") {
    // 0.25 e^{-4} ((e^3 - 1)/3 - (e^2 - 1)/2)
    const Solved s = solve(testing::stationary_toy(2.0, 0.01));
    CHECK(s.f.r12.at(s.f.grid.time_index(2.0), s.f.grid.age_index(1.0)) == Approx(0.0145028613).epsilon(0.01));
  }

  TEST_CASE("sigma1^2(t) against independent quadrature") {
    const Solved s = solve(testing::stationary_toy(2.0, 0.01));
    CHECK(s.f.sigma1_sq[s.f.grid.time_index(1.0)] == Approx(toy_sigma1_zero(1.0)).epsilon(0.01));
  }

  TEST_CASE("initial and boundary zeros hold exactly") {
    const Solved s = solve(testing::stationary_toy(2.0, 0.05));
    const auto& g = s.f.grid;
    for (const GridField* field : {&s.f.sigma1_sq_age, &s.f.sigma2_sq_age, &s.f.r1, &s.f.r12}) {
      for (int j = 0; j < g.ages(); ++j) CHECK(field->at(0, j) == 0.0);
      for (int k = 0; k < g.times(); ++k) CHECK(field->at(k, 0) == 0.0);
    }
    CHECK(s.f.sigma1_sq[0] == 0.0);
    CHECK(s.f.sigma2_sq[0] == 0.0);
    CHECK(s.f.sigma12_sq[0] == 0.0);
    for (double v : s.f.r2.data()) CHECK(v == 0.0);
    for (double v : s.f.sigma12_sq_age.data()) CHECK(v == 0.0);
  }

  TEST_CASE("diagonal densities are non-negative") {
    ScenarioConfig c = testing::stationary_toy(3.0, 0.05);
    c.female_survival = SurvivalModel::weibull(2.0, 3.0, 40.0);
    c.fertility = FertilitySchedule::window(0.5, 3.0, 3.0);
    const Solved s = solve(c);
    for (double v : s.f.sigma1_sq_age.data()) CHECK(v >= -1e-12);
    for (double v : s.f.sigma2_sq_age.data()) CHECK(v >= -1e-12);
  }

  TEST_CASE("no fertility: mixed terms and atoms vanish") {
    const Solved s = solve(testing::binomial_scenario());
    for (double v : s.f.r1.data()) CHECK(v == 0.0);
    for (double v : s.f.r12.data()) CHECK(v == 0.0);
    for (double v : s.f.sigma1_sq) CHECK(v == 0.0);
    for (double v : s.f.sigma12_sq) CHECK(v == 0.0);
  }

  TEST_CASE("zero density, zero moments") {
    ScenarioConfig c = testing::binomial_scenario();
    c.female_initial = InitialDensity::zero();
    const Solved s = solve(c);
    for (double v : s.f.sigma1_sq_age.data()) CHECK(v == 0.0);
    for (const auto& e : check_system24(s.f, s.scenario, s.mf.density)) CHECK(e.max_norm == 0.0);
  }

  TEST_CASE("parallel solve equals the serial reference") {
    const Scenario sc = validate_scenario(testing::stationary_toy(2.0, 0.05));
    const MeanField mf = solve_meanfield(sc);
    const MomentField a = solve_moments(sc, mf.density);
    const MomentField b = solve_moments_serial(sc, mf.density);
    CHECK(a.sigma1_sq_age.data() == b.sigma1_sq_age.data());
    CHECK(a.r1.data() == b.r1.data());
    CHECK(a.r12.data() == b.r12.data());
    CHECK(a.sigma1_sq == b.sigma1_sq);
  }

  TEST_CASE("the printed reading agrees where the field is stationary") {
    const Solved a = solve(testing::stationary_toy(2.0, 0.05));
    MomentOptions printed;
    printed.reading = MomentReading::as_printed;
    const Solved b = solve(testing::stationary_toy(2.0, 0.05), printed);
    const auto& g = a.f.grid;
    for (int k = 0; k < g.times(); k += 7) {
      for (int j = 0; j < g.ages(); j += 11) {
        CHECK(b.f.sigma1_sq_age.at(k, j) == Approx(a.f.sigma1_sq_age.at(k, j)).epsilon(2e-3));
        if (j < k) CHECK(b.f.r1.at(k, j) == Approx(a.f.r1.at(k, j)).epsilon(2e-3));
      }
    }
  }

  TEST_CASE("the printed reading is not binomial without births") {
    // Frozen-time integrands lose the initial-cohort history; the
    // characteristic reading keeps it.
    MomentOptions printed;
    printed.reading = MomentReading::as_printed;
    const Solved a = solve(testing::binomial_scenario());
    const Solved b = solve(testing::binomial_scenario(), printed);
    const std::vector<double> edges{1.0, 2.0};
    const double p = std::exp(-1.0);
    CHECK(bin_variance_prediction(a.f, edges, 1.0, 1000).female[0] == Approx(1000.0 * p * (1 - p)).epsilon(0.01));
    CHECK(std::abs(bin_variance_prediction(b.f, edges, 1.0, 1000).female[0] - 1000.0 * p * (1 - p)) > 50.0);
  }

  TEST_CASE("infinite initial slope is rejected") {
    ScenarioConfig c = testing::stationary_toy(2.0, 0.05);
    c.female_survival = SurvivalModel::weibull(0.5, 1.0, 800.0);
    const Scenario s = validate_scenario(c);
    const MeanField mf = solve_meanfield(s);
    CHECK_THROWS_AS(solve_moments(s, mf.density), std::invalid_argument);
  }
}

TEST_SUITE("moment residuals") {
  TEST_CASE("transport residuals shrink under refinement") {
    const Solved a = solve(testing::stationary_toy(2.0, 0.05));
    const Solved b = solve(testing::stationary_toy(2.0, 0.025));
    const auto ra = check_system24(a.f, a.scenario, a.mf.density);
    const auto rb = check_system24(b.f, b.scenario, b.mf.density);
    REQUIRE(ra.size() == 10);
    for (std::size_t i = 0; i < ra.size(); ++i) {
      const auto& name = ra[i].name;
      CAPTURE(name);
      if (name == "r2" || name == "sigma12_sq(x,t)") {
        CHECK(ra[i].max_norm == 0.0);
      } else if (name.rfind("r12", 0) != 0) {
        CHECK(ra[i].max_norm / rb[i].max_norm == Approx(2.0).epsilon(0.2));
      }
    }
  }

  TEST_CASE("the r12 closed form solves neither printed r12 equation") {
    // Characterization: the residual stays O(1) under refinement.
    const Solved a = solve(testing::stationary_toy(2.0, 0.05));
    const Solved b = solve(testing::stationary_toy(2.0, 0.025));
    const auto ra = check_system24(a.f, a.scenario, a.mf.density);
    const auto rb = check_system24(b.f, b.scenario, b.mf.density);
    for (std::size_t i = 0; i < ra.size(); ++i) {
      if (ra[i].name.rfind("r12", 0) == 0) {
        CHECK(rb[i].max_norm > 0.02);
        CHECK(ra[i].max_norm / rb[i].max_norm < 1.2);
      }
    }
  }
}

TEST_SUITE("bin variances") {
  TEST_CASE("stationary toy bin away from zero") {
    const Solved s = solve(testing::stationary_toy(2.0, 0.05));
    const std::vector<double> edges{0.75, 1.25};
    const auto v = bin_variance_prediction(s.f, edges, 3.0, 1000);
    CHECK(v.female[0] == Approx(115.3391751).epsilon(5e-3));
    CHECK(v.cross[0][0] == 0.0);
  }

  TEST_CASE("binomial bin") {
    const Solved s = solve(testing::binomial_scenario());
    const std::vector<double> edges{1.0, 2.0};
    CHECK(bin_variance_prediction(s.f, edges, 1.0, 1000).female[0] == Approx(232.5441579).epsilon(0.01));
    const auto zero = bin_variance_prediction(s.f, std::vector<double>{0.0, 1.0, 2.0}, 0.0, 1000);
    for (double v : zero.female) CHECK(v == 0.0);
  }

  TEST_CASE("zero-age bin carries the atom and the marginals") {
    const Solved s = solve(testing::stationary_toy(2.0, 0.05));
    const auto c = cross_correlation(s.f, Pair::female_female, 3.0);
    const double h = s.f.grid.h;
    const double expected = c.atom + 2.0 * bin_integral(c.marginal, h, 0.0, 0.5) + bin_integral(c.diagonal, h, 0.0, 0.5);
    CHECK(c.bin_covariance(0.0, 0.5, 0.0, 0.5) == Approx(expected));
    const auto v = bin_variance_prediction(s.f, std::vector<double>{0.0, 0.5}, 3.0, 1000);
    CHECK(v.female[0] == Approx(1000.0 * expected));
  }

  TEST_CASE("covariances are symmetric") {
    const Solved s = solve(testing::stationary_toy(2.0, 0.05));
    for (Pair p : {Pair::female_female, Pair::male_male, Pair::female_male}) {
      const auto c = cross_correlation(s.f, p, 2.0);
      CHECK(c.bin_covariance(0.0, 0.5, 0.25, 1.0) == c.bin_covariance(0.25, 1.0, 0.0, 0.5));
      CHECK(c.bin_covariance(0.0, 1.0, 2.0, 3.0) == c.bin_covariance(2.0, 3.0, 0.0, 1.0));
    }
  }

  TEST_CASE("misaligned bins are rejected") {
    const Solved s = solve(testing::stationary_toy(2.0, 0.05));
    CHECK_THROWS_AS(bin_variance_prediction(s.f, std::vector<double>{0.0, 0.33}, 1.0, 1000), std::invalid_argument);
  }
}
