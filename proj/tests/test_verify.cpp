#include <doctest.h>

#include <cmath>
#include <vector>

#include "agequeue/des.hpp"
#include "agequeue/meanfield.hpp"
#include "agequeue/moments.hpp"
#include "agequeue/rng.hpp"
#include "agequeue/verify.hpp"
#include "support.hpp"

using namespace agequeue;
using doctest::Approx;

namespace {

BinnedCounts counts(double t, std::vector<std::int64_t> female, std::vector<std::int64_t> male) {
  BinnedCounts b;
  b.time = t;
  b.edges.resize(female.size() + 1);
  for (std::size_t i = 0; i < b.edges.size(); ++i) b.edges[i] = static_cast<double>(i);
  b.female = std::move(female);
  b.male = std::move(male);
  return b;
}

CellStats stats_of(std::vector<double> v) { return cell_stats(v); }

}  // namespace

TEST_SUITE("ensemble statistics") {
  TEST_CASE("hand arithmetic") {
    const auto c = stats_of({1, 2, 3, 4, 5});
    CHECK(c.mean == 3.0);
    CHECK(c.variance == 2.5);
    CHECK(c.skewness == Approx(0.0));
    CHECK(stats_of({4, 4}).variance == 0.0);
    CHECK_THROWS_AS(stats_of({1}), std::invalid_argument);
  }

  TEST_CASE("cells are gathered per sex, time and bin") {
    Ensemble e = {{counts(1, {1, 10}, {0, 0})}, {counts(1, {3, 10}, {0, 2})}};
    const auto st = ensemble_stats(e);
    CHECK(st.replications == 2);
    CHECK(st.at(Sex::female, 0, 0).mean == 2.0);
    CHECK(st.at(Sex::female, 0, 1).variance == 0.0);
    CHECK(st.at(Sex::male, 0, 1).mean == 1.0);
  }

  TEST_CASE("inconsistent shapes are rejected") {
    Ensemble bins = {{counts(1, {1, 2}, {0, 0})}, {counts(1, {1}, {0})}};
    CHECK_THROWS_AS(ensemble_stats(bins), std::invalid_argument);
    Ensemble times = {{counts(1, {1}, {0})}, {counts(2, {1}, {0})}};
    CHECK_THROWS_AS(ensemble_stats(times), std::invalid_argument);
    Ensemble one = {{counts(1, {1}, {0})}};
    CHECK_THROWS_AS(ensemble_stats(one), std::invalid_argument);
  }
}

TEST_SUITE("comparisons") {
  TEST_CASE("exact prediction passes at any threshold") {
    const auto c = stats_of({1, 2, 3, 4, 5});
    const auto m = compare_cell_mean(c, 3.0, 1e-9);
    CHECK(m.z == 0.0);
    CHECK(m.pass);
    CHECK(compare_cell_variance(stats_of(std::vector<double>(20, 1.0)), 0.0, 1e-9).pass);
  }

  TEST_CASE("doubled mean fails") {
    std::vector<double> v;
    Rng rng(4);
    for (int i = 0; i < 200; ++i) v.push_back(100.0 + 10.0 * (rng.uniform() - 0.5));
    CHECK_FALSE(compare_cell_mean(stats_of(v), 200.0, 3.0).pass);
  }

  TEST_CASE("zero spread with a discrepancy fails") {
    const auto c = compare_cell_mean(stats_of({5, 5, 5}), 4.0, 3.0);
    CHECK_FALSE(c.pass);
    CHECK(std::isinf(c.z));
  }

  TEST_CASE("variance: few replications are waved through, a 4x prediction fails") {
    const auto two = compare_cell_variance(stats_of({1, 7}), 1000.0, 3.0);
    CHECK(two.pass);
    CHECK(two.underpowered);
    std::vector<double> v;
    Rng rng(9);
    for (int i = 0; i < 500; ++i) v.push_back(rng.exponential(1.0));
    const auto st = stats_of(v);
    CHECK_FALSE(compare_cell_variance(st, 4.0 * st.variance, 3.0).pass);
  }

  TEST_CASE("pass fraction") {
    ComparisonReport r(4);
    r[0].pass = r[1].pass = r[2].pass = true;
    CHECK(pass_fraction(r) == 0.75);
    CHECK(pass_fraction(ComparisonReport{}) == 1.0);
  }
}

TEST_SUITE("normality") {
  TEST_CASE("null and alternative") {
    Rng rng(stream_seed(99, 1));
    std::vector<double> normal(10000), expo(10000);
    for (std::size_t i = 0; i < normal.size(); ++i) {
      const double u1 = rng.uniform(), u2 = rng.uniform();
      normal[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      expo[i] = rng.exponential(1.0);
    }
    CHECK(normality_samples(normal, 4.0).pass);
    const auto e = normality_samples(expo, 4.0);
    CHECK_FALSE(e.pass);
    CHECK(e.skewness == Approx(2.0).epsilon(0.15));
  }

  TEST_CASE("constant samples are degenerate") {
    const auto n = normality_samples(std::vector<double>(200, 3.0), 4.0);
    CHECK(n.degenerate);
    CHECK_FALSE(n.pass);
    std::vector<NormalityCell> report{n};
    CHECK(pass_fraction(report) == 1.0);
  }

  TEST_CASE("needs 100 replications") {
    CHECK_THROWS_AS(normality_samples(std::vector<double>(99, 1.0), 4.0), std::invalid_argument);
  }
}

TEST_SUITE("pipeline") {
  TEST_CASE("no births: at least 95% of cells pass over 20 master seeds") {
    ScenarioConfig c = testing::binomial_scenario();
    c.observation = {0.25, 2.0, {0.5, 1.0}};
    long cells = 0, passed = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      c.seed = seed;
      const auto out = run_verify(validate_scenario(c));
      for (const auto* rep : {&out.mean, &out.variance}) {
        for (const auto& cell : *rep) {
          ++cells;
          passed += cell.pass ? 1 : 0;
        }
      }
    }
    CHECK(static_cast<double>(passed) / cells >= 0.95);
  }

  TEST_CASE("reports are deterministic") {
    ScenarioConfig c = testing::stationary_toy(2.0, 0.25);
    c.replications = 30;
    c.t_max = 1.0;
    c.observation = {0.5, 2.0, {0.5, 1.0}};
    const Scenario s = validate_scenario(c);
    const auto a = run_verify(s);
    const auto b = run_verify(s);
    REQUIRE(a.mean.size() == b.mean.size());
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
      CHECK(a.mean[i].observed == b.mean[i].observed);
      CHECK(a.variance[i].observed == b.variance[i].observed);
    }
    CHECK_FALSE(a.normality_run);
  }
}
