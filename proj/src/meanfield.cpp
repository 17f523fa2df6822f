#include "agequeue/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace agequeue {

double bin_integral(std::span<const double> row, double h, double lo, double hi) {
  const auto a = grid_steps(lo, h);
  const auto b = grid_steps(hi, h);
  if (!a || !b || *a < 0 || *b < *a) {
    throw std::invalid_argument("bin [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                ") is not aligned with the grid");
  }
  const long n = static_cast<long>(row.size());
  if (*a >= n - 1) return 0.0;
  const long end = std::min(*b, n - 1);
  return trapezoid(row.subspan(static_cast<std::size_t>(*a), static_cast<std::size_t>(end - *a + 1)), h);
}

namespace {

std::vector<double> survival_nodes(const SurvivalModel& s, double h, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[i] = s.survival(i * h);
  return v;
}

}  // namespace

BirthFlow solve_phi(const Scenario& s) {
  const auto& cfg = s.config();
  const AgeTimeGrid grid = s.grid();
  const double h = grid.h;
  const int K = grid.time_steps;
  const int J = grid.age_steps;
  const double r = cfg.r;
  const auto& b = s.fertility();
  const bool lagged = cfg.fertility_kernel_lagged;
  const auto S1 = survival_nodes(s.survival(Sex::female), h, J + K + 1);

  std::vector<double> g0(static_cast<std::size_t>(J + 1));
  for (int j = 0; j <= J; ++j) g0[j] = s.initial(Sex::female).value(grid.age(j));

  BirthFlow flow;
  flow.grid = grid;
  flow.female.assign(static_cast<std::size_t>(K + 1), 0.0);
  flow.male.assign(static_cast<std::size_t>(K + 1), 0.0);

  std::vector<double> integrand(static_cast<std::size_t>(J + 1));
  for (int k = 0; k <= K; ++k) {
    const double t = grid.time(k);

    // initial cohort, y = t + x_j
    for (int j = 0; j <= J; ++j) {
      integrand[j] = S1[j] > 0.0 ? S1[j + k] / S1[j] * g0[j] * b.rate(t + grid.age(j), t) : 0.0;
    }
    const double forcing = trapezoid(integrand, h);

    // convolution without the phi(t_k) end
    auto kernel = [&](int i) { return S1[i] * b.rate(grid.age(i), lagged ? t - grid.age(i) : t); };
    double conv = 0.0;
    if (k > 0) {
      for (int i = 1; i < k; ++i) conv += kernel(i) * flow.female[k - i];
      conv += 0.5 * kernel(k) * flow.female[0];
      conv *= h;
    }
    const double diag = k > 0 ? 0.5 * h * kernel(0) : 0.0;
    const double denom = 1.0 - r * diag;
    if (!(denom > 0.0)) {
      throw std::invalid_argument("h too coarse for the renewal step: r h b(0,t) / 2 >= 1");
    }
    const double phi = r * (conv + forcing) / denom;
    flow.female[k] = phi;
    const double whole = conv + diag * phi + forcing;
    flow.male[k] = (1.0 - r) * whole;

    if (r > 0.0) {
      const double proportional = (1.0 - r) / r * phi;
      const double gap = std::abs(flow.male[k] * r - phi * (1.0 - r));
      flow.proportionality_mismatch = std::max(flow.proportionality_mismatch, gap);
      if (std::abs(flow.male[k] - proportional) > 1e-8 * std::max(1.0, std::abs(proportional))) {
        throw std::logic_error("male birth flow disagrees with the proportional female flow at t = " +
                               std::to_string(t));
      }
    }
  }
  return flow;
}

namespace {

GridField density(const Scenario& s, Sex sex, const std::vector<double>& births) {
  const AgeTimeGrid grid = s.grid();
  const int K = grid.time_steps;
  const int J = grid.age_steps;
  const auto S = survival_nodes(s.survival(sex), grid.h, J + 1);
  std::vector<double> init(static_cast<std::size_t>(J + 1));
  for (int j = 0; j <= J; ++j) {
    // Nobody is alive at or past the maximum age.
    if (grid.age(j) >= s.survival(sex).max_age()) continue;
    init[j] = s.initial(sex).value(grid.age(j));
    if (init[j] > 0.0 && S[j] <= 0.0) {
      throw ScenarioError({std::string(sex == Sex::female ? "initial_female" : "initial_male") +
                           ": positive density where survival is zero (age " +
                           std::to_string(grid.age(j)) + ")"});
    }
  }
  GridField f(K + 1, J + 1);
  for (int k = 0; k <= K; ++k) {
    auto row = f.row(k);
    for (int j = 0; j <= J; ++j) {
      if (S[j] <= 0.0) continue;
      row[j] = j >= k ? S[j] / S[j - k] * init[j - k] : S[j] * births[k - j];
    }
  }
  return f;
}

}  // namespace

GridField density_g(const Scenario& s, const BirthFlow& flow) { return density(s, Sex::female, flow.female); }

GridField density_m(const Scenario& s, const BirthFlow& flow) { return density(s, Sex::male, flow.male); }

MeanField solve_meanfield(const Scenario& s) {
  MeanField mf;
  mf.flow = solve_phi(s);
  mf.density.grid = s.grid();
  mf.density.g = density_g(s, mf.flow);
  mf.density.m = density_m(s, mf.flow);
  return mf;
}

TransportResidual transport_residual(const GridField& f, const SurvivalModel& surv, const AgeTimeGrid& grid) {
  TransportResidual out;
  out.residual = GridField(f.times(), f.ages());
  const double h = grid.h;
  for (int k = 1; k < f.times(); ++k) {
    for (int j = 1; j < f.ages(); ++j) {
      if (j == k || j == k - 1) continue;
      const double x = grid.age(j);
      if (surv.survival(x) <= 0.0) continue;
      const double v = f.at(k, j);
      const double res = (v - f.at(k - 1, j)) / h + (v - f.at(k, j - 1)) / h + v * surv.hazard(x);
      out.residual.at(k, j) = res;
      if (std::abs(res) > out.max_norm) {
        out.max_norm = std::abs(res);
        out.worst_time = k;
        out.worst_age = j;
      }
    }
  }
  return out;
}

BoundaryDiscrepancy boundary_check(const Scenario& s, const DensityField& field, const BirthFlow& flow) {
  const AgeTimeGrid grid = field.grid;
  const double r = s.config().r;
  BoundaryDiscrepancy d;
  std::vector<double> integrand(static_cast<std::size_t>(field.g.ages()));
  for (int k = 0; k < field.g.times(); ++k) {
    const double t = grid.time(k);
    const auto row = field.g.row(k);
    for (int j = 0; j < field.g.ages(); ++j) integrand[j] = row[j] * s.fertility().rate(grid.age(j), t);
    const double births = trapezoid(integrand, grid.h);
    d.female = std::max(d.female, std::abs(flow.female[k] - r * births));
    d.male = std::max(d.male, std::abs(flow.male[k] - (1.0 - r) * births));
  }
  return d;
}

std::vector<double> mean_bin_counts(const Scenario& s, const DensityField& field, Sex sex, double t,
                                    std::span<const double> edges) {
  const int k = field.grid.time_index(t);
  const auto row = field.of(sex).row(k);
  const double n = static_cast<double>(s.config().N);
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out.push_back(n * bin_integral(row, field.grid.h, edges[i], edges[i + 1]));
  }
  return out;
}

}  // namespace agequeue
