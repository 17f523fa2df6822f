#include "agequeue/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "agequeue/parallel.hpp"

namespace agequeue {

namespace {

// Survival values below this are treated as zero: S^-3 must stay finite.
constexpr double kTinySurvival = 1e-90;

double finite_slope(const SurvivalModel& s) {
  const double a = s.initial_slope();
  if (!std::isfinite(a)) throw std::invalid_argument("second-order moments need a finite S'(0)");
  return a;
}

std::vector<double> nodes(const SurvivalModel& s, const AgeTimeGrid& grid, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const double x = grid.age(j);
    const double sv = s.survival(x);
    v[j] = sv > kTinySurvival ? sv : 0.0;
  }
  return v;
}

AgeTimeGrid shape_grid(const Scenario& s, const GridField& f) {
  AgeTimeGrid g = s.grid();
  if (f.times() != g.times() || f.ages() != g.ages()) throw std::invalid_argument("field does not match the scenario grid");
  return g;
}

// V(k, j) = V(k-1, j-1) + h/2 (H(k-1, j-1) + H(k, j)), zero on k = 0 and j = 0.
GridField diagonal_cumulative(const GridField& H, double h, bool parallel) {
  GridField V(H.times(), H.ages());
  const int workers = parallel ? worker_count() : 1;
  for (int k = 1; k < H.times(); ++k) {
    const auto prev_h = H.row(k - 1);
    const auto cur_h = H.row(k);
    const auto prev_v = std::as_const(V).row(k - 1);
    auto cur_v = V.row(k);
#pragma omp parallel for schedule(static) num_threads(workers) if (parallel)
    for (int j = 1; j < H.ages(); ++j) cur_v[j] = prev_v[j - 1] + 0.5 * h * (prev_h[j - 1] + cur_h[j]);
  }
  return V;
}

// V(k, j) = trapezoid of H(k, 0..j).
GridField row_cumulative(const GridField& H, double h, bool parallel) {
  GridField V(H.times(), H.ages());
  const int workers = parallel ? worker_count() : 1;
#pragma omp parallel for schedule(static) num_threads(workers) if (parallel)
  for (int k = 0; k < H.times(); ++k) {
    const auto in = H.row(k);
    auto out = V.row(k);
    for (int j = 1; j < H.ages(); ++j) out[j] = out[j - 1] + 0.5 * h * (in[j - 1] + in[j]);
  }
  return V;
}

GridField sigma_sq(const Scenario& s, Sex sex, const GridField& density, MomentOptions opt, bool parallel) {
  const AgeTimeGrid grid = shape_grid(s, density);
  const auto& surv = s.survival(sex);
  finite_slope(surv);
  const auto S = nodes(surv, grid, grid.ages());
  std::vector<double> w(S.size(), 0.0);  // S'/S^3
  for (std::size_t j = 0; j < S.size(); ++j) {
    if (S[j] > 0.0) w[j] = surv.derivative(grid.age(static_cast<int>(j))) / (S[j] * S[j] * S[j]);
  }
  GridField G(density.times(), density.ages());
  for (int k = 0; k < density.times(); ++k) {
    for (int j = 0; j < density.ages(); ++j) {
      const double v = density.at(k, j);
      if (v != 0.0 && S[j] == 0.0) {
        throw ScenarioError({"moments: positive density at an age with zero survival"});
      }
      G.at(k, j) = v * w[j];
    }
  }
  GridField out(density.times(), density.ages());
  if (opt.reading == MomentReading::along_characteristics) {
    const GridField V = diagonal_cumulative(G, grid.h, parallel);
    for (int k = 0; k < out.times(); ++k) {
      for (int j = 0; j < out.ages(); ++j) out.at(k, j) = -S[j] * S[j] * V.at(k, j);
    }
  } else {
    const GridField C = row_cumulative(G, grid.h, parallel);
    for (int k = 0; k < out.times(); ++k) {
      for (int j = 0; j < out.ages(); ++j) {
        const double braces = j >= k ? C.at(0, j - k) - C.at(k, j) : -C.at(k, j);
        out.at(k, j) = S[j] * S[j] * braces;
      }
    }
  }
  return out;
}

// r(x,t) = P(x) e^{A x} int coef e^{-A y} P(y)^-1 sigma1^2(y, .) b(y, .) dy
GridField mixed_component(const Scenario& s, const GridField& sigma1, const std::vector<double>& P, double A,
                          double coef, MomentOptions opt, bool parallel) {
  const AgeTimeGrid grid = shape_grid(s, sigma1);
  const auto& b = s.fertility();
  GridField H(sigma1.times(), sigma1.ages());
  for (int k = 0; k < H.times(); ++k) {
    const double t = grid.time(k);
    for (int j = 0; j < H.ages(); ++j) {
      if (P[j] <= 0.0) continue;
      const double x = grid.age(j);
      H.at(k, j) = coef * std::exp(-A * x) / P[j] * sigma1.at(k, j) * b.rate(x, t);
    }
  }
  const GridField V = opt.reading == MomentReading::along_characteristics
                          ? diagonal_cumulative(H, grid.h, parallel)
                          : row_cumulative(H, grid.h, parallel);
  GridField out(H.times(), H.ages());
  for (int k = 0; k < out.times(); ++k) {
    for (int j = 0; j < out.ages(); ++j) {
      if (P[j] > 0.0) out.at(k, j) = std::exp(A * grid.age(j)) * P[j] * V.at(k, j);
    }
  }
  return out;
}

GridField r1_impl(const Scenario& s, const GridField& sigma1, MomentOptions opt, bool parallel) {
  const auto& S1 = s.survival(Sex::female);
  const double a1 = finite_slope(S1);
  const auto P = nodes(S1, s.grid(), s.grid().ages());
  return mixed_component(s, sigma1, P, a1, s.config().r, opt, parallel);
}

GridField r12_impl(const Scenario& s, const GridField& sigma1, MomentOptions opt, bool parallel) {
  const auto& S1 = s.survival(Sex::female);
  const auto& S2 = s.survival(Sex::male);
  const double A = finite_slope(S1) + finite_slope(S2);
  auto P = nodes(S1, s.grid(), s.grid().ages());
  const auto P2 = nodes(S2, s.grid(), s.grid().ages());
  for (std::size_t j = 0; j < P.size(); ++j) {
    P[j] *= P2[j];
    if (P[j] <= kTinySurvival) P[j] = 0.0;
  }
  return mixed_component(s, sigma1, P, A, opt.r12_factor * (1.0 - s.config().r), opt, parallel);
}

// e^{c t} int_0^t f(y) dy with f(y) = e^{-c y} source(y), trapezoid on the grid.
std::vector<double> exponential_accumulate(const std::vector<double>& source, double c, double h) {
  std::vector<double> out(source.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = 1; k < source.size(); ++k) {
    const double y0 = (k - 1) * h;
    const double y1 = k * h;
    acc += 0.5 * h * (std::exp(-c * y0) * source[k - 1] + std::exp(-c * y1) * source[k]);
    out[k] = std::exp(c * y1) * acc;
  }
  return out;
}

MomentField solve_impl(const Scenario& s, const DensityField& d, MomentOptions opt, bool parallel) {
  MomentField f;
  f.grid = s.grid();
  f.sigma1_sq_age = sigma_sq(s, Sex::female, d.g, opt, parallel);
  f.sigma2_sq_age = sigma_sq(s, Sex::male, d.m, opt, parallel);
  f.sigma12_sq_age = GridField(d.g.times(), d.g.ages());
  f.r1 = r1_impl(s, f.sigma1_sq_age, opt, parallel);
  f.r2 = GridField(d.g.times(), d.g.ages());
  f.r12 = r12_impl(s, f.sigma1_sq_age, opt, parallel);
  f.r1_births = birth_weighted(s, f.r1, f.grid);
  f.r12_births = birth_weighted(s, f.r12, f.grid);
  f.sigma1_sq = sigma1_sq_zero(s, d.g, f.r1);
  f.sigma2_sq = sigma2_sq_zero(s, d.g, f.r12);
  f.sigma12_sq = sigma12_sq_zero(s, f.r1, f.r12);
  return f;
}

}  // namespace

GridField sigma1_sq_age(const Scenario& s, const GridField& g, MomentOptions opt) {
  return sigma_sq(s, Sex::female, g, opt, true);
}

GridField sigma2_sq_age(const Scenario& s, const GridField& m, MomentOptions opt) {
  return sigma_sq(s, Sex::male, m, opt, true);
}

GridField r1_field(const Scenario& s, const GridField& sigma1, MomentOptions opt) {
  return r1_impl(s, sigma1, opt, true);
}

GridField r12_field(const Scenario& s, const GridField& sigma1, MomentOptions opt) {
  return r12_impl(s, sigma1, opt, true);
}

std::vector<double> birth_weighted(const Scenario& s, const GridField& r, const AgeTimeGrid& grid) {
  std::vector<double> out(static_cast<std::size_t>(r.times()));
  std::vector<double> integrand(static_cast<std::size_t>(r.ages()));
  for (int k = 0; k < r.times(); ++k) {
    const double t = grid.time(k);
    for (int j = 0; j < r.ages(); ++j) integrand[j] = r.at(k, j) * s.fertility().rate(grid.age(j), t);
    out[k] = trapezoid(integrand, grid.h);
  }
  return out;
}

std::vector<double> sigma1_sq_zero(const Scenario& s, const GridField& g, const GridField& r1) {
  const AgeTimeGrid grid = shape_grid(s, g);
  const double a1 = finite_slope(s.survival(Sex::female));
  const double r = s.config().r;
  const auto births = birth_weighted(s, r1, grid);
  std::vector<double> source(births.size());
  for (std::size_t k = 0; k < source.size(); ++k) source[k] = r * g.at(static_cast<int>(k), 0) + 2.0 * r * births[k];
  return exponential_accumulate(source, 2.0 * a1, grid.h);
}

std::vector<double> sigma2_sq_zero(const Scenario& s, const GridField& g, const GridField& r12) {
  const AgeTimeGrid grid = shape_grid(s, g);
  const double a2 = finite_slope(s.survival(Sex::male));
  const double q = 1.0 - s.config().r;
  const auto births = birth_weighted(s, r12, grid);
  std::vector<double> source(births.size());
  for (std::size_t k = 0; k < source.size(); ++k) source[k] = q * g.at(static_cast<int>(k), 0) + 2.0 * q * births[k];
  return exponential_accumulate(source, 2.0 * a2, grid.h);
}

std::vector<double> sigma12_sq_zero(const Scenario& s, const GridField& r1, const GridField& r12) {
  const AgeTimeGrid grid = shape_grid(s, r1);
  const double A = finite_slope(s.survival(Sex::female)) + finite_slope(s.survival(Sex::male));
  const double r = s.config().r;
  const auto b1 = birth_weighted(s, r1, grid);
  const auto b12 = birth_weighted(s, r12, grid);
  std::vector<double> source(b1.size());
  for (std::size_t k = 0; k < source.size(); ++k) source[k] = (1.0 - r) * b1[k] + r * b12[k];
  return exponential_accumulate(source, A, grid.h);
}

MomentField solve_moments(const Scenario& s, const DensityField& d, MomentOptions opt) {
  return solve_impl(s, d, opt, true);
}

MomentField solve_moments_serial(const Scenario& s, const DensityField& d, MomentOptions opt) {
  return solve_impl(s, d, opt, false);
}

std::vector<EquationResidual> check_system24(const MomentField& f, const Scenario& s, const DensityField& d) {
  const AgeTimeGrid grid = f.grid;
  const double h = grid.h;
  const double r = s.config().r;
  const auto& S1 = s.survival(Sex::female);
  const auto& S2 = s.survival(Sex::male);
  const double a1 = finite_slope(S1);
  const double a2 = finite_slope(S2);
  const auto& b = s.fertility();
  const int K = grid.time_steps;
  const int ages = grid.ages();

  std::vector<EquationResidual> out;
  auto zero_age = [&](const std::string& name, const std::vector<double>& v, auto rhs) {
    EquationResidual e{name, 0.0, 0};
    for (int k = 1; k <= K; ++k) {
      e.max_norm = std::max(e.max_norm, std::abs((v[k] - v[k - 1]) / h - rhs(k)));
      ++e.nodes;
    }
    out.push_back(e);
  };
  // rhs(k, j, x, t, hz1, hz2) with hz = S'/S at x
  auto transport = [&](const std::string& name, const GridField& v, bool need_female, bool need_male, auto rhs) {
    EquationResidual e{name, 0.0, 0};
    for (int k = 1; k <= K; ++k) {
      const double t = grid.time(k);
      for (int j = 1; j < ages; ++j) {
        if (j == k || j == k - 1) continue;
        const double x = grid.age(j);
        const bool f_ok = S1.survival(x) > kTinySurvival;
        const bool m_ok = S2.survival(x) > kTinySurvival;
        if ((need_female && !f_ok) || (need_male && !m_ok)) continue;
        const double hz1 = f_ok ? -S1.hazard(x) : 0.0;
        const double hz2 = m_ok ? -S2.hazard(x) : 0.0;
        const double val = v.at(k, j);
        const double lhs = (val - v.at(k - 1, j)) / h + (val - v.at(k, j - 1)) / h;
        e.max_norm = std::max(e.max_norm, std::abs(lhs - rhs(k, j, x, t, hz1, hz2)));
        ++e.nodes;
      }
    }
    out.push_back(e);
  };

  zero_age("sigma1_sq(t)", f.sigma1_sq, [&](int k) {
    return 2.0 * a1 * f.sigma1_sq[k] + 2.0 * r * f.r1_births[k] + r * d.g.at(k, 0);
  });
  zero_age("sigma2_sq(t)", f.sigma2_sq, [&](int k) {
    return 2.0 * a2 * f.sigma2_sq[k] + 2.0 * (1.0 - r) * f.r12_births[k] + (1.0 - r) * d.g.at(k, 0);
  });
  transport("sigma1_sq(x,t)", f.sigma1_sq_age, true, false, [&](int k, int j, double, double, double hz1, double) {
    return (2.0 * f.sigma1_sq_age.at(k, j) - d.g.at(k, j)) * hz1;
  });
  transport("sigma2_sq(x,t)", f.sigma2_sq_age, false, true, [&](int k, int j, double, double, double, double hz2) {
    return (2.0 * f.sigma2_sq_age.at(k, j) - d.m.at(k, j)) * hz2;
  });
  transport("r1", f.r1, true, false, [&](int k, int j, double x, double t, double hz1, double) {
    return f.r1.at(k, j) * (a1 + hz1) + r * f.sigma1_sq_age.at(k, j) * b.rate(x, t);
  });
  transport("r2", f.r2, false, true, [&](int k, int j, double x, double t, double, double hz2) {
    return f.r2.at(k, j) * (a2 + hz2) + (1.0 - r) * f.sigma12_sq_age.at(k, j) * b.rate(x, t);
  });
  zero_age("sigma12_sq(t)", f.sigma12_sq, [&](int k) {
    return (a1 + a2) * f.sigma12_sq[k] + (1.0 - r) * f.r1_births[k] + r * f.r12_births[k];
  });
  transport("sigma12_sq(x,t)", f.sigma12_sq_age, true, true,
            [&](int k, int j, double, double, double hz1, double hz2) {
              return f.sigma12_sq_age.at(k, j) * (hz1 + hz2);
            });
  transport("r12_a", f.r12, true, true, [&](int k, int j, double x, double t, double hz1, double) {
    return f.r12.at(k, j) * (a2 + hz1) + (1.0 - r) * f.sigma1_sq_age.at(k, j) * b.rate(x, t);
  });
  transport("r12_b", f.r12, true, true, [&](int k, int j, double x, double t, double, double hz2) {
    return f.r12.at(k, j) * (a1 + hz2) + r * f.sigma12_sq_age.at(k, j) * b.rate(x, t);
  });
  return out;
}

double CrossCorrelation::bin_covariance(double a0, double a1, double b0, double b1) const {
  const bool zero_in_a = a0 <= 0.0 && a1 > 0.0;
  const bool zero_in_b = b0 <= 0.0 && b1 > 0.0;
  double v = 0.0;
  if (zero_in_a && zero_in_b) v += atom;
  if (zero_in_b) v += bin_integral(marginal, h, a0, a1);
  if (zero_in_a) v += bin_integral(marginal, h, b0, b1);
  const double lo = std::max(a0, b0);
  const double hi = std::min(a1, b1);
  if (hi > lo) v += bin_integral(diagonal, h, lo, hi);
  return v;
}

CrossCorrelation cross_correlation(const MomentField& f, Pair pair, double t) {
  const int k = f.grid.time_index(t);
  CrossCorrelation c;
  c.h = f.grid.h;
  const GridField* marginal = nullptr;
  const GridField* diagonal = nullptr;
  switch (pair) {
    case Pair::female_female:
      c.atom = f.sigma1_sq[k];
      marginal = &f.r1;
      diagonal = &f.sigma1_sq_age;
      break;
    case Pair::male_male:
      c.atom = f.sigma2_sq[k];
      marginal = &f.r2;
      diagonal = &f.sigma2_sq_age;
      break;
    case Pair::female_male:
      c.atom = f.sigma12_sq[k];
      marginal = &f.r12;
      diagonal = &f.sigma12_sq_age;
      break;
  }
  const auto mrow = marginal->row(k);
  const auto drow = diagonal->row(k);
  c.marginal.assign(mrow.begin(), mrow.end());
  c.diagonal.assign(drow.begin(), drow.end());
  return c;
}

BinVariancePrediction bin_variance_prediction(const MomentField& f, std::span<const double> edges, double t,
                                              std::int64_t N) {
  const double n = static_cast<double>(N);
  const auto r11 = cross_correlation(f, Pair::female_female, t);
  const auto r22 = cross_correlation(f, Pair::male_male, t);
  const auto r12 = cross_correlation(f, Pair::female_male, t);
  BinVariancePrediction p;
  const std::size_t bins = edges.size() < 2 ? 0 : edges.size() - 1;
  p.cross.assign(bins, std::vector<double>(bins, 0.0));
  for (std::size_t a = 0; a < bins; ++a) {
    p.female.push_back(n * r11.bin_covariance(edges[a], edges[a + 1], edges[a], edges[a + 1]));
    p.male.push_back(n * r22.bin_covariance(edges[a], edges[a + 1], edges[a], edges[a + 1]));
    for (std::size_t c = 0; c < bins; ++c) {
      p.cross[a][c] = n * r12.bin_covariance(edges[a], edges[a + 1], edges[c], edges[c + 1]);
    }
  }
  return p;
}

}  // namespace agequeue
