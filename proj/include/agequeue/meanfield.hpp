#pragma once

#include "agequeue/field.hpp"
#include "agequeue/scenario.hpp"

namespace agequeue {

/// Birth flows phi(t_k) (female) and varphi(t_k) (male), per unit N per year.
struct BirthFlow {
  AgeTimeGrid grid;
  std::vector<double> female;
  std::vector<double> male;
  /// max_k |varphi_k r - phi_k (1 - r)| between the male flow from its own
  /// quadrature and the proportional one.
  double proportionality_mismatch = 0.0;
};

/// Mean densities g (female) and m (male) on the grid.
struct DensityField {
  AgeTimeGrid grid;
  GridField g;
  GridField m;

  const GridField& of(Sex sex) const { return sex == Sex::female ? g : m; }
};

/// Renewal equations for the birth flows, marched on the time grid.
///
/// phi(t) = r int_0^t S1(y) phi(t-y) b(y,t) dy
///        + r int_t^{t+omega} S1(y) g0(y-t) / S1(y-t) b(y,t) dy
/// with the trapezoid rule; the y = 0 end of the convolution holds phi(t_k)
/// itself and is solved for directly. varphi uses the same integrals with
/// factor (1 - r). Throws std::logic_error if the two male routes disagree
/// beyond 1e-8 (relative), std::invalid_argument if h is too coarse for the
/// implicit step.
BirthFlow solve_phi(const Scenario& s);

/// g on the grid: S1(x) g0(x-t) / S1(x-t) for x >= t, S1(x) phi(t-x) for
/// x < t. Throws ScenarioError if g0 is positive where S1 vanishes.
GridField density_g(const Scenario& s, const BirthFlow& flow);
/// m on the grid, mirroring density_g with S2, m0 and varphi.
GridField density_m(const Scenario& s, const BirthFlow& flow);

struct MeanField {
  BirthFlow flow;
  DensityField density;
};

MeanField solve_meanfield(const Scenario& s);

struct TransportResidual {
  GridField residual;
  double max_norm = 0.0;
  int worst_time = -1;
  int worst_age = -1;
};

/// Backward-difference residual of  df/dt + df/dx = f S'/S  at interior
/// nodes (k, j >= 1) with S(x_j) > 0, skipping the two columns j = k-1, k
/// whose stencil straddles the characteristic x = t.
TransportResidual transport_residual(const GridField& field, const SurvivalModel& surv, const AgeTimeGrid& grid);

struct BoundaryDiscrepancy {
  double female = 0.0;  // max_t |phi - r int g b dx|
  double male = 0.0;    // max_t |varphi - (1-r) int g b dx|
};

BoundaryDiscrepancy boundary_check(const Scenario& s, const DensityField& field, const BirthFlow& flow);

/// N int_bin g(x, t) dx (or m) for each bin of `edges` at grid time t.
std::vector<double> mean_bin_counts(const Scenario& s, const DensityField& field, Sex sex, double t,
                                    std::span<const double> edges);

}  // namespace agequeue
