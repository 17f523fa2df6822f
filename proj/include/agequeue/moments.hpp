#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "agequeue/field.hpp"
#include "agequeue/meanfield.hpp"
#include "agequeue/scenario.hpp"

namespace agequeue {

/// Factor in front of the r12 closed form, read as the decimal 0.25.
inline constexpr double kR12Factor = 0.25;

/// How the closed-form moment integrals are evaluated.
///
/// along_characteristics: the integrand follows the characteristic through
/// (x, t), i.e. g(y, t - x + y), starting from the t = 0 or x = 0 boundary.
/// This is the exact solution of the transport system with its zero
/// initial/boundary data.
///
/// as_printed: the integrand is frozen at the observation time, g(y, t), and
/// the x >= t branch of sigma^2 uses g(y, 0) up to x - t. Identical to
/// along_characteristics when g is time-invariant (and for r1, r12 when
/// x < t there); different otherwise.
enum class MomentReading { along_characteristics, as_printed };

struct MomentOptions {
  MomentReading reading = MomentReading::along_characteristics;
  double r12_factor = kR12Factor;
};

/// Components of the Gaussian fluctuation field on the grid.
struct MomentField {
  AgeTimeGrid grid;
  GridField sigma1_sq_age;   // sigma1^2(x, t)
  GridField sigma2_sq_age;   // sigma2^2(x, t)
  GridField sigma12_sq_age;  // identically 0
  GridField r1;
  GridField r2;              // identically 0
  GridField r12;
  std::vector<double> sigma1_sq;   // zero-age atoms sigma1^2(t)
  std::vector<double> sigma2_sq;
  std::vector<double> sigma12_sq;
  /// int r1(x, t) b(x, t) dx and int r12(x, t) b(x, t) dx per time step.
  std::vector<double> r1_births;
  std::vector<double> r12_births;
};

/// sigma1^2(x,t) = S1(x)^2 u(x,t), u collecting -g S1' / S1^3 from the
/// boundary to (x, t). Throws std::invalid_argument when S1'(0) is not finite.
GridField sigma1_sq_age(const Scenario& s, const GridField& g, MomentOptions opt = {});
/// Mirror of sigma1_sq_age with S2 and m.
GridField sigma2_sq_age(const Scenario& s, const GridField& m, MomentOptions opt = {});

/// r1(x,t) = r e^{S1'(0) x} S1(x) int e^{-S1'(0) y} S1(y)^-1 sigma1^2 b dy.
GridField r1_field(const Scenario& s, const GridField& sigma1_sq, MomentOptions opt = {});
/// r12(x,t) = c (1-r) e^{A x} S1 S2 int e^{-A y} (S1 S2)^-1 sigma1^2 b dy,
/// A = S1'(0) + S2'(0), c = opt.r12_factor.
GridField r12_field(const Scenario& s, const GridField& sigma1_sq, MomentOptions opt = {});

/// int r(x, t_k) b(x, t_k) dx for each k.
std::vector<double> birth_weighted(const Scenario& s, const GridField& r, const AgeTimeGrid& grid);

/// sigma1^2(t) from its closed form; g(0, t) is the first column of g.
std::vector<double> sigma1_sq_zero(const Scenario& s, const GridField& g, const GridField& r1);
std::vector<double> sigma2_sq_zero(const Scenario& s, const GridField& g, const GridField& r12);
std::vector<double> sigma12_sq_zero(const Scenario& s, const GridField& r1, const GridField& r12);

/// All components. OpenMP over ages within each time row.
MomentField solve_moments(const Scenario& s, const DensityField& density, MomentOptions opt = {});
/// Single-threaded reference for solve_moments.
MomentField solve_moments_serial(const Scenario& s, const DensityField& density, MomentOptions opt = {});

struct EquationResidual {
  std::string name;
  double max_norm = 0.0;
  long nodes = 0;
};

/// Backward-difference residuals of every equation of the moment transport
/// system. Transport equations use interior nodes off the characteristic
/// x = t (as transport_residual); the zero-age equations use k >= 1.
/// The r12 field is checked against both printed transport equations
/// ("r12_a": S2'(0) + S1'/S1 with (1-r) sigma1^2 b; "r12_b": S1'(0) + S2'/S2
/// with r sigma12^2 b).
std::vector<EquationResidual> check_system24(const MomentField& f, const Scenario& s, const DensityField& d);

/// Measure decomposition of a cross-correlation function R(y, z, t):
/// atom * delta(y) delta(z) + marginal(y) delta(z) + marginal(z) delta(y)
/// + diagonal(y) delta(y - z).
struct CrossCorrelation {
  double h = 0.0;
  double atom = 0.0;
  std::vector<double> marginal;  // on age nodes
  std::vector<double> diagonal;  // on age nodes

  /// int_A int_B R dy dz for grid-aligned bins A = [a0, a1), B = [b0, b1).
  double bin_covariance(double a0, double a1, double b0, double b1) const;
};

enum class Pair { female_female, male_male, female_male };

CrossCorrelation cross_correlation(const MomentField& f, Pair pair, double t);

struct BinVariancePrediction {
  std::vector<double> female;  // Var N1(bin)
  std::vector<double> male;    // Var N2(bin)
  std::vector<std::vector<double>> cross;  // Cov(N1(bin a), N2(bin b))
};

/// N times the bin integrals of R11, R22, R12 at grid time t.
/// Throws std::invalid_argument for edges off the grid.
BinVariancePrediction bin_variance_prediction(const MomentField& f, std::span<const double> edges, double t,
                                              std::int64_t N);

}  // namespace agequeue
