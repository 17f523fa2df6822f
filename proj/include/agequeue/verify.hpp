#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "agequeue/des.hpp"
#include "agequeue/scenario.hpp"

namespace agequeue {

/// Sample moments of one cell across replications.
struct CellStats {
  int replications = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;  // m3 / m2^1.5, population moments
  double kurtosis = 0.0;  // m4 / m2^2 - 3
};

/// Throws std::invalid_argument for fewer than two samples.
CellStats cell_stats(std::span<const double> samples);

/// Per (time, bin) statistics of an ensemble, separately by sex.
struct EnsembleStats {
  int replications = 0;
  std::vector<double> times;
  std::vector<double> edges;
  std::vector<CellStats> female;  // [time * bins + bin]
  std::vector<CellStats> male;

  std::size_t bins() const { return edges.empty() ? 0 : edges.size() - 1; }
  const CellStats& at(Sex sex, std::size_t time_index, std::size_t bin) const;
};

/// Throws std::invalid_argument when replications disagree in times or bins
/// or when fewer than two are given.
EnsembleStats ensemble_stats(const Ensemble& ensemble);

/// Predicted value per bin at one observation time.
struct BinPrediction {
  std::vector<double> female;
  std::vector<double> male;
};

struct Comparison {
  double time = 0.0;
  Sex sex = Sex::female;
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  double predicted = 0.0;
  double observed = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
  bool pass = false;
  bool underpowered = false;
};

using ComparisonReport = std::vector<Comparison>;

/// Replications below which a variance comparison is waved through.
inline constexpr int kMinVarianceReplications = 10;

/// z against SD / sqrt(R). A zero SD passes only on exact agreement.
Comparison compare_cell_mean(const CellStats& cell, double predicted, double threshold);
/// z against s^2 sqrt(2 / (R - 1)); R < kMinVarianceReplications passes and
/// is flagged underpowered.
Comparison compare_cell_variance(const CellStats& cell, double predicted, double threshold);

/// One prediction per observation time of `stats`.
ComparisonReport compare_mean(const EnsembleStats& stats, std::span<const BinPrediction> predicted, double threshold);
ComparisonReport compare_variance(const EnsembleStats& stats, std::span<const BinPrediction> predicted,
                                  double threshold);

struct NormalityCell {
  double time = 0.0;
  Sex sex = Sex::female;
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  int replications = 0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  double z_skewness = 0.0;
  double z_kurtosis = 0.0;
  bool degenerate = false;
  bool pass = false;
};

inline constexpr int kMinNormalityReplications = 100;

/// Skewness and excess kurtosis z-scores with SE sqrt(6/R) and sqrt(24/R).
/// Zero-variance cells come back degenerate and are neither passed nor
/// failed. Throws std::invalid_argument below kMinNormalityReplications.
NormalityCell normality_cell(const CellStats& cell, double threshold);
NormalityCell normality_samples(std::span<const double> samples, double threshold);
std::vector<NormalityCell> normality_test(const EnsembleStats& stats, double threshold);

/// Share of passing cells; 1 for an empty report.
double pass_fraction(const ComparisonReport& report);
/// Share of passing cells among the non-degenerate ones.
double pass_fraction(const std::vector<NormalityCell>& report);

/// Outcome of the full simulate, mean field, moments, report chain.
struct VerifyOutcome {
  ComparisonReport mean;
  ComparisonReport variance;
  std::vector<NormalityCell> normality;
  double mean_pass = 0.0;
  double variance_pass = 0.0;
  double normality_pass = 0.0;
  bool normality_run = false;  // false when R < kMinNormalityReplications
  bool passed = false;
};

/// Runs the pipeline at the scenario's observation plan. Observation times
/// default to {t_max} when the plan lists none.
VerifyOutcome run_verify(const Scenario& s);

/// run_verify plus report_mean.csv, report_var.csv, report_normality.csv
/// in `out_dir`.
VerifyOutcome run_verify(const Scenario& s, const std::filesystem::path& out_dir);

}  // namespace agequeue
