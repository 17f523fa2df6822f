#include "agequeue/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "agequeue/io.hpp"
#include "agequeue/meanfield.hpp"
#include "agequeue/moments.hpp"

namespace agequeue {

CellStats cell_stats(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("cell statistics need at least two replications");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : samples) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  CellStats c;
  c.replications = static_cast<int>(samples.size());
  c.mean = mean;
  c.variance = m2 / (n - 1.0);
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 0.0) {
    c.skewness = m3 / std::pow(m2, 1.5);
    c.kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return c;
}

const CellStats& EnsembleStats::at(Sex sex, std::size_t time_index, std::size_t bin) const {
  const auto& v = sex == Sex::female ? female : male;
  return v.at(time_index * bins() + bin);
}

EnsembleStats ensemble_stats(const Ensemble& ensemble) {
  if (ensemble.size() < 2) throw std::invalid_argument("ensemble statistics need at least two replications");
  const auto& first = ensemble.front();
  for (const auto& rep : ensemble) {
    if (rep.size() != first.size()) throw std::invalid_argument("replications observed at different numbers of times");
    for (std::size_t k = 0; k < rep.size(); ++k) {
      if (rep[k].time != first[k].time || rep[k].edges != first[k].edges) {
        throw std::invalid_argument("replications disagree in observation times or bins");
      }
    }
  }
  EnsembleStats st;
  st.replications = static_cast<int>(ensemble.size());
  for (const auto& obs : first) st.times.push_back(obs.time);
  if (!first.empty()) st.edges = first.front().edges;
  for (const auto& obs : first) {
    if (obs.edges != st.edges) throw std::invalid_argument("bins change between observation times");
  }
  const std::size_t bins = st.bins();
  std::vector<double> column(ensemble.size());
  for (Sex sex : {Sex::female, Sex::male}) {
    auto& out = sex == Sex::female ? st.female : st.male;
    out.reserve(st.times.size() * bins);
    for (std::size_t k = 0; k < st.times.size(); ++k) {
      for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
          const auto& counts = sex == Sex::female ? ensemble[i][k].female : ensemble[i][k].male;
          column[i] = static_cast<double>(counts[b]);
        }
        out.push_back(cell_stats(column));
      }
    }
  }
  return st;
}

namespace {

Comparison judge(double observed, double predicted, double se, double threshold) {
  Comparison c;
  c.predicted = predicted;
  c.observed = observed;
  c.standard_error = se;
  const double diff = observed - predicted;
  if (se > 0.0) {
    c.z = diff / se;
    c.pass = std::abs(c.z) <= threshold;
  } else {
    const bool exact = std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(predicted));
    c.z = exact ? 0.0 : std::copysign(INFINITY, diff);
    c.pass = exact;
  }
  return c;
}

template <class CompareCell>
ComparisonReport compare_all(const EnsembleStats& stats, std::span<const BinPrediction> predicted, double threshold,
                             CompareCell cmp) {
  if (predicted.size() != stats.times.size()) {
    throw std::invalid_argument("one prediction per observation time is required");
  }
  ComparisonReport out;
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    for (Sex sex : {Sex::female, Sex::male}) {
      const auto& pred = sex == Sex::female ? predicted[k].female : predicted[k].male;
      if (pred.size() != stats.bins()) throw std::invalid_argument("prediction bins do not match the ensemble");
      for (std::size_t b = 0; b < stats.bins(); ++b) {
        Comparison c = cmp(stats.at(sex, k, b), pred[b], threshold);
        c.time = stats.times[k];
        c.sex = sex;
        c.bin_lo = stats.edges[b];
        c.bin_hi = stats.edges[b + 1];
        out.push_back(c);
      }
    }
  }
  return out;
}

}  // namespace

Comparison compare_cell_mean(const CellStats& cell, double predicted, double threshold) {
  const double se = std::sqrt(cell.variance / cell.replications);
  return judge(cell.mean, predicted, se, threshold);
}

Comparison compare_cell_variance(const CellStats& cell, double predicted, double threshold) {
  const double se = cell.variance * std::sqrt(2.0 / (cell.replications - 1));
  if (cell.replications < kMinVarianceReplications) {
    Comparison c = judge(cell.variance, predicted, se, threshold);
    c.pass = true;
    c.underpowered = true;
    return c;
  }
  return judge(cell.variance, predicted, se, threshold);
}

ComparisonReport compare_mean(const EnsembleStats& stats, std::span<const BinPrediction> predicted, double threshold) {
  return compare_all(stats, predicted, threshold, compare_cell_mean);
}

ComparisonReport compare_variance(const EnsembleStats& stats, std::span<const BinPrediction> predicted,
                                  double threshold) {
  return compare_all(stats, predicted, threshold, compare_cell_variance);
}

NormalityCell normality_cell(const CellStats& cell, double threshold) {
  if (cell.replications < kMinNormalityReplications) {
    throw std::invalid_argument("normality screening needs at least " + std::to_string(kMinNormalityReplications) +
                                " replications");
  }
  NormalityCell n;
  n.replications = cell.replications;
  if (!(cell.variance > 0.0)) {
    n.degenerate = true;
    return n;
  }
  const double R = cell.replications;
  n.skewness = cell.skewness;
  n.kurtosis = cell.kurtosis;
  n.z_skewness = cell.skewness / std::sqrt(6.0 / R);
  n.z_kurtosis = cell.kurtosis / std::sqrt(24.0 / R);
  n.pass = std::abs(n.z_skewness) <= threshold && std::abs(n.z_kurtosis) <= threshold;
  return n;
}

NormalityCell normality_samples(std::span<const double> samples, double threshold) {
  return normality_cell(cell_stats(samples), threshold);
}

std::vector<NormalityCell> normality_test(const EnsembleStats& stats, double threshold) {
  std::vector<NormalityCell> out;
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    for (Sex sex : {Sex::female, Sex::male}) {
      for (std::size_t b = 0; b < stats.bins(); ++b) {
        NormalityCell n = normality_cell(stats.at(sex, k, b), threshold);
        n.time = stats.times[k];
        n.sex = sex;
        n.bin_lo = stats.edges[b];
        n.bin_hi = stats.edges[b + 1];
        out.push_back(n);
      }
    }
  }
  return out;
}

double pass_fraction(const ComparisonReport& report) {
  if (report.empty()) return 1.0;
  const auto n = std::count_if(report.begin(), report.end(), [](const Comparison& c) { return c.pass; });
  return static_cast<double>(n) / static_cast<double>(report.size());
}

double pass_fraction(const std::vector<NormalityCell>& report) {
  long total = 0, passed = 0;
  for (const auto& c : report) {
    if (c.degenerate) continue;
    ++total;
    passed += c.pass ? 1 : 0;
  }
  return total == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(total);
}

VerifyOutcome run_verify(const Scenario& s) {
  const auto& cfg = s.config();
  const auto& th = cfg.thresholds;
  std::vector<double> times = cfg.observation.times;
  if (times.empty()) times.push_back(cfg.t_max);
  const auto edges = observation_edges(cfg.observation);

  const MeanField mf = solve_meanfield(s);
  const MomentField mom = solve_moments(s, mf.density);

  std::vector<BinPrediction> mean_pred;
  std::vector<BinPrediction> var_pred;
  for (double t : times) {
    mean_pred.push_back({mean_bin_counts(s, mf.density, Sex::female, t, edges),
                         mean_bin_counts(s, mf.density, Sex::male, t, edges)});
    auto v = bin_variance_prediction(mom, edges, t, cfg.N);
    var_pred.push_back({std::move(v.female), std::move(v.male)});
  }

  const Ensemble ensemble = run_ensemble(s, times, edges, cfg.replications, cfg.seed);
  const EnsembleStats stats = ensemble_stats(ensemble);

  VerifyOutcome out;
  out.mean = compare_mean(stats, mean_pred, th.z_mean);
  out.variance = compare_variance(stats, var_pred, th.z_variance);
  out.normality_run = stats.replications >= kMinNormalityReplications;
  if (out.normality_run) out.normality = normality_test(stats, th.z_normal);
  out.mean_pass = pass_fraction(out.mean);
  out.variance_pass = pass_fraction(out.variance);
  out.normality_pass = pass_fraction(out.normality);
  out.passed = out.mean_pass >= th.mean_floor && out.variance_pass >= th.variance_floor &&
               out.normality_pass >= th.normality_floor;
  return out;
}

namespace {

std::string sex_name(Sex s) { return s == Sex::female ? "female" : "male"; }

CsvTable comparison_table(const ComparisonReport& report) {
  CsvTable t;
  t.header = {"time", "sex", "bin_lo", "bin_hi", "predicted", "observed", "standard_error", "z", "pass", "underpowered"};
  for (const auto& c : report) {
    t.rows.push_back({c.time, sex_name(c.sex), c.bin_lo, c.bin_hi, c.predicted, c.observed, c.standard_error, c.z,
                      std::int64_t{c.pass}, std::int64_t{c.underpowered}});
  }
  return t;
}

CsvTable normality_table(const std::vector<NormalityCell>& report) {
  CsvTable t;
  t.header = {"time", "sex", "bin_lo", "bin_hi", "replications", "skewness", "excess_kurtosis",
              "z_skewness", "z_kurtosis", "status"};
  for (const auto& c : report) {
    const std::string status = c.degenerate ? "degenerate" : (c.pass ? "pass" : "fail");
    t.rows.push_back({c.time, sex_name(c.sex), c.bin_lo, c.bin_hi, std::int64_t{c.replications}, c.skewness,
                      c.kurtosis, c.z_skewness, c.z_kurtosis, status});
  }
  return t;
}

}  // namespace

VerifyOutcome run_verify(const Scenario& s, const std::filesystem::path& out_dir) {
  VerifyOutcome out = run_verify(s);
  emit_csv({{"report_mean.csv", comparison_table(out.mean)},
            {"report_var.csv", comparison_table(out.variance)},
            {"report_normality.csv", normality_table(out.normality)}},
           out_dir);
  return out;
}

}  // namespace agequeue
