#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kobalab/bound.hpp"

namespace kobalab {

enum class Experiment { Exponents, Qti, KrGap, Sibony, MinusModel, PuncturedDemo };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view s);

/// count log-spaced values from eps_max down to eps_min.
struct EpsGrid {
  double eps_min = 1e-6;
  double eps_max = 1e-2;
  int count = 9;

  /// Strictly decreasing.
  std::vector<double> values() const;
  void validate() const;
};

/// delta = ratio * eps. Parsed from "eps/K", "R*eps" or a bare ratio "R".
struct DeltaRule {
  double ratio = 0.5;

  double operator()(double eps) const { return ratio * eps; }
  std::string describe() const;
  static DeltaRule parse(std::string_view text);
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Exponents;
  std::vector<double> mus;
  EpsGrid grid{};
  DeltaRule delta{};
  unsigned seed = 1;
  std::string csv_path;   ///< empty: no CSV file
  std::string json_path;  ///< empty: no JSON file
  bool certified_only = false;

  /// Throws ArgumentError on an invalid grid, delta rule or mu list.
  void validate() const;
  /// The default mu list for the experiment.
  static ExperimentConfig defaults(Experiment e);
};

struct SeriesFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
  std::size_t count = 0;
};

/// Ordinary least squares of log(value) on log(eps). Needs three points and
/// positive eps and values. A constant series has slope 0 and R^2 = 1.
SeriesFit fit_exponent(std::span<const std::pair<double, double>> series);

/// Per-point share of the OLS slope: (x_i - mean x)(y_i - mean y) / Sxx on logs; sums to the slope.
std::vector<double> slope_contributions(std::span<const std::pair<double, double>> series);

struct QtiRow {
  double eps = 0.0;
  double delta = 0.0;
  Bound lower;  ///< certified ell lower bound
  Bound upper;  ///< ell^(2) chain upper bound
  double ratio = 0.0;
};

struct QtiScan {
  double mu = 0.0;
  std::vector<QtiRow> rows;
  SeriesFit fit;  ///< log ratio against log eps
};

/// ratio = sqrt-trick ell lower / ell^(2) chain upper on GPlain(mu) at (p_delta, p_eps).
/// Needs mu > 1. A failing bound rethrows with the eps value in the message.
QtiScan qti_ratio_scan(double mu, std::span<const double> eps_grid, const DeltaRule& delta);

/// One CSV line.
struct ReportRow {
  std::string experiment;
  double mu = 0.0;
  double eps = 0.0;
  double delta = 0.0;  ///< 0 for infinitesimal quantities
  std::string quantity;
  std::string direction;
  std::string grade;
  double value = 0.0;
  std::string family;
  std::optional<double> slope_contrib;
  std::string series;  ///< fit key, not written to the CSV
};

struct NamedFit {
  std::string series;
  double mu = 0.0;
  SeriesFit fit;
  std::optional<double> expected_slope;
};

struct Check {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct Report {
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  std::vector<NamedFit> fits;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
};

/// Slope tolerance and R^2 floor for the exponent fits.
inline constexpr double kSlopeTolerance = 0.05;
inline constexpr double kMinR2 = 0.99;

/// Fitted slopes for the certified series on GPlain(mu): ell lower and upper
/// 1/(2 mu), ell^(2) upper 1/mu, both 1 for mu <= 1/2.
double expected_ell_slope(double mu);
double expected_chain_slope(double mu);

std::string csv_header();
std::string to_csv(const ReportRow& row);

/// Runs the experiment and writes the configured files. Rows are ordered by
/// (mu, eps, quantity) independently of thread scheduling. On a computation
/// failure the rows gathered so far are flushed before the error propagates.
Report run_experiment(const ExperimentConfig& config);

/// Writes rows as CSV; throws Error naming the path on I/O failure.
void write_csv(const std::string& path, const std::vector<ReportRow>& rows);

}  // namespace kobalab
