#pragma once

#include "vmfb/problems.hpp"
#include "vmfb/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vmfb::bench {

inline constexpr const char* kVersion = "1.0.0";

enum class MetricChoice { Identity, Scaled, DiagonalRamp };

struct MetricSpec {
  MetricChoice choice = MetricChoice::Identity;
  double scale = 1.0;
  double ratio = 4.0;
};

/// ScaledIdentity(scale), or a diagonal with entries linearly spaced from
/// scale / ratio (first coordinate) to scale (last coordinate).
Metric make_metric(const MetricSpec& spec, Eigen::Index n);

struct ExperimentConfig {
  int m = 24;
  int n = 100;
  int k = 4;
  std::uint64_t seed = 7;
  /// Defaults to ||x_true||_1.
  std::optional<double> t;
  /// Step sizes as multiples of 1/(L ||U||), L = 1/beta the certified
  /// Lipschitz constant of the gradient.
  std::vector<double> gamma_mults{0.5, 1.0, 1.9};
  std::vector<double> lambdas{0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.5};
  std::vector<double> epsilons{1e-6};
  MetricSpec metric;
  TheoremMode mode = TheoremMode::UniformGap;
  bool strict = true;
  std::size_t max_iter = 200000;
  unsigned threads = 1;
  /// Write one trace CSV per cell here when set.
  std::optional<std::filesystem::path> trace_dir;
};

struct ResultRow {
  double gamma_mult = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  std::size_t iter = 0;
  /// ||x_hat - x_true||_2
  double err = 0.0;
  /// 1/2 ||A x_hat - b||^2
  double obj = 0.0;
  double wall_ms = 0.0;
  std::string status;
  /// Whether the schedules passed the configured theorem's checks; not part
  /// of the CSV.
  bool schedule_valid = false;
};

struct CellOutput {
  ResultRow row;
  RunTrace trace;
};

/// One solver run on a prepared instance.
CellOutput run_cell(const LassoInstance& inst, const ProblemTriple& triple, double gamma_mult,
                    double lambda, double epsilon, const ExperimentConfig& cfg);

struct ExperimentResult {
  LassoInstance instance;
  std::vector<ResultRow> rows;
  /// Final iterate of each row, same order.
  std::vector<Vector> solutions;
};

/// Runs every (gamma, lambda, epsilon) cell on one instance. Rows come back
/// in report order regardless of `threads`; cell failures become a status
/// string instead of aborting the sweep.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg, const LassoInstance& inst);

/// gamma ascending, then lambda, then epsilon.
void sort_rows(std::vector<ResultRow>& rows);

inline constexpr const char* kCsvHeader = "gamma_mult,lambda,epsilon,iter,err,obj,wall_ms,status";
inline constexpr const char* kTraceHeader = "k,obj,residual,rel_change";

struct Report {
  std::string text;
  std::string csv;
};

/// Table text plus CSV, rows in sorted order. With include_timing false the
/// wall_ms column is written as 0 so the output is byte-stable.
Report report_table(std::vector<ResultRow> rows, bool include_timing = true);
std::vector<ResultRow> parse_rows_csv(const std::string& csv);

std::string trace_csv(const RunTrace& trace);
std::string trace_file_name(double gamma_mult, double lambda, double epsilon);

/// CSV (index, true, recovered).
void emit_signal_overlay(const Vector& x_true, const Vector& x_hat,
                         const std::filesystem::path& path);
std::string signal_overlay_csv(const Vector& x_true, const Vector& x_hat);

/// Run metadata document, `schema: 1`.
std::string metadata_json(const ExperimentConfig& cfg, const LassoInstance& inst,
                          const std::vector<ResultRow>& rows);

std::string to_string(MetricChoice c);
MetricChoice metric_choice_from_string(const std::string& s);
std::string to_string(TheoremMode m);
TheoremMode theorem_mode_from_string(const std::string& s);

}  // namespace vmfb::bench
