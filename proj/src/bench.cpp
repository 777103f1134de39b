#include "vmfb/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vmfb::bench {

namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

Metric make_metric(const MetricSpec& spec, Eigen::Index n) {
  switch (spec.choice) {
    case MetricChoice::Identity: return Metric::identity();
    case MetricChoice::Scaled: return Metric::scaled_identity(spec.scale);
    case MetricChoice::DiagonalRamp: {
      if (!(spec.ratio >= 1.0)) throw std::invalid_argument("diagonal ramp ratio must be >= 1");
      Vector d(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double s = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 1.0;
        d[i] = spec.scale * (1.0 / spec.ratio + s * (1.0 - 1.0 / spec.ratio));
      }
      return Metric::diagonal(std::move(d));
    }
  }
  return Metric::identity();
}

CellOutput run_cell(const LassoInstance& inst, const ProblemTriple& triple, double gamma_mult,
                    double lambda, double epsilon, const ExperimentConfig& cfg) {
  CellOutput out;
  out.row.gamma_mult = gamma_mult;
  out.row.lambda = lambda;
  out.row.epsilon = epsilon;

  const Eigen::Index n = inst.x_true.size();
  const Metric u = make_metric(cfg.metric, n);
  // gamma ||U|| = gamma_mult * beta, so gamma_mult < 2 is the admissible range
  // whatever the metric.
  const double gamma = gamma_mult * triple.beta / u.op_norm();

  Schedules s;
  s.gamma = ScalarSchedule::constant(gamma);
  s.lambda = ScalarSchedule::constant(lambda);
  s.metrics = MetricSchedule::constant(u);
  out.row.schedule_valid = validate_schedules(s, triple.beta, 64, cfg.mode, n).all_passed();

  StoppingRule stop;
  stop.epsilon = epsilon;
  stop.max_iter = cfg.max_iter;
  stop.mode = StopMode::RelativeChange;

  SolveOptions opts;
  opts.strict = cfg.strict;
  opts.snapshots = SnapshotPolicy::Never;
  if (cfg.trace_dir) opts.objective = [&inst](const Vector& x) { return lasso_objective(inst, x); };

  const auto start = std::chrono::steady_clock::now();
  out.trace = solve(triple.prox, triple.grad, s, stop, Vector::Zero(n), opts);
  const auto stop_time = std::chrono::steady_clock::now();

  out.row.wall_ms = std::chrono::duration<double, std::milli>(stop_time - start).count();
  out.row.iter = out.trace.iterations;
  out.row.err = (out.trace.x_final - inst.x_true).norm();
  out.row.obj = lasso_objective(inst, out.trace.x_final);
  out.row.status = to_string(out.trace.status);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  LassoInstance inst = generate_lasso_instance(cfg.m, cfg.n, cfg.k, cfg.seed);
  return run_experiment(cfg, inst);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const LassoInstance& given) {
  ExperimentResult result;
  result.instance = given;
  if (cfg.t) result.instance.t = *cfg.t;
  const LassoInstance& inst = result.instance;

  struct Cell {
    double gamma_mult, lambda, epsilon;
  };
  std::vector<Cell> cells;
  for (double g : sorted_unique(cfg.gamma_mults))
    for (double l : sorted_unique(cfg.lambdas))
      for (double e : sorted_unique(cfg.epsilons)) cells.push_back({g, l, e});

  result.rows.resize(cells.size());
  result.solutions.assign(cells.size(), Vector());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    result.rows[i].gamma_mult = cells[i].gamma_mult;
    result.rows[i].lambda = cells[i].lambda;
    result.rows[i].epsilon = cells[i].epsilon;
  }

  std::optional<ProblemTriple> triple;
  try {
    triple = build_lasso(inst);
  } catch (const std::exception& e) {
    for (auto& row : result.rows) row.status = std::string("Error: ") + e.what();
    return result;
  }
  if (cfg.trace_dir) std::filesystem::create_directories(*cfg.trace_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      try {
        CellOutput out = run_cell(inst, *triple, c.gamma_mult, c.lambda, c.epsilon, cfg);
        if (cfg.trace_dir)
          write_file(*cfg.trace_dir / trace_file_name(c.gamma_mult, c.lambda, c.epsilon), trace_csv(out.trace));
        result.rows[i] = out.row;
        result.solutions[i] = std::move(out.trace.x_final);
      } catch (const std::exception& e) {
        result.rows[i].status = std::string("Error: ") + e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return result;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.gamma_mult != b.gamma_mult) return a.gamma_mult < b.gamma_mult;
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.epsilon < b.epsilon;
  });
}

Report report_table(std::vector<ResultRow> rows, bool include_timing) {
  sort_rows(rows);
  Report rep;
  std::ostringstream csv;
  csv << kCsvHeader << '\n';
  for (const auto& r : rows) {
    // Statuses never contain commas in practice; strip them so the CSV stays
    // one field per column.
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    csv << format("%.10g", r.gamma_mult) << ',' << format("%.10g", r.lambda) << ','
        << format("%.10g", r.epsilon) << ',' << r.iter << ',' << format("%.10e", r.err) << ','
        << format("%.10e", r.obj) << ',' << format("%.3f", include_timing ? r.wall_ms : 0.0) << ','
        << status << '\n';
  }
  rep.csv = csv.str();

  std::ostringstream txt;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-8s %-8s %8s %12s %12s %10s  %s\n", "gamma*L", "lambda", "eps",
                "Iter", "Err", "Obj", "ms", "status");
  txt << line;
  txt << std::string(88, '-') << '\n';
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10.4g %-8.4g %-8.1e %8zu %12.4e %12.4e %10.1f  %s\n", r.gamma_mult,
                  r.lambda, r.epsilon, r.iter, r.err, r.obj, include_timing ? r.wall_ms : 0.0, r.status.c_str());
    txt << line;
  }
  rep.text = txt.str();
  return rep;
}

std::vector<ResultRow> parse_rows_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw std::invalid_argument("parse_rows_csv: unexpected header '" + line + "'");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 8) throw std::invalid_argument("parse_rows_csv: expected 8 fields in '" + line + "'");
    ResultRow r;
    r.gamma_mult = std::stod(f[0]);
    r.lambda = std::stod(f[1]);
    r.epsilon = std::stod(f[2]);
    r.iter = static_cast<std::size_t>(std::stoull(f[3]));
    r.err = std::stod(f[4]);
    r.obj = std::stod(f[5]);
    r.wall_ms = std::stod(f[6]);
    r.status = f[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string trace_csv(const RunTrace& trace) {
  std::ostringstream os;
  os << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    os << r.k << ',' << format("%.10e", r.objective) << ',' << format("%.10e", r.residual) << ','
       << format("%.10e", r.rel_change) << '\n';
  }
  return os.str();
}

std::string trace_file_name(double gamma_mult, double lambda, double epsilon) {
  return "trace_g" + format("%g", gamma_mult) + "_l" + format("%g", lambda) + "_e" + format("%g", epsilon) +
         ".csv";
}

std::string signal_overlay_csv(const Vector& x_true, const Vector& x_hat) {
  if (x_true.size() != x_hat.size()) throw std::invalid_argument("signal overlay: dimension mismatch");
  std::ostringstream os;
  os << "index,true,recovered\n";
  for (Eigen::Index i = 0; i < x_true.size(); ++i)
    os << i << ',' << format("%.17g", x_true[i]) << ',' << format("%.17g", x_hat[i]) << '\n';
  return os.str();
}

void emit_signal_overlay(const Vector& x_true, const Vector& x_hat, const std::filesystem::path& path) {
  write_file(path, signal_overlay_csv(x_true, x_hat));
}

std::string metadata_json(const ExperimentConfig& cfg, const LassoInstance& inst,
                          const std::vector<ResultRow>& rows) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["tool"] = "vmfb-bench";
  j["version"] = kVersion;
  j["problem"] = {{"kind", "lasso"},
                  {"m", cfg.m},
                  {"n", cfg.n},
                  {"k", cfg.k},
                  {"seed", cfg.seed},
                  {"t", inst.t},
                  {"t_default", !cfg.t.has_value()},
                  {"rng", inst.rng_id}};
  j["gamma_grid"] = cfg.gamma_mults;
  j["gamma_unit"] = "1/(L*||U||), L = 1/beta certified";
  j["lambda_grid"] = cfg.lambdas;
  j["epsilons"] = cfg.epsilons;
  j["metric"] = {{"kind", to_string(cfg.metric.choice)}, {"scale", cfg.metric.scale}, {"ratio", cfg.metric.ratio}};
  j["theorem_mode"] = to_string(cfg.mode);
  j["strict"] = cfg.strict;
  j["max_iter"] = cfg.max_iter;
  j["stopping_rule"] = "||x_{k+1}-x_k||_2 / ||x_k||_2 <= eps (absolute change when x_k = 0)";
  j["err_norm"] = "l2";
  j["obj"] = "0.5*||A x - b||_2^2";
  auto cells = nlohmann::ordered_json::array();
  std::vector<ResultRow> sorted = rows;
  sort_rows(sorted);
  for (const auto& r : sorted)
    cells.push_back({{"gamma_mult", r.gamma_mult},
                     {"lambda", r.lambda},
                     {"epsilon", r.epsilon},
                     {"status", r.status},
                     {"schedule_valid", r.schedule_valid}});
  j["rows"] = cells;
  return j.dump(2) + "\n";
}

std::string to_string(MetricChoice c) {
  switch (c) {
    case MetricChoice::Identity: return "identity";
    case MetricChoice::Scaled: return "scaled";
    case MetricChoice::DiagonalRamp: return "diagonal-ramp";
  }
  return "identity";
}

MetricChoice metric_choice_from_string(const std::string& s) {
  if (s == "identity") return MetricChoice::Identity;
  if (s == "scaled") return MetricChoice::Scaled;
  if (s == "diagonal-ramp" || s == "diagonal") return MetricChoice::DiagonalRamp;
  throw std::invalid_argument("unknown metric '" + s + "' (identity | scaled | diagonal-ramp)");
}

std::string to_string(TheoremMode m) {
  return m == TheoremMode::UniformGap ? "uniform-gap" : "divergent-sum";
}

TheoremMode theorem_mode_from_string(const std::string& s) {
  if (s == "uniform-gap") return TheoremMode::UniformGap;
  if (s == "divergent-sum") return TheoremMode::DivergentSum;
  throw std::invalid_argument("unknown theorem mode '" + s + "' (uniform-gap | divergent-sum)");
}

}  // namespace vmfb::bench
