#pragma once

#include "vmfb/linops.hpp"
#include "vmfb/operators.hpp"
#include "vmfb/schedules.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vmfb {

/// (4 beta - gamma ||U||) / (2 beta), the exclusive upper bound on the
/// relaxation parameter. Throws ParameterError unless 0 < gamma < 2 beta/||U||.
double relaxation_upper_bound(double beta, double gamma, double norm_u);

/// Which set of convergence conditions to check. UniformGap wants
/// lambda_k bounded away from 1/alpha_k; DivergentSum only needs
/// sum lambda_k (1/alpha_k - lambda_k) = inf, plus summable parameter drift.
enum class TheoremMode { UniformGap, DivergentSum };

struct ConditionResult {
  std::string id;
  std::string description;
  bool passed = false;
  /// Asymptotic condition judged from a finite horizon.
  bool heuristic = false;
  double value = 0.0;
};

struct ValidityReport {
  TheoremMode mode = TheoremMode::UniformGap;
  std::size_t horizon = 0;
  std::vector<ConditionResult> conditions;

  bool all_passed() const;
  const ConditionResult* find(const std::string& id) const;
  std::string to_string() const;
};

/// Checks the parameter conditions of the chosen convergence theorem over
/// iterations [0, horizon). Sum conditions are judged by partial sums and a
/// head/tail comparison and are flagged heuristic. `probes` are the vectors
/// used for the pointwise metric-drift sum; empty means the first few
/// standard basis vectors and the all-ones vector.
ValidityReport validate_schedules(const Schedules& s, double beta, std::size_t horizon,
                                  TheoremMode mode, Eigen::Index dim,
                                  const std::vector<Vector>& probes = {});

/// x + lambda (J_{gamma U A}(x - gamma U (Bx + b)) + a - x).
/// With strict set, throws ParameterError for gamma or lambda out of range.
Vector fb_step(const Proximable& p, const Cocoercive& b, const Metric& u, double gamma,
               double lambda, const Vector& a_err, const Vector& b_err, const Vector& x,
               bool strict = false);

enum class StopMode { RelativeChange, FixedPointResidual };

struct StoppingRule {
  double epsilon = 1e-6;
  std::size_t max_iter = 200000;
  StopMode mode = StopMode::RelativeChange;
};

/// RelativeChange: ||x_next - x_prev|| / ||x_prev|| <= epsilon, falling back
/// to the absolute change when x_prev = 0. FixedPointResidual: residual <=
/// epsilon.
bool stopping_check(const StoppingRule& rule, const Vector& x_prev, const Vector& x_next,
                    double residual);

enum class RunStatus { Converged, MaxIterReached, ParameterViolation, Diverged };
std::string to_string(RunStatus s);

struct IterationRecord {
  std::size_t k = 0;
  std::uint64_t x_hash = 0;
  std::optional<Vector> x;
  double residual = 0.0;
  /// NaN on the x_0 row.
  double rel_change = 0.0;
  /// ||x_k - x*||_{U_k^{-1}} when a reference point was given, else NaN.
  double ref_distance = 0.0;
  /// NaN when no objective was given.
  double objective = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  double inv_alpha = 0.0;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::MaxIterReached;
  std::size_t iterations = 0;
  std::size_t violations = 0;
  Vector x_final;
  std::string diagnostic;

  double final_residual() const { return records.back().residual; }
};

enum class SnapshotPolicy { Auto, Always, Never };

struct SolveOptions {
  /// Strict: stop with ParameterViolation on the first out-of-range
  /// gamma_k or lambda_k. Permissive: count the violation and continue.
  /// lambda_k equal to 1/alpha_k (to 1e-9 relative) is accepted.
  bool strict = true;
  std::optional<Vector> reference;
  std::function<double(const Vector&)> objective;
  /// Auto keeps iterates when n <= 256.
  SnapshotPolicy snapshots = SnapshotPolicy::Auto;
};

/// Runs the relaxed variable-metric forward-backward iteration
///   y_k     = x_k - gamma_k U_k (B x_k + b_k)
///   x_{k+1} = x_k + lambda_k (J_{gamma_k U_k A}(y_k) + a_k - x_k)
/// from x0 until the stopping rule fires or max_iter steps have run.
RunTrace solve(const Proximable& p, const Cocoercive& b, const Schedules& s,
               const StoppingRule& stop, const Vector& x0, const SolveOptions& opts = {});

/// FNV-1a over the raw bytes of the entries.
std::uint64_t hash_vector(const Vector& x);

}  // namespace vmfb
