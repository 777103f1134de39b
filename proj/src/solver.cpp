#include "vmfb/solver.hpp"

#include "vmfb/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

namespace vmfb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Head/tail comparisons over the horizon. A nonnegative series whose second
// half contributes less than kTailFraction of its first half is read as
// summable; otherwise as divergent. A positive sequence whose second-half
// minimum stays within kUniformFraction of its first-half minimum is read as
// bounded away from zero.
constexpr double kTailFraction = 0.05;
constexpr double kUniformFraction = 0.9;

struct HeadTail {
  double head = 0.0;
  double tail = 0.0;
  double total() const { return head + tail; }
};

HeadTail split_sum(const std::vector<double>& terms) {
  HeadTail s;
  const std::size_t half = (terms.size() + 1) / 2;
  for (std::size_t i = 0; i < terms.size(); ++i) (i < half ? s.head : s.tail) += terms[i];
  return s;
}

bool looks_summable(const std::vector<double>& terms, double cap) {
  const HeadTail s = split_sum(terms);
  return std::isfinite(s.total()) && s.total() <= cap &&
         s.tail <= kTailFraction * s.head + 1e-12 * (1.0 + s.head);
}

bool looks_divergent(const std::vector<double>& terms) {
  const HeadTail s = split_sum(terms);
  return s.tail > 0.0 && s.tail >= kTailFraction * s.head;
}

bool looks_uniformly_positive(const std::vector<double>& seq) {
  if (seq.empty()) return false;
  const std::size_t half = (seq.size() + 1) / 2;
  const double head = *std::min_element(seq.begin(), seq.begin() + half);
  if (!(head > 0.0)) return false;
  if (half == seq.size()) return true;
  const double tail = *std::min_element(seq.begin() + half, seq.end());
  return tail >= kUniformFraction * head;
}

// lambda_k may sit on 1/alpha_k up to this relative rounding margin; the
// uniform-gap condition is what rejects a schedule that stays there.
constexpr double kBoundaryRelTol = 1e-9;

bool relaxation_admissible(double lambda, double inv_alpha) {
  return lambda > 0.0 && lambda <= inv_alpha * (1.0 + kBoundaryRelTol);
}

double safe_inv_alpha(double beta, double gamma, double norm_u) {
  if (!(gamma > 0.0) || !(gamma * norm_u < 2.0 * beta)) return kNaN;
  return std::isinf(beta) ? 2.0 : (4.0 * beta - gamma * norm_u) / (2.0 * beta);
}

}  // namespace

double relaxation_upper_bound(double beta, double gamma, double norm_u) {
  return 1.0 / averaged_constant_composed(beta, gamma, norm_u);
}

bool ValidityReport::all_passed() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const auto& c) { return c.passed; });
}

const ConditionResult* ValidityReport::find(const std::string& id) const {
  for (const auto& c : conditions)
    if (c.id == id) return &c;
  return nullptr;
}

std::string ValidityReport::to_string() const {
  std::ostringstream os;
  os << (mode == TheoremMode::UniformGap ? "uniform-gap" : "divergent-sum") << " over " << horizon << " iterations\n";
  for (const auto& c : conditions) {
    os << "  [" << (c.passed ? "pass" : "FAIL") << "] " << c.id << (c.heuristic ? " (heuristic)" : "")
       << ": " << c.description << " value=" << c.value << '\n';
  }
  return os.str();
}

ValidityReport validate_schedules(const Schedules& s, double beta, std::size_t horizon,
                                  TheoremMode mode, Eigen::Index dim,
                                  const std::vector<Vector>& probes_in) {
  if (horizon < 1) throw std::invalid_argument("validate_schedules: horizon must be >= 1");
  ValidityReport report;
  report.mode = mode;
  report.horizon = horizon;
  auto add = [&](std::string id, std::string description, bool passed, bool heuristic, double value) {
    report.conditions.push_back({std::move(id), std::move(description), passed, heuristic, value});
  };

  std::vector<Metric> metrics;
  std::vector<double> gamma(horizon), lambda(horizon), eta(horizon), inv_alpha(horizon);
  metrics.reserve(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    metrics.push_back(s.metrics(k));
    gamma[k] = s.gamma(k);
    lambda[k] = s.lambda(k);
    eta[k] = s.eta(k);
    inv_alpha[k] = safe_inv_alpha(beta, gamma[k], metrics[k].op_norm());
  }

  // Metric conditions shared by both theorems.
  double mu = 0.0;
  double alpha_lo = std::numeric_limits<double>::infinity();
  for (const auto& u : metrics) {
    mu = std::max(mu, u.op_norm());
    alpha_lo = std::min(alpha_lo, u.min_eig());
  }
  add("metric_bounded", "sup ||U_k|| finite and U_k >= alpha I with alpha > 0",
      std::isfinite(mu) && alpha_lo > 0.0, true, mu);

  std::size_t order_failures = 0;
  for (std::size_t k = 0; k + 1 < horizon; ++k) {
    if (!(eta[k] >= 0.0)) continue;  // reported by eta_summable
    if (!loewner_geq(metrics[k + 1].scaled(1.0 + eta[k]), metrics[k], dim)) ++order_failures;
  }
  add("metric_ordering", "(1 + eta_k) U_{k+1} >= U_k", order_failures == 0, false,
      static_cast<double>(order_failures));

  const bool eta_nonneg = std::all_of(eta.begin(), eta.end(), [](double e) { return e >= 0.0; });
  add("eta_summable", "eta_k >= 0 with finite sum", eta_nonneg && looks_summable(eta, s.summability_cap),
      true, std::accumulate(eta.begin(), eta.end(), 0.0));

  auto error_terms = [&](const VectorSchedule& e) {
    std::vector<double> terms(horizon, 0.0);
    if (!e.is_zero())
      for (std::size_t k = 0; k < horizon; ++k) terms[k] = std::abs(lambda[k]) * e(k, dim).norm();
    return terms;
  };
  const auto a_terms = error_terms(s.a_err);
  const auto b_terms = error_terms(s.b_err);
  add("error_a_summable", "sum lambda_k ||a_k|| finite", looks_summable(a_terms, s.summability_cap), true,
      split_sum(a_terms).total());
  add("error_b_summable", "sum lambda_k ||b_k|| finite", looks_summable(b_terms, s.summability_cap), true,
      split_sum(b_terms).total());

  double worst_step = 0.0;
  bool step_ok = true;
  for (std::size_t k = 0; k < horizon; ++k) {
    const double ratio = gamma[k] * metrics[k].op_norm() / (2.0 * beta);
    worst_step = std::max(worst_step, ratio);
    if (!(gamma[k] > 0.0) || !(ratio < 1.0)) step_ok = false;
  }
  add("step_range", "0 < gamma_k < 2 beta / ||U_k||", step_ok, false, worst_step);

  double worst_relax = -std::numeric_limits<double>::infinity();
  bool relax_ok = true;
  std::vector<double> gap(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    gap[k] = inv_alpha[k] - lambda[k];
    worst_relax = std::max(worst_relax, lambda[k] - inv_alpha[k]);
    if (std::isnan(inv_alpha[k]) || !relaxation_admissible(lambda[k], inv_alpha[k])) relax_ok = false;
  }
  add("relaxation_range", "0 < lambda_k <= 1/alpha_k", relax_ok, false, worst_relax);

  const double max_gamma = *std::max_element(gamma.begin(), gamma.end());
  add("step_lower_bound", "gamma_k >= gamma_min > 0", looks_uniformly_positive(gamma), true,
      *std::min_element(gamma.begin(), gamma.end()));
  add("step_upper_margin", "gamma_k <= (2 beta - eps) / mu for some eps > 0",
      std::isinf(beta) || max_gamma * mu < 2.0 * beta, true,
      std::isinf(beta) ? std::numeric_limits<double>::infinity() : 2.0 * beta - max_gamma * mu);

  if (mode == TheoremMode::UniformGap) {
    add("relaxation_lower_bound", "lambda_k >= lambda_min > 0", looks_uniformly_positive(lambda), true,
        *std::min_element(lambda.begin(), lambda.end()));
    add("relaxation_uniform_gap", "lambda_k <= 1/alpha_k - tau for a fixed tau > 0",
        relax_ok && looks_uniformly_positive(gap), true, *std::min_element(gap.begin(), gap.end()));
    return report;
  }

  std::vector<double> a_terms_div(horizon);
  for (std::size_t k = 0; k < horizon; ++k) a_terms_div[k] = lambda[k] * gap[k];
  add("relaxation_divergent_sum", "sum lambda_k (1/alpha_k - lambda_k) = +inf",
      relax_ok && looks_divergent(a_terms_div), true, split_sum(a_terms_div).total());

  std::vector<double> dgamma(horizon - 1), dscaled(horizon - 1);
  for (std::size_t k = 0; k + 1 < horizon; ++k) {
    dgamma[k] = std::abs(gamma[k + 1] - gamma[k]);
    dscaled[k] = std::abs(gamma[k + 1] * metrics[k + 1].op_norm() - gamma[k] * metrics[k].op_norm());
  }
  add("step_variation_summable", "sum |gamma_{k+1} - gamma_k| finite",
      looks_summable(dgamma, s.summability_cap), true, split_sum(dgamma).total());
  add("scaled_step_variation_summable", "sum |gamma_{k+1} ||U_{k+1}|| - gamma_k ||U_k||| finite",
      looks_summable(dscaled, s.summability_cap), true, split_sum(dscaled).total());

  std::vector<Vector> probes = probes_in;
  if (probes.empty()) {
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(dim, 8); ++i) probes.push_back(Vector::Unit(dim, i));
    probes.push_back(Vector::Ones(dim));
  }
  bool drift_ok = true;
  double drift_max = 0.0;
  for (const auto& x : probes) {
    std::vector<double> drift(horizon - 1);
    for (std::size_t k = 0; k + 1 < horizon; ++k)
      drift[k] = (metrics[k].inv_apply(x) - metrics[k + 1].inv_apply(x)).norm();
    drift_ok = drift_ok && looks_summable(drift, s.summability_cap);
    drift_max = std::max(drift_max, split_sum(drift).total());
  }
  add("metric_drift_summable", "sum ||U_k^{-1} x - U_{k+1}^{-1} x|| finite on probe vectors", drift_ok,
      true, drift_max);
  return report;
}

Vector fb_step(const Proximable& p, const Cocoercive& b, const Metric& u, double gamma,
               double lambda, const Vector& a_err, const Vector& b_err, const Vector& x,
               bool strict) {
  if (strict) {
    const double inv_alpha = safe_inv_alpha(b.beta(), gamma, u.op_norm());
    if (std::isnan(inv_alpha))
      throw ParameterError("fb_step: gamma = " + std::to_string(gamma) + " outside (0, 2 beta / ||U||)");
    if (!relaxation_admissible(lambda, inv_alpha))
      throw ParameterError("fb_step: lambda = " + std::to_string(lambda) + " outside (0, 1/alpha)");
  }
  const Vector y = x - gamma * u.apply(b.apply(x) + b_err);
  return x + lambda * (p.resolvent(gamma, u, y) + a_err - x);
}

bool stopping_check(const StoppingRule& rule, const Vector& x_prev, const Vector& x_next,
                    double residual) {
  if (rule.mode == StopMode::FixedPointResidual) return residual <= rule.epsilon;
  const double change = (x_next - x_prev).norm();
  const double base = x_prev.norm();
  return base > 0.0 ? change / base <= rule.epsilon : change <= rule.epsilon;
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxIterReached: return "MaxIterReached";
    case RunStatus::ParameterViolation: return "ParameterViolation";
    case RunStatus::Diverged: return "Diverged";
  }
  return "Unknown";
}

std::uint64_t hash_vector(const Vector& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    unsigned char bytes[sizeof(double)];
    const double v = x[i];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

RunTrace solve(const Proximable& p, const Cocoercive& b, const Schedules& s,
               const StoppingRule& stop, const Vector& x0, const SolveOptions& opts) {
  if (!(stop.epsilon > 0.0)) throw std::invalid_argument("solve: epsilon must be positive");
  if (stop.max_iter < 1) throw std::invalid_argument("solve: max_iter must be >= 1");
  if (x0.size() < 1 || !x0.allFinite()) throw std::invalid_argument("solve: x0 must be finite and non-empty");
  if (opts.reference && opts.reference->size() != x0.size())
    throw DimensionError("solve: reference point dimension");

  const Eigen::Index n = x0.size();
  const double beta = b.beta();
  const bool keep_x = opts.snapshots == SnapshotPolicy::Always ||
                      (opts.snapshots == SnapshotPolicy::Auto && n <= 256);

  RunTrace trace;
  Vector x = x0;

  // Parameters and the exact forward-backward image at the current index.
  std::size_t k = 0;
  Metric u = s.metrics(0);
  double gamma = s.gamma(0);
  double lambda = s.lambda(0);
  Vector bx = b.apply(x);
  Vector tx = p.resolvent(gamma, u, x - gamma * u.apply(bx));
  double residual = (x - tx).norm();

  auto record = [&](double rel_change) {
    IterationRecord r;
    r.k = k;
    r.x_hash = hash_vector(x);
    if (keep_x) r.x = x;
    r.residual = residual;
    r.rel_change = rel_change;
    r.ref_distance = opts.reference ? u.inv_norm(x - *opts.reference) : kNaN;
    r.objective = opts.objective ? opts.objective(x) : kNaN;
    r.gamma = gamma;
    r.lambda = lambda;
    r.inv_alpha = safe_inv_alpha(beta, gamma, u.op_norm());
    trace.records.push_back(std::move(r));
  };
  record(kNaN);

  trace.status = RunStatus::MaxIterReached;
  for (;;) {
    if (stop.mode == StopMode::FixedPointResidual && residual <= stop.epsilon) {
      trace.status = RunStatus::Converged;
      break;
    }
    if (k >= stop.max_iter) break;

    const double inv_alpha = trace.records.back().inv_alpha;
    if (std::isnan(inv_alpha) || !relaxation_admissible(lambda, inv_alpha)) {
      ++trace.violations;
      if (opts.strict) {
        trace.status = RunStatus::ParameterViolation;
        std::ostringstream os;
        os << "iteration " << k << ": gamma=" << gamma << " lambda=" << lambda
           << " violate 0 < gamma ||U|| < 2 beta, 0 < lambda < 1/alpha (beta=" << beta
           << ", ||U||=" << u.op_norm() << ")";
        trace.diagnostic = os.str();
        break;
      }
    }

    Vector next;
    if (s.a_err.is_zero() && s.b_err.is_zero()) {
      next = x + lambda * (tx - x);
    } else {
      const Vector y = x - gamma * u.apply(bx + s.b_err(k, n));
      next = x + lambda * (p.resolvent(gamma, u, y) + s.a_err(k, n) - x);
    }
    if (!next.allFinite()) {
      trace.status = RunStatus::Diverged;
      trace.diagnostic = "non-finite iterate at step " + std::to_string(k + 1);
      break;
    }

    const double base = x.norm();
    const double change = (next - x).norm();
    const double rel_change = base > 0.0 ? change / base : change;
    const bool stop_now = stop.mode == StopMode::RelativeChange && stopping_check(stop, x, next, residual);

    x = std::move(next);
    ++k;
    u = s.metrics(k);
    gamma = s.gamma(k);
    lambda = s.lambda(k);
    bx = b.apply(x);
    tx = p.resolvent(gamma, u, x - gamma * u.apply(bx));
    residual = (x - tx).norm();
    record(rel_change);

    if (stop_now) {
      trace.status = RunStatus::Converged;
      break;
    }
  }

  trace.iterations = k;
  trace.x_final = x;
  return trace;
}

}  // namespace vmfb
