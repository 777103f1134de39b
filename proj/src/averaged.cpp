#include "vmfb/error.hpp"
#include "vmfb/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vmfb {

namespace {

// gamma must lie in (0, 2 beta / ||U||); beta = +inf admits every gamma > 0.
void check_step(double beta, double gamma, double norm_u, const char* what) {
  if (!(beta > 0.0) || !(norm_u > 0.0) || !std::isfinite(norm_u))
    throw ParameterError(std::string(what) + ": beta and ||U|| must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma) || !(gamma * norm_u < 2.0 * beta))
    throw ParameterError(std::string(what) + ": gamma = " + std::to_string(gamma) +
                         " outside (0, 2 beta / ||U||)");
}

}  // namespace

double averaged_constant_forward(double beta, double gamma, double norm_u) {
  check_step(beta, gamma, norm_u, "averaged_constant_forward");
  if (std::isinf(beta)) return 0.0;
  return gamma * norm_u / (2.0 * beta);
}

double averaged_constant_composed(double beta, double gamma, double norm_u) {
  check_step(beta, gamma, norm_u, "averaged_constant_composed");
  if (std::isinf(beta)) return 0.5;
  return 2.0 * beta / (4.0 * beta - gamma * norm_u);
}

double compose_averaged(double a1, double a2) {
  return (a1 + a2 - 2.0 * a1 * a2) / (1.0 - a1 * a2);
}

double compose_averaged_max_rule(double a1, double a2) {
  return 2.0 / (1.0 + 1.0 / std::max(a1, a2));
}

double compose_averaged_sum_rule(double a1, double a2) {
  return a1 + a2 - a1 * a2;
}

double averaged_violation(const VectorMap& t, double alpha, const Metric& u,
                          const std::vector<VectorPair>& pairs) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("averaged_violation: alpha outside (0, 1)");
  const double weight = (1.0 - alpha) / alpha;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pairs) {
    const Vector tx = t(x);
    const Vector ty = t(y);
    const Vector dx = x - y;
    const Vector dt = tx - ty;
    const Vector dr = dx - dt;
    const double lhs = u.inv_inner(dt, dt);
    const double rhs = u.inv_inner(dx, dx) - weight * u.inv_inner(dr, dr);
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

bool check_averaged(const VectorMap& t, double alpha, const Metric& u,
                    const std::vector<VectorPair>& pairs, double slack) {
  return averaged_violation(t, alpha, u, pairs) <= slack;
}

VectorMap forward_backward_map(const Proximable& p, const Cocoercive& b, double gamma,
                               const Metric& u) {
  return [p, b, gamma, u](const Vector& x) -> Vector {
    return p.resolvent(gamma, u, x - gamma * u.apply(b.apply(x)));
  };
}

double fixed_point_residual(const Proximable& p, const Cocoercive& b, double gamma,
                            const Metric& u, const Vector& x) {
  return (x - forward_backward_map(p, b, gamma, u)(x)).norm();
}

PerturbationBound metric_perturbation_bound(const Proximable& p, const Cocoercive& b, double r,
                                            double s, const Metric& u, const Metric& v,
                                            const Vector& x) {
  if (!(r > 0.0) || !(s > 0.0)) throw ParameterError("metric_perturbation_bound: r, s must be positive");
  const Vector tr = forward_backward_map(p, b, r, u)(x);
  const Vector ts = forward_backward_map(p, b, s, v)(x);
  const Vector w = x - ts;
  PerturbationBound out;
  out.lhs = (tr - ts).norm();
  // 1 / lambda_min(U^{-1}) = ||U||
  out.rhs = u.op_norm() * (u.inv_apply(w) - (r / s) * v.inv_apply(w)).norm();
  return out;
}

}  // namespace vmfb
