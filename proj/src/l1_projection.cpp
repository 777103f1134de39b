#include "vmfb/error.hpp"
#include "vmfb/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace vmfb {

namespace {

void check_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("L1 ball radius must be positive and finite");
}

Vector shrink(const Vector& x, const Vector& thresholds) {
  return x.cwiseSign().cwiseProduct((x.cwiseAbs() - thresholds).cwiseMax(0.0));
}

}  // namespace

Vector project_l1_ball(const Vector& x, double radius) {
  check_radius(radius);
  if (x.lpNorm<1>() <= radius) return x;

  std::vector<double> u(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = std::abs(x[i]);
  std::sort(u.begin(), u.end(), std::greater<>());

  // theta is fixed by the largest rho with u_rho > (sum_{j<=rho} u_j - t) / rho.
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
    if (u[j] > candidate) theta = candidate;
    else break;
  }
  return shrink(x, Vector::Constant(x.size(), theta));
}

Vector project_l1_ball_weighted(const Vector& x, const Vector& d, double radius,
                                const WeightedL1Options& opts) {
  check_radius(radius);
  if (d.size() != x.size()) throw DimensionError("project_l1_ball_weighted: weight dimension");
  if ((d.array() <= 0.0).any())
    throw std::invalid_argument("project_l1_ball_weighted: weights must be positive");
  if (x.lpNorm<1>() <= radius) return x;

  // p_i(theta) = sign(x_i) max(|x_i| - theta d_i, 0); mass(theta) = ||p(theta)||_1
  // is continuous and decreasing, and the projection has mass exactly t.
  const Vector ax = x.cwiseAbs();
  auto mass = [&](double theta) { return (ax - theta * d).cwiseMax(0.0).sum(); };

  double lo = 0.0;
  double hi = ax.cwiseQuotient(d).maxCoeff();
  const double target_tol = opts.tol * radius;
  double theta = 0.5 * (lo + hi);
  bool converged = false;
  for (int step = 0; step < opts.max_steps; ++step) {
    theta = 0.5 * (lo + hi);
    const double m = mass(theta);
    if (std::abs(m - radius) <= target_tol) {
      converged = true;
      break;
    }
    if (m > radius) lo = theta;
    else hi = theta;
    if (hi - lo <= 0.0) break;
  }

  // Solve exactly on the active set located by bisection; the result is kept
  // only if the active set it induces is the same one.
  double sum_x = 0.0;
  double sum_d = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (ax[i] > theta * d[i]) {
      sum_x += ax[i];
      sum_d += d[i];
    }
  }
  if (sum_d > 0.0) {
    const double exact = (sum_x - radius) / sum_d;
    bool consistent = exact >= 0.0;
    for (Eigen::Index i = 0; consistent && i < x.size(); ++i) {
      const bool active = ax[i] > theta * d[i];
      const bool active_exact = ax[i] > exact * d[i];
      if (active != active_exact && std::abs(ax[i] - exact * d[i]) > target_tol) consistent = false;
    }
    if (consistent) {
      theta = exact;
      converged = true;
    }
  }
  if (!converged && std::abs(mass(theta) - radius) > target_tol)
    throw ConvergenceError("project_l1_ball_weighted: bisection did not converge");
  return shrink(x, theta * d);
}

}  // namespace vmfb
