#pragma once

// Test-only reference computations. Nothing here calls into the library's
// projection, resolvent or power-iteration code.

#include "vmfb/linops.hpp"
#include "vmfb/rng.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using vmfb::Matrix;
using vmfb::Vector;

inline Vector random_vector(vmfb::Rng& rng, Eigen::Index n, double scale = 1.0) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.gaussian();
  return v;
}

inline Matrix random_matrix(vmfb::Rng& rng, Eigen::Index m, Eigen::Index n) {
  Matrix a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  return a;
}

inline Vector random_positive(vmfb::Rng& rng, Eigen::Index n, double lo, double hi) {
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = rng.uniform(lo, hi);
  return d;
}

/// Random SPD matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(vmfb::Rng& rng, Eigen::Index n, double lo, double hi) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  const Matrix q = qr.householderQ();
  const Vector eig = random_positive(rng, n, lo, hi);
  Matrix m = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

/// Largest singular value by a full SVD.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// argmin sum_i (p_i - x_i)^2 / (2 d_i)  s.t. ||p||_1 <= t, by enumerating
/// every sign pattern in {-1, 0, +1}^n. On the face with pattern s the
/// constraint reads sum_i s_i p_i = t, whose weighted least-squares solution
/// is p_i = x_i - nu d_i s_i. A candidate counts only if its signs agree with
/// s. Exponential in n; meant for n <= 6.
inline Vector l1_ball_projection_by_enumeration(const Vector& x, const Vector& d, double t) {
  const Eigen::Index n = x.size();
  if (x.lpNorm<1>() <= t) return x;
  Vector best = Vector::Zero(n);
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<int> s(n, -1);
  for (;;) {
    double sx = 0.0, sd = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (s[i] != 0) {
        sx += s[i] * x[i];
        sd += d[i];
      }
    }
    if (sd > 0.0) {
      const double nu = (sx - t) / sd;
      Vector p = Vector::Zero(n);
      bool ok = true;
      for (Eigen::Index i = 0; i < n && ok; ++i) {
        if (s[i] == 0) continue;
        p[i] = x[i] - nu * d[i] * s[i];
        if (s[i] * p[i] < 0.0) ok = false;
      }
      if (ok) {
        const double obj = ((p - x).array().square() / d.array()).sum();
        if (obj < best_obj) {
          best_obj = obj;
          best = p;
        }
      }
    }
    Eigen::Index i = 0;
    while (i < n && s[i] == 1) s[i++] = -1;
    if (i == n) break;
    ++s[i];
  }
  return best;
}

/// argmin 1/2 ||A x - b||^2 over lo <= x <= hi with A of full column rank,
/// by enumerating each coordinate as free / at lo / at hi and solving the
/// reduced least-squares problem on the free coordinates.
inline Vector box_least_squares_by_enumeration(const Matrix& a, const Vector& b, const Vector& lo,
                                               const Vector& hi) {
  const Eigen::Index n = a.cols();
  Vector best = lo;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<int> state(n, 0);  // 0 free, 1 lo, 2 hi
  for (;;) {
    Vector x = Vector::Zero(n);
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] == 0) free.push_back(i);
      else x[i] = state[i] == 1 ? lo[i] : hi[i];
    }
    if (!free.empty()) {
      Matrix af(a.rows(), static_cast<Eigen::Index>(free.size()));
      for (std::size_t j = 0; j < free.size(); ++j) af.col(static_cast<Eigen::Index>(j)) = a.col(free[j]);
      const Vector rhs = b - a * x;
      const Vector xf = af.colPivHouseholderQr().solve(rhs);
      for (std::size_t j = 0; j < free.size(); ++j) x[free[j]] = xf[static_cast<Eigen::Index>(j)];
    }
    const bool feasible = ((x.array() >= lo.array() - 1e-12) && (x.array() <= hi.array() + 1e-12)).all();
    if (feasible) {
      const double obj = 0.5 * (a * x - b).squaredNorm();
      if (obj < best_obj) {
        best_obj = obj;
        best = x;
      }
    }
    Eigen::Index i = 0;
    while (i < n && state[i] == 2) state[i++] = 0;
    if (i == n) break;
    ++state[i];
  }
  return best;
}

/// Central differences.
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                         double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace oracle
