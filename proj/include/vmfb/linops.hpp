#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>

namespace vmfb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// True when every entry is finite.
bool all_finite(const Vector& x);

enum class MetricKind { ScaledIdentity, Diagonal, DenseSPD };

/// Symmetric positive-definite operator U with cached spectral bounds
/// min_eig() * I <= U <= op_norm() * I.
///
/// Values are immutable and share their storage, so copies are cheap and
/// safe to pass between threads. A scaled identity has no fixed dimension and
/// accepts vectors of any length.
class Metric {
 public:
  static Metric identity() { return scaled_identity(1.0); }
  static Metric scaled_identity(double c);
  static Metric diagonal(Vector d);
  /// Symmetry is checked to 1e-12 relative tolerance; the matrix is
  /// symmetrized, eigen-decomposed for the bounds and Cholesky-factored once.
  static Metric dense(const Matrix& m);

  MetricKind kind() const { return kind_; }
  /// 0 for a scaled identity.
  Eigen::Index dim() const;
  double op_norm() const { return norm_; }
  double min_eig() const { return min_eig_; }

  double scale() const { return scale_; }
  const Vector& diag() const;
  const Matrix& matrix() const;
  Matrix to_dense(Eigen::Index n) const;

  Vector apply(const Vector& x) const;
  Vector inv_apply(const Vector& x) const;
  /// ||x||_U
  double norm(const Vector& x) const;
  /// ||x||_{U^{-1}}
  double inv_norm(const Vector& x) const;
  /// <x, y>_{U^{-1}}
  double inv_inner(const Vector& x, const Vector& y) const;

  /// The metric c * U.
  Metric scaled(double c) const;

 private:
  struct Dense;
  Metric() = default;
  void check_dim(const Vector& x) const;

  MetricKind kind_ = MetricKind::ScaledIdentity;
  double scale_ = 1.0;
  std::shared_ptr<const Vector> diag_;
  std::shared_ptr<const Dense> dense_;
  double norm_ = 1.0;
  double min_eig_ = 1.0;
};

Vector metric_apply(const Metric& u, const Vector& x);
Vector metric_inv_apply(const Metric& u, const Vector& x);
double metric_norm(const Metric& u, const Vector& x);

/// Loewner test lhs >= rhs for two metrics over dimension n, to a relative
/// tolerance on the smallest eigenvalue of the difference.
bool loewner_geq(const Metric& lhs, const Metric& rhs, Eigen::Index n,
                 double rel_tol = 1e-12);

struct OpNormEstimate {
  double value = 0.0;
  double tol = 0.0;
  bool certified = false;
  int iterations = 0;

  /// Upper bound value * (1 + tol) on the spectral norm when certified.
  double upper() const { return value * (1.0 + tol); }
};

struct PowerIterationOptions {
  double tol = 1e-6;
  int max_iter = 5000;
  std::uint64_t seed = 0x5eed;
};

/// Spectral norm of a dense matrix from L^T L, by power iteration
/// accelerated with restarted Lanczos. max_iter counts products with L^T L.
///
/// Iteration stops once the Rayleigh residual ||L^T L v - rho v|| falls below
/// tol * rho, which places an eigenvalue of L^T L within a factor (1 +- tol)
/// of rho. When max_iter is exhausted the best estimate is returned with
/// certified = false.
OpNormEstimate op_norm_estimate(const Matrix& l, const PowerIterationOptions& opts = {});

/// Dense m x n linear map with an optional certified spectral-norm estimate.
class LinearMap {
 public:
  LinearMap() = default;
  explicit LinearMap(Matrix m);
  LinearMap(Matrix m, OpNormEstimate est);

  const Matrix& matrix() const { return *m_; }
  Eigen::Index rows() const { return m_->rows(); }
  Eigen::Index cols() const { return m_->cols(); }
  const std::optional<OpNormEstimate>& norm_estimate() const { return est_; }

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& y) const;

  /// Copy carrying a freshly computed estimate.
  LinearMap with_norm_estimate(const PowerIterationOptions& opts = {}) const;

 private:
  std::shared_ptr<const Matrix> m_ = std::make_shared<const Matrix>();
  std::optional<OpNormEstimate> est_;
};

OpNormEstimate op_norm_estimate(const LinearMap& l, const PowerIterationOptions& opts = {});

}  // namespace vmfb
