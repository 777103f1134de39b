#include "vmfb/linops.hpp"

#include "vmfb/error.hpp"
#include "vmfb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace vmfb {

struct Metric::Dense {
  Matrix m;
  Eigen::LLT<Matrix> llt;
};

bool all_finite(const Vector& x) {
  return x.allFinite();
}

namespace {

std::string dim_message(const char* what, Eigen::Index expected, Eigen::Index got) {
  return std::string(what) + ": expected dimension " + std::to_string(expected) + ", got " +
         std::to_string(got);
}

}  // namespace

Metric Metric::scaled_identity(double c) {
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("Metric::scaled_identity: scale must be positive and finite");
  Metric u;
  u.kind_ = MetricKind::ScaledIdentity;
  u.scale_ = c;
  u.norm_ = c;
  u.min_eig_ = c;
  return u;
}

Metric Metric::diagonal(Vector d) {
  if (d.size() < 1) throw std::invalid_argument("Metric::diagonal: empty diagonal");
  if (!d.allFinite() || (d.array() <= 0.0).any())
    throw std::invalid_argument("Metric::diagonal: entries must be positive and finite");
  Metric u;
  u.kind_ = MetricKind::Diagonal;
  u.norm_ = d.maxCoeff();
  u.min_eig_ = d.minCoeff();
  u.diag_ = std::make_shared<const Vector>(std::move(d));
  return u;
}

Metric Metric::dense(const Matrix& m) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw std::invalid_argument("Metric::dense: matrix must be square and non-empty");
  if (!m.allFinite()) throw std::invalid_argument("Metric::dense: non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("Metric::dense: matrix is not symmetric");
  Matrix sym = 0.5 * (m + m.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw ConvergenceError("Metric::dense: eigensolver failed");
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) throw std::invalid_argument("Metric::dense: matrix is not positive definite");

  auto dense = std::make_shared<Dense>();
  dense->llt.compute(sym);
  if (dense->llt.info() != Eigen::Success)
    throw ConvergenceError("Metric::dense: Cholesky factorization failed");
  dense->m = std::move(sym);

  Metric u;
  u.kind_ = MetricKind::DenseSPD;
  u.norm_ = hi;
  u.min_eig_ = lo;
  u.dense_ = std::move(dense);
  return u;
}

Eigen::Index Metric::dim() const {
  switch (kind_) {
    case MetricKind::ScaledIdentity: return 0;
    case MetricKind::Diagonal: return diag_->size();
    case MetricKind::DenseSPD: return dense_->m.rows();
  }
  return 0;
}

const Vector& Metric::diag() const {
  if (kind_ != MetricKind::Diagonal) throw std::logic_error("Metric::diag: not a diagonal metric");
  return *diag_;
}

const Matrix& Metric::matrix() const {
  if (kind_ != MetricKind::DenseSPD) throw std::logic_error("Metric::matrix: not a dense metric");
  return dense_->m;
}

Matrix Metric::to_dense(Eigen::Index n) const {
  switch (kind_) {
    case MetricKind::ScaledIdentity: return scale_ * Matrix::Identity(n, n);
    case MetricKind::Diagonal:
      if (n != diag_->size()) throw DimensionError(dim_message("Metric::to_dense", diag_->size(), n));
      return diag_->asDiagonal();
    case MetricKind::DenseSPD:
      if (n != dense_->m.rows())
        throw DimensionError(dim_message("Metric::to_dense", dense_->m.rows(), n));
      return dense_->m;
  }
  return {};
}

void Metric::check_dim(const Vector& x) const {
  const Eigen::Index n = dim();
  if (n != 0 && x.size() != n) throw DimensionError(dim_message("Metric", n, x.size()));
}

Vector Metric::apply(const Vector& x) const {
  check_dim(x);
  switch (kind_) {
    case MetricKind::ScaledIdentity: return scale_ * x;
    case MetricKind::Diagonal: return diag_->cwiseProduct(x);
    case MetricKind::DenseSPD: return dense_->m * x;
  }
  return {};
}

Vector Metric::inv_apply(const Vector& x) const {
  check_dim(x);
  switch (kind_) {
    case MetricKind::ScaledIdentity: return x / scale_;
    case MetricKind::Diagonal: return x.cwiseQuotient(*diag_);
    case MetricKind::DenseSPD: return dense_->llt.solve(x);
  }
  return {};
}

double Metric::norm(const Vector& x) const {
  return std::sqrt(std::max(0.0, x.dot(apply(x))));
}

double Metric::inv_norm(const Vector& x) const {
  return std::sqrt(std::max(0.0, x.dot(inv_apply(x))));
}

double Metric::inv_inner(const Vector& x, const Vector& y) const {
  return x.dot(inv_apply(y));
}

Metric Metric::scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("Metric::scaled: factor must be positive");
  switch (kind_) {
    case MetricKind::ScaledIdentity: return scaled_identity(c * scale_);
    case MetricKind::Diagonal: return diagonal(c * *diag_);
    case MetricKind::DenseSPD: return dense(c * dense_->m);
  }
  return *this;
}

Vector metric_apply(const Metric& u, const Vector& x) { return u.apply(x); }
Vector metric_inv_apply(const Metric& u, const Vector& x) { return u.inv_apply(x); }
double metric_norm(const Metric& u, const Vector& x) { return u.norm(x); }

bool loewner_geq(const Metric& lhs, const Metric& rhs, Eigen::Index n, double rel_tol) {
  const double tol = rel_tol * std::max(lhs.op_norm(), rhs.op_norm());
  if (lhs.kind() == MetricKind::ScaledIdentity && rhs.kind() == MetricKind::ScaledIdentity)
    return lhs.scale() - rhs.scale() >= -tol;
  if (lhs.kind() != MetricKind::DenseSPD && rhs.kind() != MetricKind::DenseSPD) {
    auto diag_of = [n](const Metric& u) -> Vector {
      return u.kind() == MetricKind::Diagonal ? u.diag() : Vector::Constant(n, u.scale());
    };
    return ((diag_of(lhs) - diag_of(rhs)).array() >= -tol).all();
  }
  const Matrix diff = lhs.to_dense(n) - rhs.to_dense(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(diff, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

OpNormEstimate op_norm_estimate(const Matrix& l, const PowerIterationOptions& opts) {
  if (!(opts.tol > 0.0 && opts.tol < 1.0))
    throw std::invalid_argument("op_norm_estimate: tol must lie in (0, 1)");
  if (opts.max_iter < 1) throw std::invalid_argument("op_norm_estimate: max_iter must be >= 1");
  if (!l.allFinite()) throw std::invalid_argument("op_norm_estimate: non-finite entries");

  OpNormEstimate est;
  est.tol = opts.tol;
  const Eigen::Index n = l.cols();
  if (n == 0 || l.rows() == 0 || l.cwiseAbs().maxCoeff() == 0.0) {
    est.certified = true;
    return est;
  }

  Rng rng(opts.seed);
  auto fresh = [&] {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
    return Vector(v.normalized());
  };
  auto gram = [&](const Vector& v) { return Vector(l.transpose() * (l * v)); };

  // Restarted Lanczos on L^T L with full reorthogonalization; each restart
  // begins from the current top Ritz vector.
  const Eigen::Index cycle = std::min<Eigen::Index>(n, 48);
  Vector v = fresh();
  double best = 0.0;
  int used = 0;
  while (used < opts.max_iter) {
    Matrix q(n, cycle);
    std::vector<double> alpha, beta;
    q.col(0) = v;
    Vector ritz = v;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < cycle && used < opts.max_iter; ++j) {
      Vector w = gram(q.col(j));
      ++used;
      alpha.push_back(q.col(j).dot(w));
      w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
      w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
      const double b = w.norm();

      const auto m = static_cast<Eigen::Index>(alpha.size());
      Matrix t = Matrix::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Matrix> eig(t);
      theta = eig.eigenvalues()[m - 1];
      const Vector y = eig.eigenvectors().col(m - 1);
      ritz = q.leftCols(m) * y;
      best = std::max(best, theta);
      if (b * std::abs(y[m - 1]) <= 0.5 * opts.tol * theta || b <= 1e-14 * std::max(theta, 1e-300)) break;
      if (j + 1 < cycle) q.col(j + 1) = w / b;
      beta.push_back(b);
    }
    est.iterations = used;
    if (theta <= 0.0) {
      // start vector was in the null space
      v = fresh();
      continue;
    }
    v = ritz.normalized();
    const double rho = (l * v).squaredNorm();
    best = std::max(best, rho);
    if ((gram(v) - rho * v).norm() <= opts.tol * rho) {
      est.value = std::sqrt(rho);
      est.certified = true;
      return est;
    }
  }
  est.value = std::sqrt(best);
  return est;
}

LinearMap::LinearMap(Matrix m) {
  if (!m.allFinite()) throw std::invalid_argument("LinearMap: non-finite entries");
  m_ = std::make_shared<const Matrix>(std::move(m));
}

LinearMap::LinearMap(Matrix m, OpNormEstimate est) : LinearMap(std::move(m)) {
  est_ = est;
}

Vector LinearMap::apply(const Vector& x) const {
  if (x.size() != m_->cols()) throw DimensionError(dim_message("LinearMap::apply", m_->cols(), x.size()));
  return *m_ * x;
}

Vector LinearMap::apply_transpose(const Vector& y) const {
  if (y.size() != m_->rows())
    throw DimensionError(dim_message("LinearMap::apply_transpose", m_->rows(), y.size()));
  return m_->transpose() * y;
}

LinearMap LinearMap::with_norm_estimate(const PowerIterationOptions& opts) const {
  LinearMap out = *this;
  out.est_ = vmfb::op_norm_estimate(*m_, opts);
  return out;
}

OpNormEstimate op_norm_estimate(const LinearMap& l, const PowerIterationOptions& opts) {
  return op_norm_estimate(l.matrix(), opts);
}

}  // namespace vmfb
