#include "vmfb/operators.hpp"

#include "vmfb/error.hpp"

#include <cmath>
#include <limits>
#include <type_traits>

namespace vmfb {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(const Vector& x, Eigen::Index n, const char* what) {
  if (x.size() != n)
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(n) +
                         ", got " + std::to_string(x.size()));
}

/// Metric weights as a per-coordinate vector (separable metrics only).
Vector separable_weights(const Metric& u, Eigen::Index n) {
  if (u.kind() == MetricKind::Diagonal) {
    require_dim(u.diag(), n, "resolvent metric");
    return u.diag();
  }
  return Vector::Constant(n, u.scale());
}

}  // namespace

Proximable Proximable::l1_norm(double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw std::invalid_argument("L1Norm: weight must be nonnegative and finite");
  return Proximable(L1Norm{weight});
}

Proximable Proximable::l1_ball(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("L1Ball: radius must be positive and finite");
  return Proximable(L1Ball{radius});
}

Proximable Proximable::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() < 1)
    throw DimensionError("Box: bounds must be non-empty and of equal dimension");
  if (lo.array().isNaN().any() || hi.array().isNaN().any())
    throw std::invalid_argument("Box: NaN bound");
  if ((lo.array() > hi.array()).any()) throw std::invalid_argument("Box: lo > hi");
  return Proximable(Box{std::move(lo), std::move(hi)});
}

Proximable Proximable::whole_space(Eigen::Index n) {
  return box(Vector::Constant(n, -kInf), Vector::Constant(n, kInf));
}

Proximable Proximable::half_space(Vector normal, double offset) {
  if (normal.size() < 1 || !normal.allFinite() || !std::isfinite(offset))
    throw std::invalid_argument("HalfSpace: normal and offset must be finite");
  if (normal.squaredNorm() == 0.0) throw std::invalid_argument("HalfSpace: zero normal");
  return Proximable(HalfSpace{std::move(normal), offset});
}

bool Proximable::is_indicator() const {
  return std::holds_alternative<L1Ball>(desc_) || std::holds_alternative<Box>(desc_) ||
         std::holds_alternative<HalfSpace>(desc_);
}

bool Proximable::supports(const Metric& u) const {
  if (std::holds_alternative<ZeroFunction>(desc_) || std::holds_alternative<HalfSpace>(desc_))
    return true;
  return u.kind() != MetricKind::DenseSPD;
}

std::string Proximable::name() const {
  std::string base = std::visit(Overloaded{
                                    [](const ZeroFunction&) { return std::string("Zero"); },
                                    [](const L1Norm& g) { return "L1Norm(" + std::to_string(g.weight) + ")"; },
                                    [](const L1Ball& g) { return "L1Ball(" + std::to_string(g.radius) + ")"; },
                                    [](const Box&) { return std::string("Box"); },
                                    [](const HalfSpace&) { return std::string("HalfSpace"); },
                                },
                                desc_);
  return normal_cone_ ? "NormalCone[" + base + "]" : base;
}

double Proximable::value(const Vector& x, double tol) const {
  return std::visit(Overloaded{
                        [](const ZeroFunction&) { return 0.0; },
                        [&](const L1Norm& g) { return g.weight * x.lpNorm<1>(); },
                        [&](const L1Ball& g) { return x.lpNorm<1>() <= g.radius + tol ? 0.0 : kInf; },
                        [&](const Box& g) {
                          require_dim(x, g.lo.size(), "Box");
                          const bool inside = ((x.array() >= g.lo.array() - tol) &&
                                               (x.array() <= g.hi.array() + tol))
                                                  .all();
                          return inside ? 0.0 : kInf;
                        },
                        [&](const HalfSpace& g) {
                          require_dim(x, g.normal.size(), "HalfSpace");
                          return g.normal.dot(x) <= g.offset + tol ? 0.0 : kInf;
                        },
                    },
                    desc_);
}

Vector Proximable::resolvent(double gamma, const Metric& u, const Vector& x) const {
  if (!(gamma > 0.0)) throw ParameterError("resolvent: gamma must be positive");
  if (!supports(u))
    throw UnsupportedError("resolvent: " + name() + " has no exact evaluation under a dense metric");
  const Eigen::Index n = x.size();
  if (u.dim() != 0) require_dim(x, u.dim(), "resolvent");

  return std::visit(
      Overloaded{
          [&](const ZeroFunction&) -> Vector { return x; },
          [&](const L1Norm& g) -> Vector {
            // Separable: soft-threshold coordinate i by gamma * w * U_ii.
            const Vector thr = gamma * g.weight * separable_weights(u, n);
            return x.cwiseSign().cwiseProduct((x.cwiseAbs() - thr).cwiseMax(0.0));
          },
          [&](const L1Ball& g) -> Vector {
            if (u.kind() == MetricKind::ScaledIdentity) return project_l1_ball(x, g.radius);
            return project_l1_ball_weighted(x, u.diag(), g.radius);
          },
          [&](const Box& g) -> Vector {
            // Separable metrics leave the coordinatewise clamp unchanged.
            require_dim(x, g.lo.size(), "Box");
            return x.cwiseMax(g.lo).cwiseMin(g.hi);
          },
          [&](const HalfSpace& g) -> Vector {
            // min ||p - x||_{U^{-1}} s.t. <a, p> <= b  =>  p = x - nu U a.
            require_dim(x, g.normal.size(), "HalfSpace");
            const double excess = g.normal.dot(x) - g.offset;
            if (excess <= 0.0) return x;
            const Vector ua = u.apply(g.normal);
            return x - (excess / g.normal.dot(ua)) * ua;
          },
      },
      desc_);
}

Vector Proximable::project(const Vector& x) const {
  if (!is_indicator()) throw std::logic_error("project: " + name() + " is not a set");
  return resolvent(1.0, Metric::identity(), x);
}

double Proximable::subgradient_gap(const Vector& p, const Vector& v) const {
  require_dim(v, p.size(), "subgradient_gap");
  return std::visit(
      Overloaded{
          [&](const ZeroFunction&) { return v.lpNorm<Eigen::Infinity>(); },
          [&](const L1Norm& g) {
            double gap = 0.0;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
              if (p[i] != 0.0) gap = std::max(gap, std::abs(v[i] - g.weight * (p[i] > 0 ? 1.0 : -1.0)));
              else gap = std::max(gap, std::abs(v[i]) - g.weight);
            }
            return std::max(gap, 0.0);
          },
          [&](const L1Ball& g) {
            const double l1 = p.lpNorm<1>();
            const double infeasible = std::max(0.0, l1 - g.radius);
            if (l1 < g.radius * (1.0 - 1e-9)) return std::max(infeasible, v.lpNorm<Eigen::Infinity>());
            // Boundary: v = theta * s with theta >= 0, s_i = sign(p_i) on the
            // support and |s_i| <= 1 elsewhere.
            double theta = 0.0;
            int support = 0;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
              if (p[i] != 0.0) {
                theta += v[i] * (p[i] > 0 ? 1.0 : -1.0);
                ++support;
              }
            }
            theta = std::max(theta / support, 0.0);
            double gap = 0.0;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
              if (p[i] != 0.0) gap = std::max(gap, std::abs(v[i] - theta * (p[i] > 0 ? 1.0 : -1.0)));
              else gap = std::max(gap, std::abs(v[i]) - theta);
            }
            return std::max(infeasible, gap);
          },
          [&](const Box& g) {
            require_dim(p, g.lo.size(), "Box");
            double gap = 0.0;
            for (Eigen::Index i = 0; i < p.size(); ++i) {
              gap = std::max({gap, g.lo[i] - p[i], p[i] - g.hi[i]});
              const bool at_lo = p[i] <= g.lo[i];
              const bool at_hi = p[i] >= g.hi[i];
              if (at_lo && at_hi) continue;
              if (at_lo) gap = std::max(gap, v[i]);
              else if (at_hi) gap = std::max(gap, -v[i]);
              else gap = std::max(gap, std::abs(v[i]));
            }
            return gap;
          },
          [&](const HalfSpace& g) {
            require_dim(p, g.normal.size(), "HalfSpace");
            const double slack = g.normal.dot(p) - g.offset;
            const double scale = 1e-9 * (std::abs(g.offset) + g.normal.norm() * p.norm() + 1.0);
            const double infeasible = std::max(0.0, slack) / g.normal.norm();
            if (slack < -scale) return std::max(infeasible, v.lpNorm<Eigen::Infinity>());
            const double theta = g.normal.dot(v) / g.normal.squaredNorm();
            const double off_ray = (v - theta * g.normal).lpNorm<Eigen::Infinity>();
            return std::max({infeasible, off_ray, -theta * g.normal.norm()});
          },
      },
      desc_);
}

Proximable normal_cone(const Proximable& set) {
  if (!set.is_indicator())
    throw std::invalid_argument("normal_cone: " + set.name() + " is not an indicator-type set");
  Proximable out = set;
  out.normal_cone_ = true;
  return out;
}

Vector resolvent(const Proximable& p, double gamma, const Metric& u, const Vector& x) {
  return p.resolvent(gamma, u, x);
}

// ---------------------------------------------------------------------------

namespace {

double certified_beta(const LinearMap& l, const PowerIterationOptions& opts, const char* what) {
  const OpNormEstimate est = l.norm_estimate() ? *l.norm_estimate() : op_norm_estimate(l, opts);
  if (!est.certified)
    throw ConvergenceError(std::string(what) + ": spectral norm estimate not certified after " +
                           std::to_string(est.iterations) + " iterations");
  const double upper = est.upper();
  return upper > 0.0 ? 1.0 / (upper * upper) : kInf;
}

LinearMap with_estimate(LinearMap l, const PowerIterationOptions& opts) {
  return l.norm_estimate() ? l : l.with_norm_estimate(opts);
}

}  // namespace

Cocoercive Cocoercive::zero() {
  return Cocoercive(ZeroOperator{}, kInf);
}

Cocoercive Cocoercive::least_squares(LinearMap a, Vector b, const PowerIterationOptions& opts) {
  require_dim(b, a.rows(), "LeastSquaresGradient");
  if (!b.allFinite()) throw std::invalid_argument("LeastSquaresGradient: non-finite b");
  a = with_estimate(std::move(a), opts);
  const double beta = certified_beta(a, opts, "LeastSquaresGradient");
  return Cocoercive(LeastSquaresGradient{std::move(a), std::move(b)}, beta);
}

Cocoercive Cocoercive::sfp_residual(LinearMap l, Proximable q, const PowerIterationOptions& opts) {
  if (!q.is_indicator()) throw std::invalid_argument("SfpResidualGradient: Q must be a set");
  l = with_estimate(std::move(l), opts);
  const double beta = certified_beta(l, opts, "SfpResidualGradient");
  return Cocoercive(SfpResidualGradient{std::move(l), std::move(q)}, beta);
}

Cocoercive Cocoercive::affine(Matrix m, Vector c) {
  if (m.rows() != m.cols() || m.rows() < 1) throw DimensionError("AffineMonotone: M must be square");
  require_dim(c, m.rows(), "AffineMonotone");
  if (!m.allFinite() || !c.allFinite()) throw std::invalid_argument("AffineMonotone: non-finite data");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("AffineMonotone: M must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo < -1e-12 * scale) throw std::invalid_argument("AffineMonotone: M must be positive semidefinite");
  const double beta = hi > 0.0 ? 1.0 / hi : kInf;
  return Cocoercive(AffineMonotone{std::move(m), std::move(c)}, beta);
}

std::string Cocoercive::name() const {
  return std::visit(Overloaded{
                        [](const ZeroOperator&) { return std::string("Zero"); },
                        [](const LeastSquaresGradient&) { return std::string("LeastSquaresGradient"); },
                        [](const SfpResidualGradient&) { return std::string("SfpResidualGradient"); },
                        [](const AffineMonotone&) { return std::string("AffineMonotone"); },
                    },
                    desc_);
}

Vector Cocoercive::apply(const Vector& x) const {
  return std::visit(Overloaded{
                        [&](const ZeroOperator&) -> Vector { return Vector::Zero(x.size()); },
                        [&](const LeastSquaresGradient& g) -> Vector {
                          return g.a.apply_transpose(g.a.apply(x) - g.b);
                        },
                        [&](const SfpResidualGradient& g) -> Vector {
                          const Vector lx = g.l.apply(x);
                          return g.l.apply_transpose(lx - g.q.project(lx));
                        },
                        [&](const AffineMonotone& g) -> Vector {
                          require_dim(x, g.m.cols(), "AffineMonotone");
                          return g.m * x + g.c;
                        },
                    },
                    desc_);
}

double Cocoercive::potential(const Vector& x) const {
  return std::visit(Overloaded{
                        [&](const ZeroOperator&) { return 0.0; },
                        [&](const LeastSquaresGradient& g) {
                          return 0.5 * (g.a.apply(x) - g.b).squaredNorm();
                        },
                        [&](const SfpResidualGradient& g) {
                          const Vector lx = g.l.apply(x);
                          return 0.5 * (lx - g.q.project(lx)).squaredNorm();
                        },
                        [&](const AffineMonotone& g) {
                          require_dim(x, g.m.cols(), "AffineMonotone");
                          return 0.5 * x.dot(g.m * x) + g.c.dot(x);
                        },
                    },
                    desc_);
}

Vector cocoercive_apply(const Cocoercive& b, const Vector& x) {
  return b.apply(x);
}

}  // namespace vmfb
