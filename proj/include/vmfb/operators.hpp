#pragma once

#include "vmfb/linops.hpp"

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace vmfb {

// ---------------------------------------------------------------------------
// Maximal-monotone side: convex functions and closed convex sets, evaluated
// through their resolvent (metric proximity operator).
// ---------------------------------------------------------------------------

struct ZeroFunction {};
struct L1Norm {
  double weight = 1.0;
};
struct L1Ball {
  double radius = 1.0;
};
/// Componentwise bounds; infinite entries are allowed.
struct Box {
  Vector lo;
  Vector hi;
};
/// {x : <normal, x> <= offset}
struct HalfSpace {
  Vector normal;
  double offset = 0.0;
};

class Proximable {
 public:
  using Descriptor = std::variant<ZeroFunction, L1Norm, L1Ball, Box, HalfSpace>;

  static Proximable zero() { return Proximable(ZeroFunction{}); }
  static Proximable l1_norm(double weight);
  static Proximable l1_ball(double radius);
  static Proximable box(Vector lo, Vector hi);
  /// Box with every bound infinite.
  static Proximable whole_space(Eigen::Index n);
  static Proximable half_space(Vector normal, double offset);

  const Descriptor& descriptor() const { return desc_; }
  /// Indicator of a closed convex set (the resolvent is a projection).
  bool is_indicator() const;
  /// Marked as the normal cone of its set, see normal_cone().
  bool is_normal_cone() const { return normal_cone_; }
  bool supports(const Metric& u) const;
  std::string name() const;

  /// g(x); +inf outside the set for indicators. Set membership uses an
  /// absolute slack `tol`.
  double value(const Vector& x, double tol = 1e-10) const;

  /// argmin_p 1/2 ||p - x||^2_{U^{-1}} + gamma g(p), i.e. J_{gamma U A} with
  /// A the subdifferential of g.
  Vector resolvent(double gamma, const Metric& u, const Vector& x) const;

  /// Euclidean projection (indicators only).
  Vector project(const Vector& x) const;

  /// How far v is from the subdifferential of g at p, plus any infeasibility
  /// of p. Zero iff v lies in the subdifferential.
  double subgradient_gap(const Vector& p, const Vector& v) const;

 private:
  friend Proximable normal_cone(const Proximable& set);
  explicit Proximable(Descriptor d) : desc_(std::move(d)) {}

  Descriptor desc_;
  bool normal_cone_ = false;
};

/// The normal cone N_C of an indicator-type set; its resolvent is the metric
/// projection onto C for every step size. Throws for non-indicators.
Proximable normal_cone(const Proximable& set);

Vector resolvent(const Proximable& p, double gamma, const Metric& u, const Vector& x);

// L1-ball projections. `project_l1_ball` is the sort-and-threshold Euclidean
// projection; `project_l1_ball_weighted` projects in the norm
// sum_i (p_i - x_i)^2 / d_i by bisection on the dual threshold.
Vector project_l1_ball(const Vector& x, double radius);
struct WeightedL1Options {
  double tol = 1e-12;
  int max_steps = 200;
};
Vector project_l1_ball_weighted(const Vector& x, const Vector& d, double radius,
                                const WeightedL1Options& opts = {});

// ---------------------------------------------------------------------------
// Cocoercive side.
// ---------------------------------------------------------------------------

struct ZeroOperator {};
/// A^T (A x - b)
struct LeastSquaresGradient {
  LinearMap a;
  Vector b;
};
/// L^T (L x - P_Q(L x)), the gradient of 1/2 dist(Lx, Q)^2
struct SfpResidualGradient {
  LinearMap l;
  Proximable q;
};
/// M x + c with M symmetric positive semidefinite
struct AffineMonotone {
  Matrix m;
  Vector c;
};

class Cocoercive {
 public:
  using Descriptor =
      std::variant<ZeroOperator, LeastSquaresGradient, SfpResidualGradient, AffineMonotone>;

  /// beta = +inf.
  static Cocoercive zero();
  /// beta = 1 / (sigma (1 + tol))^2 with sigma the certified estimate of
  /// ||A||; the estimate is computed here when the map does not carry one.
  /// Throws ConvergenceError if it cannot be certified.
  static Cocoercive least_squares(LinearMap a, Vector b, const PowerIterationOptions& opts = {});
  static Cocoercive sfp_residual(LinearMap l, Proximable q, const PowerIterationOptions& opts = {});
  /// beta = 1 / lambda_max(M).
  static Cocoercive affine(Matrix m, Vector c);

  const Descriptor& descriptor() const { return desc_; }
  double beta() const { return beta_; }
  std::string name() const;

  Vector apply(const Vector& x) const;
  /// The convex potential whose gradient this is:
  /// 1/2||Ax-b||^2, 1/2 dist(Lx,Q)^2, 1/2 x^T M x + c^T x, or 0.
  double potential(const Vector& x) const;

 private:
  Cocoercive(Descriptor d, double beta) : desc_(std::move(d)), beta_(beta) {}

  Descriptor desc_;
  double beta_;
};

Vector cocoercive_apply(const Cocoercive& b, const Vector& x);

// ---------------------------------------------------------------------------
// Averagedness calculus.
// ---------------------------------------------------------------------------

/// gamma ||U|| / (2 beta): averagedness of I - gamma U B in the U^{-1} norm.
/// Throws ParameterError unless 0 < gamma < 2 beta / ||U||.
double averaged_constant_forward(double beta, double gamma, double norm_u);
/// 2 beta / (4 beta - gamma ||U||): averagedness of J_{gamma U A}(I - gamma U B).
double averaged_constant_composed(double beta, double gamma, double norm_u);

/// Averagedness of T1 T2 from the constants of each factor.
double compose_averaged(double a1, double a2);
/// 2 / (1 + 1/max(a1, a2))
double compose_averaged_max_rule(double a1, double a2);
/// a1 + a2 - a1 a2
double compose_averaged_sum_rule(double a1, double a2);

using VectorMap = std::function<Vector(const Vector&)>;
using VectorPair = std::pair<Vector, Vector>;

/// Largest excess of
///   ||Tx - Ty||^2 - ||x - y||^2 + (1 - alpha)/alpha ||(I-T)x - (I-T)y||^2
/// over the pairs, all norms in the U^{-1} metric. Nonpositive when T passes.
double averaged_violation(const VectorMap& t, double alpha, const Metric& u,
                          const std::vector<VectorPair>& pairs);
bool check_averaged(const VectorMap& t, double alpha, const Metric& u,
                    const std::vector<VectorPair>& pairs, double slack = 1e-8);

/// The forward-backward map x -> J_{gamma U A}(x - gamma U B x).
VectorMap forward_backward_map(const Proximable& p, const Cocoercive& b, double gamma,
                               const Metric& u);

/// ||x - J_{gamma U A}(x - gamma U B x)||
double fixed_point_residual(const Proximable& p, const Cocoercive& b, double gamma,
                            const Metric& u, const Vector& x);

struct PerturbationBound {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Both sides of
///   ||T_{rU} x - T_{sV} x|| <= ||U|| ||(U^{-1} - (r/s) V^{-1})(x - T_{sV} x)||
/// with T_{rU} = J_{rUA}(I - rUB).
PerturbationBound metric_perturbation_bound(const Proximable& p, const Cocoercive& b, double r,
                                            double s, const Metric& u, const Metric& v,
                                            const Vector& x);

}  // namespace vmfb
