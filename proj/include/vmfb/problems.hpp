#pragma once

#include "vmfb/linops.hpp"
#include "vmfb/operators.hpp"

#include <cstdint>
#include <string>

namespace vmfb {

/// The pieces the solver needs: A (via its resolvent), B, and B's
/// cocoercivity constant.
struct ProblemTriple {
  Proximable prox;
  Cocoercive grad;
  double beta = 0.0;
};

/// min 1/2 ||Ax - b||^2  s.t.  ||x||_1 <= t, with a planted sparse signal.
struct LassoInstance {
  LinearMap a;
  Vector b;
  double t = 1.0;
  Vector x_true;
  std::uint64_t seed = 0;
  std::string rng_id;
};

/// find x in C with Lx in Q
struct SfpInstance {
  LinearMap l;
  Proximable c;
  Proximable q;
};

ProblemTriple build_lasso(const LassoInstance& inst);
/// Variational inequality <Bx*, y - x*> >= 0 for all y in C.
ProblemTriple build_vip(const Proximable& c, const Cocoercive& b);
/// min f(x) s.t. x in C, with f given by its gradient.
ProblemTriple build_constrained_min(const Proximable& c, const Cocoercive& f_grad);
ProblemTriple build_sfp(const SfpInstance& inst);

/// Gaussian A (row-major draw order), support by a partial Fisher-Yates
/// shuffle, nonzeros uniform on [-2, 2], b = A x_true, t = ||x_true||_1.
/// Throws std::invalid_argument for k outside [1, n] or m < 1.
LassoInstance generate_lasso_instance(int m, int n, int k, std::uint64_t seed);

/// 1/2 ||Ax - b||^2
double lasso_objective(const LassoInstance& inst, const Vector& x);

std::string lasso_to_json(const LassoInstance& inst);
LassoInstance lasso_from_json(const std::string& text);

}  // namespace vmfb
