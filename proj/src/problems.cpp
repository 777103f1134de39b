#include "vmfb/problems.hpp"

#include "vmfb/error.hpp"
#include "vmfb/rng.hpp"

#include <json.hpp>

#include <numeric>
#include <stdexcept>
#include <vector>

namespace vmfb {

namespace {

void require_set(const Proximable& c, const char* what) {
  if (!c.is_indicator()) throw std::invalid_argument(std::string(what) + ": C must be an indicator-type set");
}

}  // namespace

ProblemTriple build_lasso(const LassoInstance& inst) {
  Cocoercive grad = Cocoercive::least_squares(inst.a, inst.b);
  const double beta = grad.beta();
  return {Proximable::l1_ball(inst.t), std::move(grad), beta};
}

ProblemTriple build_vip(const Proximable& c, const Cocoercive& b) {
  require_set(c, "build_vip");
  return {normal_cone(c), b, b.beta()};
}

ProblemTriple build_constrained_min(const Proximable& c, const Cocoercive& f_grad) {
  require_set(c, "build_constrained_min");
  return {c, f_grad, f_grad.beta()};
}

ProblemTriple build_sfp(const SfpInstance& inst) {
  require_set(inst.c, "build_sfp");
  Cocoercive grad = Cocoercive::sfp_residual(inst.l, inst.q);
  const double beta = grad.beta();
  return {normal_cone(inst.c), std::move(grad), beta};
}

LassoInstance generate_lasso_instance(int m, int n, int k, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("generate_lasso_instance: m and n must be >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("generate_lasso_instance: k must lie in [1, n]");

  Rng rng(seed);
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();

  // First k entries of a partial Fisher-Yates shuffle of 0..n-1.
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[i], perm[j]);
  }
  Vector x_true = Vector::Zero(n);
  for (int i = 0; i < k; ++i) {
    double v = 0.0;
    while (v == 0.0) v = rng.uniform(-2.0, 2.0);
    x_true[perm[i]] = v;
  }

  LassoInstance inst;
  inst.b = a * x_true;
  inst.a = LinearMap(std::move(a));
  inst.t = x_true.lpNorm<1>();
  inst.x_true = std::move(x_true);
  inst.seed = seed;
  inst.rng_id = std::string(Rng::kAlgorithm);
  return inst;
}

double lasso_objective(const LassoInstance& inst, const Vector& x) {
  return 0.5 * (inst.a.apply(x) - inst.b).squaredNorm();
}

namespace {

std::vector<double> to_std(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string lasso_to_json(const LassoInstance& inst) {
  const Matrix& a = inst.a.matrix();
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) rows.push_back(a(i, j));

  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "lasso";
  j["m"] = a.rows();
  j["n"] = a.cols();
  j["k"] = (inst.x_true.array() != 0.0).count();
  j["seed"] = inst.seed;
  j["rng"] = inst.rng_id;
  j["t"] = inst.t;
  j["A"] = rows;
  j["b"] = to_std(inst.b);
  j["x_true"] = to_std(inst.x_true);
  // Doubles are written in shortest round-trip form.
  return j.dump(1);
}

LassoInstance lasso_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("schema", 0) != 1 || j.value("kind", "") != "lasso")
    throw std::invalid_argument("lasso_from_json: unsupported document");
  const auto m = j.at("m").get<Eigen::Index>();
  const auto n = j.at("n").get<Eigen::Index>();
  const auto rows = j.at("A").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(rows.size()) != m * n) throw DimensionError("lasso_from_json: A has wrong size");
  Matrix a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index c = 0; c < n; ++c) a(i, c) = rows[static_cast<std::size_t>(i * n + c)];

  LassoInstance inst;
  inst.a = LinearMap(std::move(a));
  inst.b = from_std(j.at("b").get<std::vector<double>>());
  inst.x_true = from_std(j.at("x_true").get<std::vector<double>>());
  if (inst.b.size() != m || inst.x_true.size() != n) throw DimensionError("lasso_from_json: b or x_true size");
  inst.t = j.at("t").get<double>();
  if (!(inst.t > 0.0)) throw std::invalid_argument("lasso_from_json: t must be positive");
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.rng_id = j.at("rng").get<std::string>();
  return inst;
}

}  // namespace vmfb
