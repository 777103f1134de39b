#pragma once

#include "vmfb/linops.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vmfb {

/// Iteration-indexed real sequence. Generators must be pure so a schedule
/// can be shared between concurrent runs. List schedules hold their last
/// value past the end.
class ScalarSchedule {
 public:
  using Generator = std::function<double(std::size_t)>;

  ScalarSchedule() : ScalarSchedule(constant(0.0)) {}
  static ScalarSchedule constant(double v);
  /// start + step * k
  static ScalarSchedule ramp(double start, double step);
  static ScalarSchedule list(std::vector<double> values);
  static ScalarSchedule custom(Generator g, std::string label = "custom");

  double operator()(std::size_t k) const { return gen_(k); }
  const std::string& label() const { return label_; }

 private:
  ScalarSchedule(Generator g, std::string label) : gen_(std::move(g)), label_(std::move(label)) {}
  Generator gen_;
  std::string label_;
};

/// Iteration-indexed error vectors a_k, b_k. The zero schedule adapts to the
/// dimension it is asked for.
class VectorSchedule {
 public:
  using Generator = std::function<Vector(std::size_t, Eigen::Index)>;

  VectorSchedule() : VectorSchedule(zero()) {}
  static VectorSchedule zero();
  /// Seeded random direction with ||v_k|| = scale / (k + 1)^power. Each k
  /// draws from its own derived stream, so evaluation order is irrelevant.
  static VectorSchedule decaying_noise(double scale, double power, std::uint64_t seed);
  static VectorSchedule custom(Generator g);

  bool is_zero() const { return zero_; }
  Vector operator()(std::size_t k, Eigen::Index n) const;

 private:
  VectorSchedule(Generator g, bool zero) : gen_(std::move(g)), zero_(zero) {}
  Generator gen_;
  bool zero_;
};

class MetricSchedule {
 public:
  using Generator = std::function<Metric(std::size_t)>;

  MetricSchedule() : MetricSchedule(constant(Metric::identity())) {}
  static MetricSchedule constant(Metric u);
  static MetricSchedule list(std::vector<Metric> metrics);
  static MetricSchedule custom(Generator g);

  bool is_constant() const { return constant_; }
  Metric operator()(std::size_t k) const { return gen_(k); }

 private:
  MetricSchedule(Generator g, bool constant) : gen_(std::move(g)), constant_(constant) {}
  Generator gen_;
  bool constant_;
};

/// Parameter streams of the relaxed variable-metric iteration.
struct Schedules {
  ScalarSchedule gamma = ScalarSchedule::constant(1.0);
  ScalarSchedule lambda = ScalarSchedule::constant(1.0);
  ScalarSchedule eta = ScalarSchedule::constant(0.0);
  VectorSchedule a_err;
  VectorSchedule b_err;
  MetricSchedule metrics;
  /// Declared bound on the partial sums that must stay finite
  /// (eta_k, lambda_k ||a_k||, lambda_k ||b_k||).
  double summability_cap = 1e6;
};

/// lambda_k = 1/alpha_k - gap(k), with 1/alpha_k evaluated from gamma_k and
/// ||U_k||.
ScalarSchedule relaxation_below_bound(double beta, ScalarSchedule gamma, MetricSchedule metrics,
                                      std::function<double(std::size_t)> gap);

}  // namespace vmfb
