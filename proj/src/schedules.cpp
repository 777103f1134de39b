#include "vmfb/schedules.hpp"

#include "vmfb/operators.hpp"
#include "vmfb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace vmfb {

ScalarSchedule ScalarSchedule::constant(double v) {
  return ScalarSchedule([v](std::size_t) { return v; }, "constant(" + std::to_string(v) + ")");
}

ScalarSchedule ScalarSchedule::ramp(double start, double step) {
  return ScalarSchedule([start, step](std::size_t k) { return start + step * static_cast<double>(k); },
                        "ramp(" + std::to_string(start) + ", " + std::to_string(step) + ")");
}

ScalarSchedule ScalarSchedule::list(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("ScalarSchedule::list: empty list");
  auto shared = std::make_shared<const std::vector<double>>(std::move(values));
  return ScalarSchedule(
      [shared](std::size_t k) { return (*shared)[std::min(k, shared->size() - 1)]; }, "list");
}

ScalarSchedule ScalarSchedule::custom(Generator g, std::string label) {
  if (!g) throw std::invalid_argument("ScalarSchedule::custom: empty generator");
  return ScalarSchedule(std::move(g), std::move(label));
}

VectorSchedule VectorSchedule::zero() {
  return VectorSchedule([](std::size_t, Eigen::Index n) -> Vector { return Vector::Zero(n); }, true);
}

VectorSchedule VectorSchedule::decaying_noise(double scale, double power, std::uint64_t seed) {
  return VectorSchedule(
      [scale, power, seed](std::size_t k, Eigen::Index n) -> Vector {
        Rng rng = Rng::derive(seed, k);
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.gaussian();
        const double norm = v.norm();
        if (norm == 0.0) return Vector::Zero(n);
        return (scale / std::pow(static_cast<double>(k + 1), power) / norm) * v;
      },
      scale == 0.0);
}

VectorSchedule VectorSchedule::custom(Generator g) {
  if (!g) throw std::invalid_argument("VectorSchedule::custom: empty generator");
  return VectorSchedule(std::move(g), false);
}

Vector VectorSchedule::operator()(std::size_t k, Eigen::Index n) const {
  Vector v = gen_(k, n);
  if (v.size() != n) throw std::invalid_argument("VectorSchedule: generator returned wrong dimension");
  return v;
}

MetricSchedule MetricSchedule::constant(Metric u) {
  return MetricSchedule([u](std::size_t) { return u; }, true);
}

MetricSchedule MetricSchedule::list(std::vector<Metric> metrics) {
  if (metrics.empty()) throw std::invalid_argument("MetricSchedule::list: empty list");
  auto shared = std::make_shared<const std::vector<Metric>>(std::move(metrics));
  return MetricSchedule(
      [shared](std::size_t k) { return (*shared)[std::min(k, shared->size() - 1)]; },
      shared->size() == 1);
}

MetricSchedule MetricSchedule::custom(Generator g) {
  if (!g) throw std::invalid_argument("MetricSchedule::custom: empty generator");
  return MetricSchedule(std::move(g), false);
}

ScalarSchedule relaxation_below_bound(double beta, ScalarSchedule gamma, MetricSchedule metrics,
                                      std::function<double(std::size_t)> gap) {
  return ScalarSchedule::custom(
      [beta, gamma = std::move(gamma), metrics = std::move(metrics), gap = std::move(gap)](std::size_t k) {
        const double inv_alpha = 1.0 / averaged_constant_composed(beta, gamma(k), metrics(k).op_norm());
        return inv_alpha - gap(k);
      },
      "relaxation_below_bound");
}

}  // namespace vmfb
