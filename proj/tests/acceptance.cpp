// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include "catalog.hpp"
#include "oracles.hpp"
#include "vmfb/bench.hpp"
#include "vmfb/operators.hpp"
#include "vmfb/problems.hpp"
#include "vmfb/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace vmfb;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Schedules constant_schedules(double gamma, double lambda, const Metric& u = Metric::identity()) {
  Schedules s;
  s.gamma = ScalarSchedule::constant(gamma);
  s.lambda = ScalarSchedule::constant(lambda);
  s.metrics = MetricSchedule::constant(u);
  return s;
}

Outcome averagedness() {
  Rng rng(1001);
  double worst = -INFINITY;
  int failures = 0;
  for (int draw = 0; draw < 200; ++draw) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(20));
    const auto ps = catalog::proximables(rng, n);
    const Proximable& p = ps[rng.below(ps.size())];
    const Cocoercive b = catalog::random_least_squares(rng, n);
    const Metric u = catalog::random_separable_metric(rng, n);
    const double gamma = rng.uniform(1e-3, 1.0 - 1e-3) * 2.0 * b.beta() / u.op_norm();
    const double alpha = 2.0 * b.beta() / (4.0 * b.beta() - gamma * u.op_norm());
    const auto t = forward_backward_map(p, b, gamma, u);
    const double v = averaged_violation(t, alpha, u, catalog::random_pairs(rng, n, 1000));
    worst = std::max(worst, v);
    if (v > 1e-8) ++failures;
  }
  return {failures == 0, fmt("200 draws x 1000 pairs, worst violation %.2e, failing draws %d", worst, failures)};
}

Outcome firm_nonexpansiveness() {
  Rng rng(1002);
  int failures = 0, checked = 0;
  const Eigen::Index n = 6;
  const auto ps = catalog::proximables(rng, n);
  for (const auto& p : ps) {
    for (const auto& u : catalog::separable_metrics(rng, n)) {
      const double gamma = rng.uniform(0.2, 2.0);
      for (const auto& [x, y] : catalog::random_pairs(rng, n, 1000, 3.0)) {
        const Vector jx = resolvent(p, gamma, u, x);
        const Vector jy = resolvent(p, gamma, u, y);
        const double lhs = std::pow(u.inv_norm(jx - jy), 2) + std::pow(u.inv_norm((x - jx) - (y - jy)), 2);
        if (lhs > std::pow(u.inv_norm(x - y), 2) + 1e-8) ++failures;
        ++checked;
      }
    }
  }
  return {failures == 0, fmt("%zu proximables x 2 metrics, %d pairs, failures %d", ps.size(), checked, failures)};
}

Outcome l1_projection() {
  Rng rng(1003);
  double worst_plain = 0.0, worst_weighted = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Vector x = oracle::random_vector(rng, n, 2.0);
    const double t = rng.uniform(0.01, 3.0);
    worst_plain = std::max(
        worst_plain,
        (project_l1_ball(x, t) - oracle::l1_ball_projection_by_enumeration(x, Vector::Ones(n), t)).norm());
  }
  for (int i = 0; i < 500; ++i) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(4));
    const Vector x = oracle::random_vector(rng, n, 2.0);
    const Vector d = oracle::random_positive(rng, n, 0.1, 10.0);
    const double t = rng.uniform(0.01, 3.0);
    worst_weighted = std::max(
        worst_weighted,
        (project_l1_ball_weighted(x, d, t) - oracle::l1_ball_projection_by_enumeration(x, d, t)).norm());
  }
  return {worst_plain <= 1e-8 && worst_weighted <= 1e-8,
          fmt("max deviation %.2e (1000 Euclidean), %.2e (500 weighted)", worst_plain, worst_weighted)};
}

Outcome quasi_fejer() {
  Rng rng(1004);
  double worst = -INFINITY;
  std::size_t steps = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto n = 2 + static_cast<Eigen::Index>(rng.below(19));
    const auto m = 1 + static_cast<Eigen::Index>(rng.below(2 * static_cast<std::uint64_t>(n)));
    const Matrix a = oracle::random_matrix(rng, m, n);
    const Vector x_star = oracle::random_vector(rng, n);
    // unconstrained optimum x* sits inside the ball
    const double t = x_star.lpNorm<1>() * rng.uniform(1.0, 1.5);
    const ProblemTriple tr = build_lasso({LinearMap(a), a * x_star, t, x_star, 0, ""});
    const Metric u = catalog::random_separable_metric(rng, n);
    const double gamma = rng.uniform(0.05, 0.95) * 2.0 * tr.beta / u.op_norm();
    const double lambda = rng.uniform(0.05, 0.99) * relaxation_upper_bound(tr.beta, gamma, u.op_norm());
    StoppingRule stop;
    stop.epsilon = 1e-10;
    stop.max_iter = 5000;
    SolveOptions opts;
    opts.reference = x_star;
    opts.snapshots = SnapshotPolicy::Never;
    const auto run = solve(tr.prox, tr.grad, constant_schedules(gamma, lambda, u), stop,
                           oracle::random_vector(rng, n, 3.0), opts);
    for (std::size_t k = 1; k < run.records.size(); ++k)
      worst = std::max(worst, run.records[k].ref_distance - run.records[k - 1].ref_distance);
    steps += run.records.size() - 1;
  }
  return {worst <= 1e-10, fmt("50 instances, %zu steps, largest increase %.2e", steps, worst)};
}

Outcome table_trend() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    bench::ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.gamma_mults = {0.5};
    cfg.lambdas = {0.2, 0.4, 1.0, 1.5};
    cfg.epsilons = {1e-6};
    const auto half = bench::run_experiment(cfg).rows;
    cfg.gamma_mults = {1.9};
    cfg.lambdas = {1.05};
    const auto fast = bench::run_experiment(cfg).rows.at(0);
    bool seed_ok = fast.status == "Converged";
    for (std::size_t i = 0; i < half.size(); ++i) {
      seed_ok = seed_ok && half[i].status == "Converged";
      if (i > 0) seed_ok = seed_ok && half[i].iter < half[i - 1].iter;
    }
    const double ratio = static_cast<double>(half.at(0).iter) / static_cast<double>(std::max<std::size_t>(1, fast.iter));
    seed_ok = seed_ok && ratio >= 5.0;
    ok = ok && seed_ok;
    detail += fmt("seed %d: %zu>%zu>%zu>%zu ratio %.1f; ", static_cast<int>(seed), half[0].iter, half[1].iter,
                  half[2].iter, half[3].iter, ratio);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome full_scale() {
  bench::ExperimentConfig cfg;
  cfg.m = 240;
  cfg.n = 1024;
  cfg.k = 40;
  cfg.seed = 7;
  cfg.gamma_mults = {1.9};
  cfg.lambdas = {1.05};
  cfg.epsilons = {1e-6};
  const auto r = bench::run_experiment(cfg).rows.at(0);
  return {r.status == "Converged" && r.iter <= 200000 && r.obj <= 1e-4 && r.err <= 1e-2,
          fmt("%s, Iter %zu, Obj %.3e, Err %.3e", r.status.c_str(), r.iter, r.obj, r.err)};
}

Outcome sfp_gradient() {
  Rng rng(1007);
  const Eigen::Index n = 8, m = 6;
  const Matrix l = oracle::random_matrix(rng, m, n);
  const Vector qlo = oracle::random_vector(rng, m);
  const Cocoercive g =
      Cocoercive::sfp_residual(LinearMap(l), Proximable::box(qlo, qlo + oracle::random_positive(rng, m, 0.1, 1.0)));
  const double sigma = oracle::spectral_norm(l);
  const double beta = g.beta();
  int coco_fail = 0;
  for (const auto& [x, y] : catalog::random_pairs(rng, n, 1000, 3.0)) {
    const Vector d = g.apply(x) - g.apply(y);
    if ((x - y).dot(d) < beta * d.squaredNorm() - 1e-8) ++coco_fail;
  }
  double worst_fd = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector x = oracle::random_vector(rng, n, 3.0);
    const Vector fd = oracle::finite_difference_gradient([&](const Vector& z) { return g.potential(z); }, x);
    const Vector an = g.apply(x);
    worst_fd = std::max(worst_fd, (fd - an).norm() / std::max(an.norm(), 1e-12));
  }
  const bool beta_ok = beta <= 1.0 / (sigma * sigma) && beta >= 0.99 / (sigma * sigma);
  return {coco_fail == 0 && worst_fd <= 1e-5 && beta_ok,
          fmt("beta*||L||^2 = %.6f, cocoercivity failures %d/1000, max FD rel error %.2e", beta * sigma * sigma,
              coco_fail, worst_fd)};
}

Outcome inexact() {
  const LassoInstance inst = generate_lasso_instance(24, 100, 4, 7);
  const ProblemTriple tr = build_lasso(inst);
  bool ok = true;
  std::string detail;
  for (double mult : {0.5, 1.0, 1.9}) {
    const double gamma = mult * tr.beta;
    Schedules s = constant_schedules(gamma, 1.0);
    s.a_err = VectorSchedule::decaying_noise(0.1, 2.0, 11);
    s.b_err = VectorSchedule::decaying_noise(0.1, 2.0, 12);
    StoppingRule stop;
    stop.epsilon = 1e-6;
    SolveOptions opts;
    opts.snapshots = SnapshotPolicy::Never;
    const auto run = solve(tr.prox, tr.grad, s, stop, Vector::Zero(100), opts);
    const double res = fixed_point_residual(tr.prox, tr.grad, tr.beta, Metric::identity(), run.x_final);
    ok = ok && run.status == RunStatus::Converged && res <= 1e-4;
    detail += fmt("gamma %.1f/L: %s in %zu, residual %.2e; ", mult, to_string(run.status).c_str(),
                  run.iterations, res);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome perturbation() {
  Rng rng(1009);
  double worst = -INFINITY;
  for (int draw = 0; draw < 500; ++draw) {
    const auto n = 1 + static_cast<Eigen::Index>(rng.below(12));
    const auto ps = catalog::proximables(rng, n);
    const auto bs = catalog::cocoercives(rng, n);
    const Proximable& p = ps[rng.below(ps.size())];
    const Cocoercive& b = bs[rng.below(bs.size())];
    const Metric u = catalog::random_separable_metric(rng, n);
    const Metric v = catalog::random_separable_metric(rng, n);
    const double scale = std::isinf(b.beta()) ? 1.0 : b.beta();
    const double r = rng.uniform(0.01, 2.0) * scale / u.op_norm();
    const double s = rng.uniform(0.01, 2.0) * scale / v.op_norm();
    const auto pb = metric_perturbation_bound(p, b, r, s, u, v, oracle::random_vector(rng, n, 3.0));
    worst = std::max(worst, pb.lhs - pb.rhs);
  }
  return {worst <= 1e-8, fmt("500 draws, max lhs - rhs %.2e", worst)};
}

Outcome theorem32() {
  const LassoInstance inst = generate_lasso_instance(24, 100, 4, 7);
  const ProblemTriple tr = build_lasso(inst);
  Schedules s = constant_schedules(tr.beta, 1.0);
  s.lambda = relaxation_below_bound(tr.beta, s.gamma, s.metrics,
                                    [](std::size_t k) { return 1.0 / std::sqrt(static_cast<double>(k + 2)); });
  const auto r31 = validate_schedules(s, tr.beta, 20000, TheoremMode::UniformGap, 100);
  const auto r32 = validate_schedules(s, tr.beta, 20000, TheoremMode::DivergentSum, 100);
  const bool gap_fails = !r31.find("relaxation_uniform_gap")->passed;
  const bool div_ok = r32.find("relaxation_divergent_sum")->passed;

  StoppingRule stop;
  stop.mode = StopMode::FixedPointResidual;
  stop.epsilon = 1e-6;
  stop.max_iter = 200000;
  SolveOptions opts;
  opts.snapshots = SnapshotPolicy::Never;
  const auto run = solve(tr.prox, tr.grad, s, stop, Vector::Zero(100), opts);
  return {gap_fails && div_ok && run.status == RunStatus::Converged && run.final_residual() <= 1e-6,
          fmt("uniform gap check %s, divergent sum %s, %s in %zu, residual %.2e", gap_fails ? "fails" : "passes",
              div_ok ? "passes" : "fails", to_string(run.status).c_str(), run.iterations, run.final_residual())};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"averagedness of the composed map", averagedness},
      {"firm nonexpansiveness of metric resolvents", firm_nonexpansiveness},
      {"L1-ball projection against enumeration", l1_projection},
      {"quasi-Fejer monotonicity", quasi_fejer},
      {"desk-scale iteration trend", table_trend},
      {"full-scale LASSO run", full_scale},
      {"SFP gradient checks", sfp_gradient},
      {"inexact iterations", inexact},
      {"metric perturbation inequality", perturbation},
      {"vanishing-gap relaxation schedule", theorem32},
  };
  const double limits_s[] = {30, 0, 0, 0, 120, 600, 0, 0, 0, 0};

  int failed = 0;
  int id = 0;
  for (const auto& [name, fn] : criteria) {
    ++id;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double limit = limits_s[id - 1];
    if (limit > 0 && secs > limit) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s limit", limit);
    }
    if (!o.pass) ++failed;
    std::printf("%s criterion %d: %s (%.2f s) - %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", id - failed, id);
  return failed == 0 ? 0 : 1;
}
