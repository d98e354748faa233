#include "doctest.h"

#include <cmath>
#include <vector>

#include "sgp/graph.hpp"
#include "sgp/mixing.hpp"
#include "sgp/objectives.hpp"
#include "sgp/optimizer.hpp"
#include "sgp/perturbation.hpp"
#include "sgp/pushsum.hpp"
#include "sgp/rng.hpp"
#include "sgp/schedule.hpp"

using namespace sgp;

TEST_CASE("single node follows the hand-iterated trajectory") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph(1));
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({3.0});
  const StepSchedule sched = StepSchedule::inv_sqrt();
  const SgpTrace trace = run_sgp(seq, spec, sched, std::vector<double>{0.0}, 3);

  CHECK(trace.z[0][0] == 0.0);
  CHECK(trace.x[0][0] == 1.0);  // 0 - alpha(1) * (-1)
  CHECK(trace.z[1][0] == 1.0);
  CHECK(trace.x[1][0] == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(trace.z[2][0] == doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("identical objectives on a complete graph stay in lockstep") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph::complete(4));
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({2.0, 2.0, 2.0, 2.0});
  const SgpTrace trace = run_sgp(seq, spec, StepSchedule::inv_sqrt(),
                                 std::vector<double>{5.0, 5.0, 5.0, 5.0}, 50);
  for (long r = 1; r <= 50; ++r) {
    const auto& z = trace.z[static_cast<std::size_t>(r - 1)];
    for (int i = 1; i < 4; ++i) CHECK(z[static_cast<std::size_t>(i)] == z[0]);
    CHECK(trace.consensus_radius(r) == 0.0);
  }
}

TEST_CASE("a zero objective reproduces the unperturbed protocol bit for bit") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 2, 1234);
  const std::vector<double> x0{1.0, -2.5, 3.0, 0.25, -1.0};
  const ZeroPerturbation eps;
  const PushSumTrace plain = run_pushsum(seq, x0, 1, eps, 200);
  const SgpTrace opt = run_sgp(seq, ObjectiveSpec::zero(5, 1), StepSchedule::inv_sqrt(), x0, 200);

  REQUIRE(opt.rounds == plain.rounds);
  for (long r = 0; r < 200; ++r) {
    CHECK(opt.x[static_cast<std::size_t>(r)] == plain.x[static_cast<std::size_t>(r)]);
    CHECK(opt.y[static_cast<std::size_t>(r)] == plain.y[static_cast<std::size_t>(r)]);
    CHECK(opt.z[static_cast<std::size_t>(r)] == plain.z[static_cast<std::size_t>(r)]);
    CHECK(opt.eps[static_cast<std::size_t>(r)] == plain.eps[static_cast<std::size_t>(r)]);
  }
}

TEST_CASE("the running average matches its closed form") {
  const GraphSequence seq = GraphSequence::random_b_connected(4, 1, 55);
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({1.0, 4.0, 2.0, 8.0});
  const StepSchedule sched = StepSchedule::inv_sqrt();
  const std::vector<double> x0{0.0, 1.0, -1.0, 2.0};
  const SgpTrace trace = run_sgp(seq, spec, sched, x0, 120);

  for (long r : {1L, 2L, 7L, 60L, 120L}) {
    double weight_sum = 0.0;
    std::vector<double> acc(4, 0.0);
    for (long k = 1; k <= r; ++k) {
      const double a = sched.alpha(k);
      weight_sum += a;
      for (int i = 0; i < 4; ++i)
        acc[static_cast<std::size_t>(i)] += a * trace.z[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < 4; ++i)
      CHECK(trace.ztilde[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i)] ==
            doctest::Approx(acc[static_cast<std::size_t>(i)] / weight_sum).epsilon(1e-10));
  }
}

TEST_CASE("the running average closed form holds for slower schedules too") {
  const GraphSequence seq = GraphSequence::regular_family(4, {2});
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({0.0, 2.0, 5.0, 5.0});
  const StepSchedule sched = StepSchedule::inv_t_power(0.75);
  const SgpTrace trace = run_sgp(seq, spec, sched, std::vector<double>(4, 1.0), 80);
  for (long r : {1L, 3L, 80L}) {
    double weight_sum = 0.0;
    std::vector<double> acc(4, 0.0);
    for (long k = 1; k <= r; ++k) {
      const double a = sched.alpha(k);
      weight_sum += a;
      for (int i = 0; i < 4; ++i)
        acc[static_cast<std::size_t>(i)] += a * trace.z[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < 4; ++i)
      CHECK(trace.ztilde[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i)] ==
            doctest::Approx(acc[static_cast<std::size_t>(i)] / weight_sum).epsilon(1e-10));
  }
}

TEST_CASE("three-dimensional problems run the protocol coordinate-wise") {
  const GraphSequence seq = GraphSequence::random_b_connected(4, 2, 14, 0.3);
  const ObjectiveSpec spec = ObjectiveSpec::l1_distance(
      {{0, 0, 1}, {2, 2, 1}, {0, 4, -1}, {1, 1, 3}});
  const SgpTrace trace =
      run_sgp(seq, spec, StepSchedule::inv_sqrt(), std::vector<double>(12, 0.0), 1500);
  const auto opt = spec.optimum();
  REQUIRE(opt.has_value());
  const auto& z = trace.z[1499];
  for (int i = 0; i < 4; ++i)
    CHECK(opt->distance(std::span<const double>(z.data() + static_cast<std::size_t>(i) * 3, 3)) < 0.5);
  for (long t = 0; t + 1 <= trace.rounds; t += 11)
    CHECK(lemma_key_residual(trace, spec, opt->representative, t) >= -1e-9);
}

TEST_CASE("the network average performs an exact centralized subgradient step") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 2, 31);
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({1, 2, 3, 4, 10});
  const StepSchedule sched = StepSchedule::inv_sqrt();
  const std::vector<double> x0{4.0, -2.0, 0.0, 1.0, 6.0};
  const SgpTrace trace = run_sgp(seq, spec, sched, x0, 150);

  std::vector<double> g(1);
  for (long r = 1; r <= 150; ++r) {
    double g_sum = 0.0;
    for (int i = 0; i < 5; ++i) {
      spec.subgradient(i, std::span<const double>(&trace.z[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i)], 1), g);
      g_sum += g[0];
    }
    const double predicted =
        trace.xbar[static_cast<std::size_t>(r - 1)][0] - trace.alpha[static_cast<std::size_t>(r - 1)] * g_sum / 5.0;
    CHECK(std::abs(trace.xbar[static_cast<std::size_t>(r)][0] - predicted) <= 1e-10);
  }
}

TEST_CASE("per-step inequality residuals stay nonnegative") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 2, 60);
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({1, 2, 3, 4, 10});
  const SgpTrace trace =
      run_sgp(seq, spec, StepSchedule::inv_sqrt(), std::vector<double>(5, 0.0), 500);

  Rng rng(0x1e88a8ULL);
  std::vector<std::vector<double>> points{{3.0}, {0.0}};
  for (int k = 0; k < 3; ++k) points.push_back({rng.uniform(-5.0, 12.0)});
  for (long t = 0; t + 1 <= trace.rounds; ++t)
    for (const auto& v : points) CHECK(lemma_key_residual(trace, spec, v, t) >= -1e-9);
}

TEST_CASE("single-node runs satisfy the classical inequality") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph(1));
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({3.0});
  const SgpTrace trace = run_sgp(seq, spec, StepSchedule::inv_sqrt(), std::vector<double>{0.0}, 100);
  for (long t = 0; t + 1 <= trace.rounds; ++t) {
    CHECK(lemma_key_residual(trace, spec, std::vector<double>{3.0}, t) >= -1e-9);
    CHECK(lemma_key_residual(trace, spec, std::vector<double>{0.0}, t) >= -1e-9);
  }
}

TEST_CASE("rate bound closed forms") {
  const StepSchedule sched = StepSchedule::inv_sqrt();

  // All-zero problem: the bound vanishes.
  const ObjectiveSpec zero = ObjectiveSpec::zero(3, 1);
  const ConnectivityParams params{1.0, 0.5, 4.0, ConnectivityParams::Provenance::TheoreticalGeneral};
  CHECK(theorem2_bound(zero, params, std::vector<double>(3, 0.0), std::vector<double>{0.0}, 5,
                       sched) == 0.0);
  CHECK(lemma9_bound(zero, params, std::vector<double>(3, 0.0), std::vector<double>{0.0}, 5,
                     sched) == 0.0);

  // Two unit-bound objectives, delta = 1, lambda = 1/2, zero start, t = 1.
  const ObjectiveSpec pair = ObjectiveSpec::abs_deviation({0.0, 0.0});
  const double bound =
      theorem2_bound(pair, params, std::vector<double>(2, 0.0), std::vector<double>{0.0}, 1, sched);
  CHECK(bound == doctest::Approx(65.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)theorem2_bound(pair, params, std::vector<double>(2, 0.0),
                                       std::vector<double>{0.0}, 1, StepSchedule::inv_t_power(0.75)),
                  std::invalid_argument);
}

TEST_CASE("rate bound decreases once the log term settles") {
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({1, 2, 3, 4, 10});
  const ConnectivityParams params = theoretical_params(5, 2, false);
  const StepSchedule sched = StepSchedule::inv_sqrt();
  const std::vector<double> x0{1.0, 0.0, -1.0, 2.0, 0.5};
  double previous = theorem2_bound(spec, params, x0, std::vector<double>{3.0}, 8, sched);
  for (long t = 9; t <= 400; ++t) {
    const double current = theorem2_bound(spec, params, x0, std::vector<double>{3.0}, t, sched);
    CHECK(current <= previous);
    previous = current;
  }
}

TEST_CASE("the intermediate bound is dominated by the final bound") {
  // Substituting 2(sqrt(t+2)-1) >= sqrt(t) maps one into the other for n >= 2.
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({1, 2, 3, 4, 10});
  const ConnectivityParams params{0.25, 0.5, 4.0, ConnectivityParams::Provenance::TheoreticalGeneral};
  const StepSchedule sched = StepSchedule::inv_sqrt();
  const std::vector<double> x0{1.0, -1.0, 2.0, 0.0, 3.0};
  for (long t : {1L, 2L, 5L, 20L, 100L, 1000L}) {
    const double l9 = lemma9_bound(spec, params, x0, std::vector<double>{3.0}, t, sched);
    const double th2 = theorem2_bound(spec, params, x0, std::vector<double>{3.0}, t, sched);
    CHECK(l9 <= th2);
  }
}

TEST_CASE("the weighted average of network means obeys the intermediate bound") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 1, 71);
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({1, 2, 3, 4, 10});
  const ConnectivityParams params = theoretical_params(5, 1, false);
  const StepSchedule sched = StepSchedule::inv_sqrt();
  const SgpTrace trace = run_sgp(seq, spec, sched, std::vector<double>(5, 0.0), 800);
  for (long t = 1; t + 1 <= trace.rounds; t += 13) {
    const std::vector<double> avg = trace.weighted_xbar_average(t);
    const double bound = lemma9_bound(spec, params, trace.x0, std::vector<double>{3.0}, t, sched);
    CHECK(spec.evaluate_total(avg) - 11.0 <= bound);
  }
}

TEST_CASE("running averages approach the optimum on the median problem") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 2, 81, 0.3);
  const ObjectiveSpec spec = ObjectiveSpec::abs_deviation({1, 2, 3, 4, 10});
  const SgpTrace trace =
      run_sgp(seq, spec, StepSchedule::inv_sqrt(), std::vector<double>(5, 0.0), 4000);
  const auto opt = spec.optimum();
  for (int i = 0; i < 5; ++i) {
    const double early = spec.evaluate_total(
        std::span<const double>(&trace.ztilde[199][static_cast<std::size_t>(i)], 1));
    const double late = spec.evaluate_total(
        std::span<const double>(&trace.ztilde[3999][static_cast<std::size_t>(i)], 1));
    CHECK(late - opt->value < early - opt->value);
    CHECK(opt->distance(std::span<const double>(&trace.z[3999][static_cast<std::size_t>(i)], 1)) < 0.25);
  }
  CHECK(trace.consensus_radius(4000) < trace.consensus_radius(10));
}
