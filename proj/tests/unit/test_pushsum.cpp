#include "doctest.h"

#include <cmath>
#include <vector>

#include "sgp/graph.hpp"
#include "sgp/mixing.hpp"
#include "sgp/perturbation.hpp"
#include "sgp/pushsum.hpp"
#include "sgp/rng.hpp"

using namespace sgp;

TEST_CASE("a complete graph averages in one round") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph::complete(2));
  const ZeroPerturbation eps;
  const PushSumTrace trace = run_pushsum(seq, std::vector<double>{0.0, 6.0}, 1, eps, 3);
  CHECK(trace.x[0][0] == 3.0);
  CHECK(trace.x[0][1] == 3.0);
  CHECK(trace.y[0][0] == 1.0);
  CHECK(trace.y[0][1] == 1.0);
  CHECK(trace.z[0][0] == 3.0);
  CHECK(trace.z[0][1] == 3.0);
  CHECK(trace.max_tracking_error(2) == 0.0);
}

TEST_CASE("a single node just accumulates its perturbation") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph(1));
  const DecayingPerturbation eps(2.0);  // eps(t) = 2/sqrt(t)
  PushSumState state = make_pushsum_state(1, 1, std::vector<double>{5.0});
  std::vector<double> applied;
  pushsum_round(state, seq.graph_at(0), eps, &applied);
  CHECK(state.w[0] == 5.0);
  CHECK(state.z[0] == 5.0);
  CHECK(state.y[0] == 1.0);
  CHECK(state.x[0] == 5.0 + 2.0);
  CHECK(applied[0] == 2.0);
  pushsum_round(state, seq.graph_at(1), eps, &applied);
  CHECK(state.z[0] == 7.0);
  CHECK(state.x[0] == doctest::Approx(7.0 + 2.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("single directed edge splits weight as computed by hand") {
  Digraph g(2);
  g.add_edge(0, 1);  // d = (2, 1); A = [[1/2, 0], [1/2, 1]]
  PushSumState state = make_pushsum_state(2, 1, std::vector<double>{1.0, 0.0});
  const ZeroPerturbation eps;
  pushsum_round(state, g, eps);
  CHECK(state.w[0] == 0.5);
  CHECK(state.w[1] == 0.5);
  CHECK(state.y[0] == 0.5);
  CHECK(state.y[1] == 1.5);
  CHECK(state.z[0] == 1.0);
  CHECK(state.z[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("unperturbed runs conserve total mass exactly") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 2, 11);
  const ZeroPerturbation eps;
  const std::vector<double> x0{1.5, -2.0, 0.25, 4.0, -0.5};
  const PushSumTrace trace = run_pushsum(seq, x0, 1, eps, 120);
  double initial = 0.0;
  for (double v : x0) initial += v;
  for (long r = 1; r <= trace.rounds; ++r) {
    double total = 0.0;
    for (double v : trace.x[static_cast<std::size_t>(r - 1)]) total += v;
    CHECK(total == doctest::Approx(initial).epsilon(1e-12));
  }
}

TEST_CASE("perturbed runs conserve mass up to the accumulated perturbations") {
  const GraphSequence seq = GraphSequence::random_b_connected(4, 1, 23);
  const DecayingPerturbation eps(0.7);
  const std::vector<double> x0{2.0, -1.0, 3.0, 0.0};
  const PushSumTrace trace = run_pushsum(seq, x0, 1, eps, 200);
  double expected = 0.0;
  for (double v : x0) expected += v;
  for (long r = 1; r <= trace.rounds; ++r) {
    for (double v : trace.eps[static_cast<std::size_t>(r - 1)]) expected += v;
    double actual = 0.0;
    for (double v : trace.x[static_cast<std::size_t>(r - 1)]) actual += v;
    CHECK(std::abs(actual - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("weights sum to n and never drop under the measured imbalance") {
  const GraphSequence seq = GraphSequence::random_b_connected(6, 3, 5);
  const ZeroPerturbation eps;
  const PushSumTrace trace = run_pushsum(seq, std::vector<double>(6, 1.0), 1, eps, 150);
  for (const auto& y : trace.y) {
    double sum = 0.0;
    for (double v : y) sum += v;
    CHECK(std::abs(sum - 6.0) <= 1e-10);
  }
  const double measured = measure_delta(seq, 150);
  CHECK(trace.min_weight() == doctest::Approx(measured).epsilon(1e-14));
}

TEST_CASE("regular sequences keep every weight at one") {
  const GraphSequence seq = GraphSequence::regular_family(6, {2, 4});
  const DecayingPerturbation eps(1.0);
  const PushSumTrace trace = run_pushsum(seq, std::vector<double>(6, 0.0), 1, eps, 100);
  for (const auto& y : trace.y)
    for (double v : y) CHECK(std::abs(v - 1.0) <= 1e-10);
}

TEST_CASE("tracking stays under the geometric bound at every round") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 1, 77);
  const ConnectivityParams params = theoretical_params(5, 1, false);
  const ZeroPerturbation eps;
  const std::vector<double> x0{3.0, -1.0, 2.0, 5.0, -4.0};
  const PushSumTrace trace = run_pushsum(seq, x0, 1, eps, 200);
  const std::vector<double> bounds = lemma1_bound_series(trace, params);
  for (long r = 1; r <= trace.rounds; ++r)
    for (int i = 0; i < 5; ++i)
      CHECK(trace.tracking_error(r, i) <= bounds[static_cast<std::size_t>(r - 1)]);
}

TEST_CASE("tracking bound closed forms") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph::complete(3));
  const ZeroPerturbation eps;

  // Zero start, zero perturbations: the bound vanishes identically.
  const PushSumTrace zero = run_pushsum(seq, std::vector<double>(3, 0.0), 1, eps, 10);
  for (long t = 0; t < 10; ++t) CHECK(lemma1_bound(zero, {0.5, 0.5, 4.0}, t) == 0.0);

  // Unit initial mass: the bound is exactly (8/delta) lambda^t.
  const PushSumTrace unit = run_pushsum(seq, std::vector<double>{1.0, 0.0, 0.0}, 1, eps, 12);
  const ConnectivityParams params{0.25, 0.5, 4.0, ConnectivityParams::Provenance::TheoreticalGeneral};
  for (long t = 0; t < 12; ++t)
    CHECK(lemma1_bound(unit, params, t) ==
          doctest::Approx((8.0 / 0.25) * std::pow(0.5, static_cast<double>(t))).epsilon(1e-12));

  // The incremental series matches the direct evaluation.
  const DecayingPerturbation decay(0.3);
  const PushSumTrace noisy = run_pushsum(seq, std::vector<double>{1.0, -2.0, 0.5}, 1, decay, 60);
  const std::vector<double> series = lemma1_bound_series(noisy, params);
  for (long t = 0; t < 60; t += 7)
    CHECK(series[static_cast<std::size_t>(t)] ==
          doctest::Approx(lemma1_bound(noisy, params, t)).epsilon(1e-12));
}

TEST_CASE("weighted-average bound closed forms") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph::complete(2));
  const ZeroPerturbation eps;
  const PushSumTrace zero = run_pushsum(seq, std::vector<double>(2, 0.0), 1, eps, 5);
  const ConnectivityParams params{1.0, 0.5, 4.0, ConnectivityParams::Provenance::TheoreticalGeneral};
  CHECK(corollary2_bound(zero, params, 0.0, 3) == 0.0);

  const PushSumTrace unit = run_pushsum(seq, std::vector<double>{1.0, 0.0}, 1, eps, 5);
  CHECK(corollary2_bound(unit, params, 1.0, 1) ==
        doctest::Approx(16.0 / (std::sqrt(3.0) - 1.0)).epsilon(1e-12));
}

TEST_CASE("inverse-sqrt partial sums dominate the integral estimate") {
  for (long t : {1L, 5L, 50L, 500L, 5000L}) {
    double sum = 0.0;
    for (long k = 0; k <= t; ++k) sum += 1.0 / std::sqrt(static_cast<double>(k + 1));
    CHECK(sum >= 2.0 * (std::sqrt(static_cast<double>(t + 2)) - 1.0));
  }
}

TEST_CASE("decaying perturbations leave vanishing tracking errors") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 2, 13);
  const ConnectivityParams params = theoretical_params(5, 2, false);
  const DecayingPerturbation eps(1.0);
  const std::vector<double> x0{2.0, -3.0, 1.0, 0.0, 4.0};
  const long rounds = 2000;
  const PushSumTrace trace = run_pushsum(seq, x0, 1, eps, rounds);

  const long decile = rounds / 10;
  double early = 0.0, late = 0.0;
  for (long r = 1; r <= decile; ++r) early = std::max(early, trace.max_tracking_error(r));
  for (long r = rounds - decile + 1; r <= rounds; ++r)
    late = std::max(late, trace.max_tracking_error(r));
  CHECK(late < early);
  CHECK(trace.max_tracking_error(rounds) <= lemma1_bound(trace, params, rounds - 1));
}

TEST_CASE("weighted tracking error matches its direct definition") {
  const GraphSequence seq = GraphSequence::random_b_connected(3, 1, 3);
  const DecayingPerturbation eps(0.5);
  const PushSumTrace trace = run_pushsum(seq, std::vector<double>{1.0, 2.0, -1.0}, 1, eps, 50);
  const long t = 30;
  for (int i = 0; i < 3; ++i) {
    double weights = 0.0, acc = 0.0;
    for (long k = 0; k <= t; ++k) {
      const double alpha = 1.0 / std::sqrt(static_cast<double>(k + 1));
      weights += alpha;
      acc += alpha * trace.tracking_error(k + 1, i);
    }
    CHECK(weighted_tracking_error(trace, i, t) == doctest::Approx(acc / weights).epsilon(1e-14));
  }
}

TEST_CASE("coordinates run the scalar protocol independently") {
  const GraphSequence seq = GraphSequence::random_b_connected(4, 2, 21);
  const ZeroPerturbation eps;
  const std::vector<double> first{1.0, -2.0, 0.5, 3.0};
  const std::vector<double> second{-1.0, 0.0, 2.5, 1.0};
  std::vector<double> stacked;
  for (int i = 0; i < 4; ++i) {
    stacked.push_back(first[static_cast<std::size_t>(i)]);
    stacked.push_back(second[static_cast<std::size_t>(i)]);
  }
  const PushSumTrace joint = run_pushsum(seq, stacked, 2, eps, 40);
  const PushSumTrace a = run_pushsum(seq, first, 1, eps, 40);
  const PushSumTrace b = run_pushsum(seq, second, 1, eps, 40);
  for (long r = 1; r <= 40; ++r) {
    for (int i = 0; i < 4; ++i) {
      CHECK(joint.z[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i) * 2] ==
            a.z[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i)]);
      CHECK(joint.z[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i) * 2 + 1] ==
            b.z[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("starving a node of inflow trips the weight guard") {
  Digraph g(2);
  g.add_edge(0, 1);  // node 0 never receives, its weight halves every round
  const GraphSequence seq = GraphSequence::static_graph(g);
  const ZeroPerturbation eps;
  CHECK_THROWS_AS((void)run_pushsum(seq, std::vector<double>{1.0, 1.0}, 1, eps, 1200),
                  WeightUnderflowError);
}

TEST_CASE("custom perturbation sequences apply per round and vanish afterwards") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph::complete(2));
  const CustomSequencePerturbation eps(2, 1, {{0.5, -0.5}, {1.0, 1.0}});
  const PushSumTrace trace = run_pushsum(seq, std::vector<double>{0.0, 0.0}, 1, eps, 3);
  CHECK(trace.eps[0][0] == 0.5);
  CHECK(trace.eps[0][1] == -0.5);
  CHECK(trace.eps[1][0] == 1.0);
  CHECK(trace.eps[2][0] == 0.0);
}
