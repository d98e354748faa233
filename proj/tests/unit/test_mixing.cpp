#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "sgp/graph.hpp"
#include "sgp/mixing.hpp"

using namespace sgp;

TEST_CASE("single node mixes to the identity") {
  const MixingMatrix a(Digraph(1));
  CHECK(a.size() == 1);
  CHECK(a.at(0, 0) == 1.0);
}

TEST_CASE("directed three-cycle weights") {
  Digraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 0);
  const MixingMatrix a(g);
  // Column j holds 1/2 at the diagonal and at j's successor.
  for (int j = 0; j < 3; ++j) {
    CHECK(a.at(j, j) == 0.5);
    CHECK(a.at((j + 1) % 3, j) == 0.5);
    CHECK(a.at((j + 2) % 3, j) == 0.0);
  }
  CHECK(a.max_column_sum_drift() <= 1e-12);
}

TEST_CASE("complete graph mixes uniformly") {
  const MixingMatrix a(Digraph::complete(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(a.at(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("column sums stay at one across generated graphs") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const GraphSequence seq =
        GraphSequence::random_b_connected(3 + static_cast<int>(seed % 9), 1 + static_cast<int>(seed % 3), seed);
    for (long t = 0; t < 5; ++t) {
      const MixingMatrix a(seq.graph_at(t));
      CHECK(a.max_column_sum_drift() <= 1e-12);
      for (int i = 0; i < a.size(); ++i) CHECK(a.at(i, i) > 0.0);
    }
  }
}

TEST_CASE("product accumulation extends on the left") {
  Digraph g(2);
  g.add_edge(1, 0);  // only arc 2->1; A = [[1, 1/2], [0, 1/2]]
  const MixingMatrix a(g);
  CHECK(a.at(0, 0) == 1.0);
  CHECK(a.at(0, 1) == 0.5);
  CHECK(a.at(1, 0) == 0.0);
  CHECK(a.at(1, 1) == 0.5);

  ProductAccumulator acc(a, 0);
  acc.accumulate(a);
  CHECK(acc.end_round() == 1);
  CHECK(acc.product().at(0, 0) == doctest::Approx(1.0));
  CHECK(acc.product().at(0, 1) == doctest::Approx(0.75));
  CHECK(acc.product().at(1, 0) == doctest::Approx(0.0));
  CHECK(acc.product().at(1, 1) == doctest::Approx(0.25));

  // Uniform mixing is idempotent.
  const MixingMatrix u(Digraph::complete(4));
  ProductAccumulator uniform(u, 0);
  uniform.accumulate(u);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(uniform.product().at(i, j) == doctest::Approx(0.25));

  const MixingMatrix small(Digraph(1));
  ProductAccumulator mismatched(small, 0);
  CHECK_THROWS_AS(mismatched.accumulate(a), std::invalid_argument);
}

TEST_CASE("accumulated products keep stochasticity invariants") {
  const GraphSequence seq = GraphSequence::random_b_connected(5, 2, 31);
  ProductAccumulator acc(MixingMatrix(seq.graph_at(0)), 0);
  for (long t = 1; t <= 40; ++t) {
    acc.accumulate(MixingMatrix(seq.graph_at(t)));
    CHECK(acc.product().max_column_sum_drift() <= 1e-11);
    CHECK(acc.product().min_row_sum() > 0.0);
    CHECK(acc.product().max_row_sum() <= seq.node_count() + 1e-9);
  }
}

TEST_CASE("influence imbalance of regular and tiny sequences") {
  CHECK(measure_delta(GraphSequence::regular_family(6, {2}), 80) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(measure_delta(GraphSequence::regular_family(5, {1, 3}), 80) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(measure_delta(GraphSequence::static_graph(Digraph(1)), 10) == 1.0);

  const GraphSequence seq = GraphSequence::random_b_connected(3, 1, 7);
  CHECK(measure_delta(seq, 60) >= 1.0 / 27.0);
}

TEST_CASE("measured imbalance dominates the worst-case bound") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const int n = 3 + static_cast<int>(seed % 5);
    const int b = 1 + static_cast<int>(seed % 2);
    const GraphSequence seq = GraphSequence::random_b_connected(n, b, seed);
    const ConnectivityParams params = theoretical_params(n, b, false);
    CHECK(measure_delta(seq, 100) >= params.delta);
  }
}

TEST_CASE("worst-case parameter formulas") {
  const ConnectivityParams general = theoretical_params(3, 1, false);
  CHECK(general.delta == doctest::Approx(1.0 / 27.0).epsilon(1e-15));
  CHECK(general.lambda == doctest::Approx(0.9874986894691234).epsilon(1e-12));
  CHECK(general.C == 4.0);

  const ConnectivityParams regular = theoretical_params(3, 1, true);
  CHECK(regular.delta == 1.0);
  CHECK(regular.lambda == doctest::Approx(107.0 / 108.0).epsilon(1e-12));
  CHECK(regular.C == doctest::Approx(2.0 * std::sqrt(2.0)));

  // A rank-one mixing matrix has no second singular value to speak of.
  const ConnectivityParams one_step = theoretical_params(3, 1, true, 0.0);
  CHECK(one_step.lambda == 0.0);
  CHECK(one_step.C == 2.0);

  const ConnectivityParams spectral = theoretical_params(3, 1, true, 0.25);
  CHECK(spectral.lambda == 0.5);
  CHECK(spectral.C == 2.0);

  CHECK_THROWS_AS(theoretical_params(0, 1, false), std::invalid_argument);
  CHECK_THROWS_AS(theoretical_params(3, 0, false), std::invalid_argument);
  CHECK_THROWS_AS(theoretical_params(3, 1, true, 1.0), std::invalid_argument);
}

TEST_CASE("second singular value of simple mixers") {
  CHECK(sigma2(MixingMatrix(Digraph::complete(4))) == doctest::Approx(0.0).epsilon(1e-9));
  // Circulant with hops=2 on 6 nodes: doubly stochastic, sigma2 in (0, 1).
  const double s = sigma2(MixingMatrix(Digraph::circulant(6, 2)));
  CHECK(s > 0.0);
  CHECK(s < 1.0);
}

TEST_CASE("one-step consensus reports decay rate zero") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph::complete(4));
  CHECK(estimate_lambda(seq, 0, 60) == 0.0);
}

TEST_CASE("fitted decay of a doubly stochastic mixer stays under the spectral bound") {
  const GraphSequence seq = GraphSequence::regular_family(6, {2});
  const double s = sigma2(MixingMatrix(seq.graph_at(0)));
  const double fitted = estimate_lambda(seq, 0, 200);
  CHECK(fitted > 0.0);
  CHECK(fitted <= std::sqrt(s) + 0.05);
}

TEST_CASE("fitted decay stays under the worst-case rate") {
  for (std::uint64_t seed : {3ULL, 11ULL, 29ULL}) {
    const GraphSequence seq = GraphSequence::random_b_connected(5, 2, seed);
    const ConnectivityParams params = theoretical_params(5, 2, false);
    CHECK(estimate_lambda(seq, 0, 150) <= params.lambda);
  }
  CHECK_THROWS_AS(estimate_lambda(GraphSequence::static_graph(Digraph::ring(3)), 0, 5),
                  std::invalid_argument);
}

TEST_CASE("products converge to their limit vector at the theoretical rate") {
  const GraphSequence seq = GraphSequence::random_b_connected(4, 1, 17);
  const ConnectivityParams params = theoretical_params(4, 1, false);
  const long t = 120;
  const PhiEstimate phi = estimate_phi(seq, t);
  CHECK(phi.residual_spread <= 1e-12);
  double phi_sum = 0.0;
  for (double v : phi.phi) {
    CHECK(v >= params.delta / 4 - 1e-15);
    phi_sum += v;
  }
  CHECK(phi_sum == doctest::Approx(1.0).epsilon(1e-9));

  // |[A(t:s)]_{ij} - phi_i(t)| <= C lambda^{t-s} for a range of s.
  Matrix product = MixingMatrix(seq.graph_at(t)).entries();
  for (long s = t - 1; s >= t - 60; --s) {
    product = product.multiply(MixingMatrix(seq.graph_at(s)).entries());
    const double allowed = params.C * std::pow(params.lambda, static_cast<double>(t - s));
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        worst = std::max(worst, std::abs(product.at(i, j) - phi.phi[static_cast<std::size_t>(i)]));
    CHECK(worst <= allowed);
  }
}

TEST_CASE("regular-family products stay doubly stochastic") {
  const GraphSequence seq = GraphSequence::regular_family(6, {2, 3});
  ProductAccumulator acc(MixingMatrix(seq.graph_at(0)), 0);
  for (long t = 1; t <= 30; ++t) {
    acc.accumulate(MixingMatrix(seq.graph_at(t)));
    CHECK(acc.product().min_row_sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(acc.product().max_row_sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}
