#include "doctest.h"

#include <stdexcept>

#include "sgp/graph.hpp"

using namespace sgp;

namespace {

Digraph two_node(bool forward) {
  Digraph g(2);
  if (forward)
    g.add_edge(0, 1);
  else
    g.add_edge(1, 0);
  return g;
}

}  // namespace

TEST_CASE("static sequence returns the same graph at every round") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph::ring(4));
  CHECK(seq.graph_at(0) == Digraph::ring(4));
  CHECK(seq.graph_at(17) == Digraph::ring(4));
  CHECK(seq.graph_at(100000) == Digraph::ring(4));
}

TEST_CASE("cyclic schedule selects by round mod period") {
  const GraphSequence seq =
      GraphSequence::cyclic_schedule({two_node(true), two_node(false)}, 2);
  CHECK(seq.graph_at(0) == two_node(true));
  CHECK(seq.graph_at(3) == two_node(false));
  CHECK(seq.graph_at(4) == two_node(true));
}

TEST_CASE("random sequences are pure functions of (seed, t)") {
  const GraphSequence a = GraphSequence::random_b_connected(4, 3, 7);
  const GraphSequence b = GraphSequence::random_b_connected(4, 3, 7);
  for (long t : {0L, 1L, 2L, 17L, 100L}) {
    CHECK(a.graph_at(t) == a.graph_at(t));
    CHECK(a.graph_at(t) == b.graph_at(t));
  }
  const GraphSequence other = GraphSequence::random_b_connected(4, 3, 8);
  bool any_difference = false;
  for (long t = 0; t < 20 && !any_difference; ++t)
    any_difference = !(a.graph_at(t) == other.graph_at(t));
  CHECK(any_difference);
}

TEST_CASE("out-degree counts the implicit self-loop") {
  const Digraph isolated(3);
  CHECK(isolated.out_degree(0) == 1);
  CHECK(isolated.in_degree(2) == 1);

  Digraph cycle(3);
  cycle.add_edge(0, 1);
  cycle.add_edge(1, 2);
  cycle.add_edge(2, 0);
  for (int i = 0; i < 3; ++i) CHECK(cycle.out_degree(i) == 2);

  const Digraph complete = Digraph::complete(5);
  for (int i = 0; i < 5; ++i) CHECK(complete.out_degree(i) == 5);

  CHECK_THROWS_AS((void)cycle.out_degree(3), std::out_of_range);
  CHECK_THROWS_AS((void)cycle.out_degree(-1), std::out_of_range);
}

TEST_CASE("self-loops are implicit and duplicates are ignored") {
  Digraph g(3);
  g.add_edge(0, 0);  // ignored
  g.add_edge(0, 1);
  g.add_edge(0, 1);
  CHECK(g.edge_count() == 1);
  CHECK(g.out_degree(0) == 2);
  CHECK_FALSE(g.has_edge(0, 0));
}

TEST_CASE("window verification over a strongly connected static graph") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph::ring(5));
  const ConnectivityCheck check = verify_b_connected(seq, 1, 10);
  CHECK(check.all_connected);
  CHECK_FALSE(check.first_failing_window.has_value());
}

TEST_CASE("alternating single edges need the two-round window") {
  // Edge 1->2 at even rounds, 2->1 at odd rounds: each window of two rounds
  // unions to a strongly connected pair, single rounds do not.
  const GraphSequence seq =
      GraphSequence::cyclic_schedule({two_node(true), two_node(false)}, 2);
  CHECK(verify_b_connected(seq, 2, 6).all_connected);

  const ConnectivityCheck narrow = verify_b_connected(seq, 1, 6);
  CHECK_FALSE(narrow.all_connected);
  REQUIRE(narrow.first_failing_window.has_value());
  CHECK(*narrow.first_failing_window == 0);
}

TEST_CASE("edgeless sequences fail at the first window") {
  const GraphSequence seq = GraphSequence::static_graph(Digraph(3));
  const ConnectivityCheck check = verify_b_connected(seq, 4, 3);
  CHECK_FALSE(check.all_connected);
  CHECK(*check.first_failing_window == 0);
}

TEST_CASE("generated B-connected sequences pass their own claimed window") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 7);
    const int b = 1 + static_cast<int>(seed % 4);
    const GraphSequence seq = GraphSequence::random_b_connected(n, b, seed);
    const ConnectivityCheck check = verify_b_connected(seq, b, 8);
    CAPTURE(seed);
    CAPTURE(n);
    CAPTURE(b);
    CHECK(check.all_connected);
  }
}

TEST_CASE("generated graphs keep degree and self-loop invariants") {
  const GraphSequence seq = GraphSequence::random_b_connected(6, 2, 99, 0.2);
  for (long t = 0; t < 12; ++t) {
    const Digraph g = seq.graph_at(t);
    for (int i = 0; i < g.node_count(); ++i) {
      CHECK(g.out_degree(i) >= 1);
      CHECK(g.in_degree(i) >= 1);
    }
  }
}

TEST_CASE("regular family rounds have matching in- and out-degrees") {
  const GraphSequence seq = GraphSequence::regular_family(7, {2, 3, 1});
  for (long t = 0; t < 9; ++t) {
    const Digraph g = seq.graph_at(t);
    CHECK(g.regular());
    const int expected = static_cast<int>(t % 3 == 0 ? 3 : (t % 3 == 1 ? 4 : 2));
    for (int i = 0; i < 7; ++i) {
      CHECK(g.out_degree(i) == expected);
      CHECK(g.in_degree(i) == expected);
    }
  }
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(Digraph(0), std::invalid_argument);
  CHECK_THROWS_AS(GraphSequence::random_b_connected(3, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(GraphSequence::random_b_connected(3, 1, 1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(GraphSequence::regular_family(4, {}), std::invalid_argument);
  CHECK_THROWS_AS(GraphSequence::regular_family(4, {4}), std::invalid_argument);
  CHECK_THROWS_AS(GraphSequence::cyclic_schedule({}, 1), std::invalid_argument);
}
