#ifndef SGP_GRAPH_HPP
#define SGP_GRAPH_HPP

#include <cstdint>
#include <optional>
#include <vector>

namespace sgp {

// Directed graph on nodes 0..n-1. Only arcs with from != to are stored;
// every neighborhood and degree query counts the implicit self-loop, so
// out_degree(i) >= 1 always holds.
class Digraph {
public:
  explicit Digraph(int n);

  static Digraph complete(int n);
  // Directed ring i -> (i+1) mod n.
  static Digraph ring(int n);
  // Each node points to the next `hops` nodes mod n; in- and out-degrees
  // all equal hops + 1 (self-loop included), so the graph is regular.
  static Digraph circulant(int n, int hops);

  int node_count() const { return n_; }
  void add_edge(int from, int to);
  bool has_edge(int from, int to) const;

  // |N_i^out| and |N_i^in| with the self-loop counted.
  int out_degree(int i) const;
  int in_degree(int i) const;

  // Stored neighbors, sorted ascending, self excluded.
  const std::vector<int>& out_neighbors(int i) const;
  const std::vector<int>& in_neighbors(int i) const;

  std::size_t edge_count() const;
  bool strongly_connected() const;
  // in-degree == out-degree == common value for every node.
  bool regular() const;

  bool operator==(const Digraph& other) const = default;

private:
  void check_node(int i) const;

  int n_ = 0;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

enum class GraphModel { Static, CyclicSchedule, RandomBConnected, RegularFamily };

// Deterministic time-indexed sequence {G(t)}: graph_at is a pure function of
// the construction parameters and t, so repeated queries and replays agree.
//
// The claimed connectivity window B is carried for generation and for the
// verifier/bound evaluators only; the protocol runners never read it.
class GraphSequence {
public:
  static GraphSequence static_graph(Digraph g, int claimed_window = 1);
  static GraphSequence cyclic_schedule(std::vector<Digraph> period, int claimed_window);
  // Per window of B rounds: a Hamiltonian cycle on a random permutation is
  // split across the window's rounds, then every other arc appears
  // independently with probability extra_edge_prob per round. The embedded
  // cycle makes each window union strongly connected by construction.
  static GraphSequence random_b_connected(int n, int window, std::uint64_t seed,
                                          double extra_edge_prob = 0.1);
  // Circulant graph per round with hop count degrees_cycle[t % size].
  static GraphSequence regular_family(int n, std::vector<int> degrees_cycle);

  int node_count() const { return n_; }
  int claimed_window() const { return window_; }
  GraphModel model() const { return model_; }
  bool regular_by_construction() const { return model_ == GraphModel::RegularFamily; }
  std::uint64_t seed() const { return seed_; }
  double extra_edge_prob() const { return extra_edge_prob_; }
  // Number of distinct graphs in a cyclic or regular-family schedule (1 for
  // static, 0 when not periodic).
  std::size_t period_length() const;

  Digraph graph_at(long t) const;

private:
  GraphSequence() = default;

  GraphModel model_ = GraphModel::Static;
  int n_ = 0;
  int window_ = 1;
  std::uint64_t seed_ = 0;
  double extra_edge_prob_ = 0.1;
  std::vector<Digraph> schedule_;
  std::vector<int> degrees_cycle_;
};

inline Digraph graph_at(const GraphSequence& seq, long t) { return seq.graph_at(t); }
inline int out_degree(const Digraph& g, int i) { return g.out_degree(i); }

// Union of the edge sets over rounds k*B .. (k+1)*B - 1.
Digraph window_union(const GraphSequence& seq, int window, long k);

struct ConnectivityCheck {
  bool all_connected = true;
  std::optional<long> first_failing_window;
  std::vector<bool> window_ok;
};

// Checks strong connectivity of every window union for k = 0..k_max-1 via
// forward and reverse reachability sweeps from node 0.
ConnectivityCheck verify_b_connected(const GraphSequence& seq, int window, long k_max);

}  // namespace sgp

#endif
