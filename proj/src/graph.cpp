#include "sgp/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "sgp/rng.hpp"

namespace sgp {
namespace {

constexpr std::uint64_t kWindowStream = 0x77696e64;  // cycle layout per window
constexpr std::uint64_t kRoundStream = 0x726f756e;   // extra edges per round

}  // namespace

Digraph::Digraph(int n) : n_(n), out_(n), in_(n) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
}

Digraph Digraph::complete(int n) {
  Digraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g.add_edge(i, j);
  return g;
}

Digraph Digraph::ring(int n) {
  Digraph g(n);
  for (int i = 0; i < n && n > 1; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Digraph Digraph::circulant(int n, int hops) {
  if (hops < 0 || hops > n - 1) throw std::invalid_argument("circulant hop count out of range");
  Digraph g(n);
  for (int i = 0; i < n; ++i)
    for (int k = 1; k <= hops; ++k) g.add_edge(i, (i + k) % n);
  return g;
}

void Digraph::check_node(int i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("node index out of range");
}

void Digraph::add_edge(int from, int to) {
  check_node(from);
  check_node(to);
  if (from == to) return;  // self-loops are implicit
  auto& fo = out_[from];
  auto pos = std::lower_bound(fo.begin(), fo.end(), to);
  if (pos != fo.end() && *pos == to) return;
  fo.insert(pos, to);
  auto& ti = in_[to];
  ti.insert(std::lower_bound(ti.begin(), ti.end(), from), from);
}

bool Digraph::has_edge(int from, int to) const {
  check_node(from);
  check_node(to);
  if (from == to) return false;
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

int Digraph::out_degree(int i) const {
  check_node(i);
  return static_cast<int>(out_[i].size()) + 1;
}

int Digraph::in_degree(int i) const {
  check_node(i);
  return static_cast<int>(in_[i].size()) + 1;
}

const std::vector<int>& Digraph::out_neighbors(int i) const {
  check_node(i);
  return out_[i];
}

const std::vector<int>& Digraph::in_neighbors(int i) const {
  check_node(i);
  return in_[i];
}

std::size_t Digraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& adj : out_) total += adj.size();
  return total;
}

namespace {

// Marks everything reachable from node 0 following `adj`.
bool reaches_all(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

}  // namespace

bool Digraph::strongly_connected() const {
  if (n_ == 1) return true;
  return reaches_all(n_, out_) && reaches_all(n_, in_);
}

bool Digraph::regular() const {
  const int d = out_degree(0);
  for (int i = 0; i < n_; ++i)
    if (out_degree(i) != d || in_degree(i) != d) return false;
  return true;
}

GraphSequence GraphSequence::static_graph(Digraph g, int claimed_window) {
  if (claimed_window < 1) throw std::invalid_argument("connectivity window must be >= 1");
  GraphSequence seq;
  seq.model_ = GraphModel::Static;
  seq.n_ = g.node_count();
  seq.window_ = claimed_window;
  seq.schedule_.push_back(std::move(g));
  return seq;
}

GraphSequence GraphSequence::cyclic_schedule(std::vector<Digraph> period, int claimed_window) {
  if (period.empty()) throw std::invalid_argument("cyclic schedule needs at least one graph");
  if (claimed_window < 1) throw std::invalid_argument("connectivity window must be >= 1");
  const int n = period.front().node_count();
  for (const auto& g : period)
    if (g.node_count() != n) throw std::invalid_argument("cyclic schedule graphs must share node count");
  GraphSequence seq;
  seq.model_ = GraphModel::CyclicSchedule;
  seq.n_ = n;
  seq.window_ = claimed_window;
  seq.schedule_ = std::move(period);
  return seq;
}

GraphSequence GraphSequence::random_b_connected(int n, int window, std::uint64_t seed,
                                                double extra_edge_prob) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  if (window < 1) throw std::invalid_argument("connectivity window must be >= 1");
  if (extra_edge_prob < 0.0 || extra_edge_prob > 1.0)
    throw std::invalid_argument("edge probability must lie in [0, 1]");
  GraphSequence seq;
  seq.model_ = GraphModel::RandomBConnected;
  seq.n_ = n;
  seq.window_ = window;
  seq.seed_ = seed;
  seq.extra_edge_prob_ = extra_edge_prob;
  return seq;
}

GraphSequence GraphSequence::regular_family(int n, std::vector<int> degrees_cycle) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  if (degrees_cycle.empty()) throw std::invalid_argument("regular family needs at least one hop count");
  for (int c : degrees_cycle)
    if (c < 1 || c > n - 1)
      throw std::invalid_argument("regular family hop counts must lie in [1, n-1]");
  GraphSequence seq;
  seq.model_ = GraphModel::RegularFamily;
  seq.n_ = n;
  seq.window_ = 1;  // each circulant round is strongly connected on its own
  seq.degrees_cycle_ = std::move(degrees_cycle);
  return seq;
}

std::size_t GraphSequence::period_length() const {
  switch (model_) {
    case GraphModel::Static:
    case GraphModel::CyclicSchedule:
      return schedule_.size();
    case GraphModel::RegularFamily:
      return degrees_cycle_.size();
    case GraphModel::RandomBConnected:
      return 0;
  }
  return 0;
}

Digraph GraphSequence::graph_at(long t) const {
  if (t < 0) throw std::invalid_argument("round index must be >= 0");
  switch (model_) {
    case GraphModel::Static:
      return schedule_.front();
    case GraphModel::CyclicSchedule:
      return schedule_[static_cast<std::size_t>(t % static_cast<long>(schedule_.size()))];
    case GraphModel::RegularFamily: {
      const int hops = degrees_cycle_[static_cast<std::size_t>(
          t % static_cast<long>(degrees_cycle_.size()))];
      return Digraph::circulant(n_, hops);
    }
    case GraphModel::RandomBConnected:
      break;
  }

  Digraph g(n_);
  const long k = t / window_;
  const long r = t - k * window_;

  if (n_ > 1) {
    Rng window_rng(mix_seed(seed_, kWindowStream, static_cast<std::uint64_t>(k)));
    std::vector<int> perm(n_);
    for (int i = 0; i < n_; ++i) perm[i] = i;
    window_rng.shuffle(perm);
    for (int e = 0; e < n_; ++e) {
      const long assigned = static_cast<long>(window_rng.next_below(static_cast<std::uint64_t>(window_)));
      if (assigned == r) g.add_edge(perm[e], perm[(e + 1) % n_]);
    }
  }

  Rng round_rng(mix_seed(seed_, kRoundStream, static_cast<std::uint64_t>(t)));
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      if (round_rng.next_double() < extra_edge_prob_) g.add_edge(i, j);
    }
  }
  return g;
}

Digraph window_union(const GraphSequence& seq, int window, long k) {
  if (window < 1) throw std::invalid_argument("connectivity window must be >= 1");
  if (k < 0) throw std::invalid_argument("window index must be >= 0");
  Digraph acc(seq.node_count());
  for (long t = k * window; t < (k + 1) * window; ++t) {
    const Digraph g = seq.graph_at(t);
    for (int i = 0; i < g.node_count(); ++i)
      for (int j : g.out_neighbors(i)) acc.add_edge(i, j);
  }
  return acc;
}

ConnectivityCheck verify_b_connected(const GraphSequence& seq, int window, long k_max) {
  if (k_max < 1) throw std::invalid_argument("window count must be >= 1");
  ConnectivityCheck result;
  result.window_ok.reserve(static_cast<std::size_t>(k_max));
  for (long k = 0; k < k_max; ++k) {
    const bool ok = window_union(seq, window, k).strongly_connected();
    result.window_ok.push_back(ok);
    if (!ok && result.all_connected) {
      result.all_connected = false;
      result.first_failing_window = k;
    }
  }
  return result;
}

}  // namespace sgp
