#include "sgp/pushsum.hpp"

#include <cmath>
#include <string>

namespace sgp {
namespace {

double l1_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += std::abs(x);
  return sum;
}

std::vector<double> node_average(const std::vector<double>& stacked, int n, int d) {
  std::vector<double> avg(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < d; ++l) avg[l] += stacked[static_cast<std::size_t>(i) * d + l];
  for (double& v : avg) v /= n;
  return avg;
}

}  // namespace

PushSumState make_pushsum_state(int n, int d, std::span<const double> x0) {
  if (n < 1 || d < 1) throw std::invalid_argument("state needs n >= 1 and d >= 1");
  if (static_cast<int>(x0.size()) != n * d)
    throw std::invalid_argument("initial values must have n*d entries");
  PushSumState st;
  st.n = n;
  st.d = d;
  st.t = 0;
  st.x.assign(x0.begin(), x0.end());
  st.w.assign(static_cast<std::size_t>(n) * d, 0.0);
  st.z.assign(static_cast<std::size_t>(n) * d, 0.0);
  st.y.assign(static_cast<std::size_t>(n), 1.0);
  return st;
}

void pushsum_round(PushSumState& state, const Digraph& g, const PerturbationSource& eps,
                   std::vector<double>* eps_out) {
  const int n = state.n;
  const int d = state.d;
  if (g.node_count() != n) throw std::invalid_argument("graph node count mismatch");

  std::vector<double> inv_degree(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) inv_degree[j] = 1.0 / g.out_degree(j);

  // Broadcast shares summed over in-neighbors in ascending node order; the
  // self share enters at the sender's own index.
  std::vector<double> new_w(static_cast<std::size_t>(n) * d, 0.0);
  std::vector<double> new_y(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto& in = g.in_neighbors(i);
    std::size_t cursor = 0;
    auto receive = [&](int j) {
      const double share = inv_degree[j];
      for (int l = 0; l < d; ++l)
        new_w[static_cast<std::size_t>(i) * d + l] += state.x[static_cast<std::size_t>(j) * d + l] * share;
      new_y[i] += state.y[j] * share;
    };
    while (cursor < in.size() && in[cursor] < i) receive(in[cursor++]);
    receive(i);
    while (cursor < in.size()) receive(in[cursor++]);
  }

  for (int i = 0; i < n; ++i) {
    if (!(new_y[i] >= kWeightGuard)) {
      throw WeightUnderflowError(
          "push-sum weight y_" + std::to_string(i + 1) + " fell below " +
          std::to_string(kWeightGuard) + " at round " + std::to_string(state.t + 1) +
          "; the sequence's influence imbalance is effectively zero or the graph "
          "sequence is not connected");
    }
  }

  state.w = std::move(new_w);
  state.y = std::move(new_y);
  for (int i = 0; i < n; ++i) {
    const double ratio = 1.0 / state.y[i];
    for (int l = 0; l < d; ++l)
      state.z[static_cast<std::size_t>(i) * d + l] = state.w[static_cast<std::size_t>(i) * d + l] * ratio;
  }

  const long next_round = state.t + 1;
  std::vector<double> applied(static_cast<std::size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i) {
    std::span<const double> z_i(state.z.data() + static_cast<std::size_t>(i) * d,
                                static_cast<std::size_t>(d));
    std::span<double> out(applied.data() + static_cast<std::size_t>(i) * d,
                          static_cast<std::size_t>(d));
    eps.eval(next_round, i, z_i, out);
  }
  for (std::size_t k = 0; k < state.x.size(); ++k) state.x[k] = state.w[k] + applied[k];
  if (eps_out) *eps_out = std::move(applied);
  state.t = next_round;
}

double PushSumTrace::tracking_error_coord(long r, int node, int coord) const {
  const auto& zr = z[static_cast<std::size_t>(r - 1)];
  const auto& prev = xbar[static_cast<std::size_t>(r - 1)];
  return std::abs(zr[static_cast<std::size_t>(node) * d + coord] - prev[static_cast<std::size_t>(coord)]);
}

double PushSumTrace::tracking_error(long r, int node) const {
  double sum = 0.0;
  for (int l = 0; l < d; ++l) sum += tracking_error_coord(r, node, l);
  return sum;
}

double PushSumTrace::tracking_error_max(long r, int node) const {
  double worst = 0.0;
  for (int l = 0; l < d; ++l) worst = std::max(worst, tracking_error_coord(r, node, l));
  return worst;
}

double PushSumTrace::max_tracking_error(long r) const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, tracking_error(r, i));
  return worst;
}

double PushSumTrace::min_weight() const {
  double result = 1.0;
  for (const auto& yr : y)
    for (double v : yr) result = std::min(result, v);
  return result;
}

PushSumTrace run_pushsum(const GraphSequence& seq, std::span<const double> x0, int d,
                         const PerturbationSource& eps, long rounds) {
  if (rounds < 1) throw std::invalid_argument("round count must be >= 1");
  const int n = seq.node_count();
  PushSumState state = make_pushsum_state(n, d, x0);

  PushSumTrace trace;
  trace.n = n;
  trace.d = d;
  trace.rounds = rounds;
  trace.x0.assign(x0.begin(), x0.end());
  trace.x0_l1 = l1_norm(x0);
  trace.x.reserve(static_cast<std::size_t>(rounds));
  trace.z.reserve(static_cast<std::size_t>(rounds));
  trace.eps.reserve(static_cast<std::size_t>(rounds));
  trace.y.reserve(static_cast<std::size_t>(rounds));
  trace.xbar.reserve(static_cast<std::size_t>(rounds) + 1);
  trace.eps_l1.reserve(static_cast<std::size_t>(rounds));
  trace.xbar.push_back(node_average(state.x, n, d));

  std::vector<double> applied;
  for (long r = 1; r <= rounds; ++r) {
    pushsum_round(state, seq.graph_at(r - 1), eps, &applied);
    trace.x.push_back(state.x);
    trace.z.push_back(state.z);
    trace.y.push_back(state.y);
    trace.eps.push_back(applied);
    trace.eps_l1.push_back(l1_norm(applied));
    trace.xbar.push_back(node_average(state.x, n, d));
  }
  return trace;
}

double lemma1_bound(const PushSumTrace& trace, const ConnectivityParams& params, long t) {
  if (t < 0 || t > trace.rounds) throw std::invalid_argument("round index out of trace range");
  double sum = std::pow(params.lambda, static_cast<double>(t)) * trace.x0_l1;
  for (long s = 1; s <= t; ++s)
    sum += std::pow(params.lambda, static_cast<double>(t - s)) * trace.eps_l1[static_cast<std::size_t>(s - 1)];
  return (8.0 / params.delta) * sum;
}

std::vector<double> lemma1_bound_series(const PushSumTrace& trace, const ConnectivityParams& params) {
  std::vector<double> bounds(static_cast<std::size_t>(trace.rounds));
  double acc = trace.x0_l1;  // lambda^t ||x(0)||_1 + sum_s lambda^{t-s} ||eps(s)||_1, grown per round
  for (long t = 0; t < trace.rounds; ++t) {
    if (t > 0) acc = params.lambda * acc + trace.eps_l1[static_cast<std::size_t>(t - 1)];
    bounds[static_cast<std::size_t>(t)] = (8.0 / params.delta) * acc;
  }
  return bounds;
}

double corollary2_bound(const PushSumTrace& trace, const ConnectivityParams& params,
                        double perturbation_scale, long t) {
  if (t < 1) throw std::invalid_argument("round index must be >= 1");
  const double numerator =
      trace.x0_l1 + perturbation_scale * (1.0 + std::log(static_cast<double>(t)));
  const double denominator =
      params.delta * (1.0 - params.lambda) * (std::sqrt(static_cast<double>(t + 2)) - 1.0);
  return 4.0 * numerator / denominator;
}

double weighted_tracking_error(const PushSumTrace& trace, int node, long t) {
  if (t < 0 || t + 1 > trace.rounds) throw std::invalid_argument("round index out of trace range");
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (long k = 0; k <= t; ++k) {
    const double alpha = 1.0 / std::sqrt(static_cast<double>(k + 1));
    weight_sum += alpha;
    weighted += alpha * trace.tracking_error(k + 1, node);
  }
  return weighted / weight_sum;
}

}  // namespace sgp
