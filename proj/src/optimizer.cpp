#include "sgp/optimizer.hpp"

#include <cmath>
#include <stdexcept>

#include "sgp/perturbation.hpp"

namespace sgp {
namespace {

double l1_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += std::abs(x);
  return sum;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) sum += std::abs(a[l] - b[l]);
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

double SgpTrace::consensus_radius(long r) const {
  const auto& zr = z[static_cast<std::size_t>(r - 1)];
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double sq = 0.0;
      for (int l = 0; l < d; ++l) {
        const double diff = zr[static_cast<std::size_t>(i) * d + l] - zr[static_cast<std::size_t>(j) * d + l];
        sq += diff * diff;
      }
      worst = std::max(worst, std::sqrt(sq));
    }
  }
  return worst;
}

std::vector<double> SgpTrace::weighted_xbar_average(long t) const {
  std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
  double weight_sum = 0.0;
  for (long k = 0; k <= t; ++k) {
    const double a = alpha[static_cast<std::size_t>(k)];  // alpha(k+1)
    weight_sum += a;
    const auto& xb = xbar[static_cast<std::size_t>(k)];
    for (int l = 0; l < d; ++l) acc[l] += a * xb[l];
  }
  for (double& v : acc) v /= weight_sum;
  return acc;
}

PushSumTrace SgpTrace::as_pushsum_trace() const {
  PushSumTrace trace;
  trace.n = n;
  trace.d = d;
  trace.rounds = rounds;
  trace.x0 = x0;
  trace.x0_l1 = x0_l1;
  trace.x = x;
  trace.z = z;
  trace.eps = eps;
  trace.y = y;
  trace.xbar = xbar;
  trace.eps_l1 = eps_l1;
  return trace;
}

SgpTrace run_sgp(const GraphSequence& seq, const ObjectiveSpec& spec, const StepSchedule& sched,
                 std::span<const double> x0, long rounds) {
  if (rounds < 1) throw std::invalid_argument("round count must be >= 1");
  const int n = seq.node_count();
  const int d = spec.dimension();
  if (spec.node_count() != n) throw std::invalid_argument("objective node count mismatch");

  PushSumState state = make_pushsum_state(n, d, x0);
  const SubgradientPerturbation source(spec, sched);

  SgpTrace trace;
  trace.n = n;
  trace.d = d;
  trace.rounds = rounds;
  trace.x0.assign(x0.begin(), x0.end());
  trace.x0_l1 = l1_norm(x0);
  trace.xbar.push_back(node_average(state.x, n, d));

  std::vector<double> ztilde;
  std::vector<double> applied;
  double alpha_sum = 0.0;
  for (long r = 1; r <= rounds; ++r) {
    pushsum_round(state, seq.graph_at(r - 1), source, &applied);
    const double a = sched.alpha(r);

    // ztilde(1) = z(1); afterwards the running stepsize-weighted average
    // ztilde(r) = (alpha(r) z(r) + S(r-1) ztilde(r-1)) / S(r).
    if (r == 1) {
      ztilde = state.z;
    } else {
      const double total = alpha_sum + a;
      for (std::size_t k = 0; k < ztilde.size(); ++k)
        ztilde[k] = (a * state.z[k] + alpha_sum * ztilde[k]) / total;
    }
    alpha_sum += a;

    trace.x.push_back(state.x);
    trace.z.push_back(state.z);
    trace.ztilde.push_back(ztilde);
    trace.y.push_back(state.y);
    trace.eps.push_back(applied);
    trace.eps_l1.push_back(l1_norm(applied));
    trace.xbar.push_back(node_average(state.x, n, d));
    trace.alpha.push_back(a);
    trace.alpha_sum.push_back(alpha_sum);
  }
  return trace;
}

double lemma_key_residual(const SgpTrace& trace, const ObjectiveSpec& spec,
                          std::span<const double> v, long t) {
  if (t < 0 || t + 1 > trace.rounds) throw std::invalid_argument("rounds t and t+1 must be in the trace");
  const int n = trace.n;
  const int d = trace.d;
  const auto& xbar_t = trace.xbar[static_cast<std::size_t>(t)];
  const auto& xbar_next = trace.xbar[static_cast<std::size_t>(t + 1)];
  const auto& z_next = trace.z[static_cast<std::size_t>(t)];  // z(t+1)
  const double alpha = trace.alpha[static_cast<std::size_t>(t)];

  double lhs = 0.0;
  for (int l = 0; l < d; ++l) {
    const double diff = xbar_next[static_cast<std::size_t>(l)] - v[static_cast<std::size_t>(l)];
    lhs += diff * diff;
  }

  double dist_sq = 0.0;
  for (int l = 0; l < d; ++l) {
    const double diff = xbar_t[static_cast<std::size_t>(l)] - v[static_cast<std::size_t>(l)];
    dist_sq += diff * diff;
  }

  double tracking = 0.0;  // sum_i L_i ||z_i(t+1) - xbar(t)||_2
  for (int i = 0; i < n; ++i) {
    double sq = 0.0;
    for (int l = 0; l < d; ++l) {
      const double diff = z_next[static_cast<std::size_t>(i) * d + l] - xbar_t[static_cast<std::size_t>(l)];
      sq += diff * diff;
    }
    tracking += spec.subgradient_bound(i) * std::sqrt(sq);
  }

  const double total_bound = spec.sum_bounds();
  const double rhs = dist_sq - (2.0 * alpha / n) * (spec.evaluate_total(xbar_t) - spec.evaluate_total(v)) +
                     (4.0 * alpha / n) * tracking +
                     alpha * alpha * total_bound * total_bound / (static_cast<double>(n) * n);
  return rhs - lhs;
}

namespace {

void require_inv_sqrt(const StepSchedule& sched) {
  if (!sched.is_plain_inv_sqrt())
    throw std::invalid_argument("rate bound requires the plain 1/sqrt(t) schedule");
}

}  // namespace

double theorem2_bound(const ObjectiveSpec& spec, const ConnectivityParams& params,
                      std::span<const double> x0, std::span<const double> z_star, long t,
                      const StepSchedule& sched) {
  require_inv_sqrt(sched);
  if (t < 1) throw std::invalid_argument("round index must be >= 1");
  const int n = spec.node_count();
  const int d = spec.dimension();
  if (static_cast<int>(x0.size()) != n * d) throw std::invalid_argument("x0 must have n*d entries");

  std::vector<double> xbar0(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < d; ++l) xbar0[l] += x0[static_cast<std::size_t>(i) * d + l];
  for (double& v : xbar0) v /= n;

  const double sqrt_t = std::sqrt(static_cast<double>(t));
  const double log_term = 1.0 + std::log(static_cast<double>(t));
  const double sum_l = spec.sum_bounds();
  const double sum_l_sq = spec.sum_squared_bounds();
  const double mixing = 16.0 / (params.delta * (1.0 - params.lambda));

  const double term1 = 0.5 * n * l1_distance(xbar0, z_star) / sqrt_t;
  const double term2 = 0.5 * n * (sum_l * sum_l / 4.0) * log_term / sqrt_t;
  const double term3 = mixing * sum_l * l1_norm(x0) / sqrt_t;
  const double term4 = mixing * sum_l_sq * log_term / sqrt_t;
  return term1 + term2 + term3 + term4;
}

double lemma9_bound(const ObjectiveSpec& spec, const ConnectivityParams& params,
                    std::span<const double> x0, std::span<const double> z_star, long t,
                    const StepSchedule& sched) {
  require_inv_sqrt(sched);
  if (t < 1) throw std::invalid_argument("round index must be >= 1");
  const int n = spec.node_count();
  const int d = spec.dimension();
  if (static_cast<int>(x0.size()) != n * d) throw std::invalid_argument("x0 must have n*d entries");

  std::vector<double> xbar0(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < d; ++l) xbar0[l] += x0[static_cast<std::size_t>(i) * d + l];
  for (double& v : xbar0) v /= n;

  const double denom = std::sqrt(static_cast<double>(t + 2)) - 1.0;
  const double log_term = 1.0 + std::log(static_cast<double>(t));
  const double sum_l = spec.sum_bounds();
  const double sum_l_sq = spec.sum_squared_bounds();

  const double term1 = 0.25 * n * l1_distance(xbar0, z_star) / denom;
  const double term2 = sum_l * sum_l * log_term / (4.0 * n * denom);
  const double term3 = 8.0 * sum_l * l1_norm(x0) / (params.delta * (1.0 - params.lambda) * denom);
  const double term4 = 8.0 * sum_l_sq * log_term / (params.delta * (1.0 - params.lambda) * denom);
  return term1 + term2 + term3 + term4;
}

}  // namespace sgp
