#ifndef SGP_OPTIMIZER_HPP
#define SGP_OPTIMIZER_HPP

#include <span>
#include <vector>

#include "sgp/graph.hpp"
#include "sgp/mixing.hpp"
#include "sgp/objectives.hpp"
#include "sgp/pushsum.hpp"
#include "sgp/schedule.hpp"

namespace sgp {

// Trajectory of a subgradient-push run. Identical layout to PushSumTrace for
// the shared fields (round r at index r-1, xbar[r] for r = 0..rounds); eps
// holds the applied step -alpha(r) g_i(r), ztilde the stepsize-weighted
// running average of z initialized at round 1.
struct SgpTrace {
  int n = 0;
  int d = 1;
  long rounds = 0;
  std::vector<double> x0;
  double x0_l1 = 0.0;

  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> ztilde;
  std::vector<std::vector<double>> eps;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> xbar;
  std::vector<double> eps_l1;
  std::vector<double> alpha;        // alpha(r), r = 1..rounds
  std::vector<double> alpha_sum;    // S(r) = alpha(1) + ... + alpha(r)

  double consensus_radius(long r) const;  // max_{i,j} ||z_i(r) - z_j(r)||_2
  // Stepsize-weighted average of xbar(0..t) normalized by S(t+1).
  std::vector<double> weighted_xbar_average(long t) const;
  PushSumTrace as_pushsum_trace() const;
};

// Runs the optimizer for the given number of rounds: each round is the
// averaging protocol round with eps_i = -alpha g_i(z_i), followed by the
// ztilde running-average update.
SgpTrace run_sgp(const GraphSequence& seq, const ObjectiveSpec& spec, const StepSchedule& sched,
                 std::span<const double> x0, long rounds);

// RHS - LHS of the per-step descent inequality
//   ||xbar(t+1) - v||^2 <= ||xbar(t) - v||^2
//                          - (2 alpha(t+1)/n)(F(xbar(t)) - F(v))
//                          + (4 alpha(t+1)/n) sum_i L_i ||z_i(t+1) - xbar(t)||
//                          + alpha(t+1)^2 (sum_i L_i)^2 / n^2
// evaluated from the recorded trajectory; nonnegative up to rounding when the
// inequality holds.
double lemma_key_residual(const SgpTrace& trace, const ObjectiveSpec& spec,
                          std::span<const double> v, long t);

// The four-term O(ln t / sqrt(t)) bound on F(ztilde_i(t)) - F(z*):
//   (n/2) ||xbar(0)-z*||_1 / sqrt(t)
// + (n/2) ((sum L_i)^2/4) (1+ln t) / sqrt(t)
// + 16/(delta(1-lambda)) (sum L_i) (sum_j ||x_j(0)||_1) / sqrt(t)
// + 16/(delta(1-lambda)) (sum L_i^2) (1+ln t) / sqrt(t).
// Requires the plain 1/sqrt(t) schedule.
double theorem2_bound(const ObjectiveSpec& spec, const ConnectivityParams& params,
                      std::span<const double> x0, std::span<const double> z_star, long t,
                      const StepSchedule& sched);

// The intermediate bound on F(weighted average of xbar) - F(z*), with
// denominators sqrt(t+2) - 1:
//   (n/4) ||xbar(0)-z*||_1 / (sqrt(t+2)-1)
// + (sum L_i)^2 (1+ln t) / (4n (sqrt(t+2)-1))
// + 8 ((sum L_i)(sum_j ||x_j(0)||_1) + (sum L_i^2)(1+ln t)) / (delta(1-lambda)(sqrt(t+2)-1)).
double lemma9_bound(const ObjectiveSpec& spec, const ConnectivityParams& params,
                    std::span<const double> x0, std::span<const double> z_star, long t,
                    const StepSchedule& sched);

}  // namespace sgp

#endif
