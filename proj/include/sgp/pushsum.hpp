#ifndef SGP_PUSHSUM_HPP
#define SGP_PUSHSUM_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "sgp/graph.hpp"
#include "sgp/mixing.hpp"
#include "sgp/perturbation.hpp"

namespace sgp {

// Raised when some y_i drops below the underflow guard: the weight imbalance
// of the sequence is effectively zero (or the sequence is not connected) and
// the ratio z = w/y would be garbage from here on.
class WeightUnderflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kWeightGuard = 1e-300;

// Per-node protocol state. Vectors x, w, z are stacked row-major by node
// (node i occupies [i*d, (i+1)*d)); y is one positive scalar per node.
struct PushSumState {
  int n = 0;
  int d = 1;
  long t = 0;
  std::vector<double> x;
  std::vector<double> w;
  std::vector<double> z;
  std::vector<double> y;  // y_i(0) = 1
};

PushSumState make_pushsum_state(int n, int d, std::span<const double> x0);

// One synchronous round, in update order w, y, z, then x:
//   w <- A(t) x;  y <- A(t) y;  z_i <- w_i / y_i;  x <- w + eps(t+1).
// Receivers sum the broadcast shares x_j/d_j, y_j/d_j over in-neighbors in
// ascending node order (self included), so reductions are reproducible.
// eps_out, when given, receives the applied perturbation (n*d).
void pushsum_round(PushSumState& state, const Digraph& g, const PerturbationSource& eps,
                   std::vector<double>* eps_out = nullptr);

// Full trajectory of a run. Round r = 1..rounds lives at index r-1 of the
// per-round vectors; xbar[r] is the network average of x(r) for r = 0..rounds.
struct PushSumTrace {
  int n = 0;
  int d = 1;
  long rounds = 0;
  std::vector<double> x0;  // n*d
  double x0_l1 = 0.0;      // ||x(0)||_1 over all nodes and coordinates

  std::vector<std::vector<double>> x;     // n*d per round
  std::vector<std::vector<double>> z;     // n*d per round
  std::vector<std::vector<double>> eps;   // n*d per round
  std::vector<std::vector<double>> y;     // n per round
  std::vector<std::vector<double>> xbar;  // d, rounds+1 entries
  std::vector<double> eps_l1;             // ||eps(r)||_1 per round

  // |z_i(r) - xbar(r-1)| per coordinate, and its 1-norm / max across
  // coordinates; z(r) tracks the average before round r's perturbation.
  double tracking_error_coord(long r, int node, int coord) const;
  double tracking_error(long r, int node) const;      // 1-norm across coordinates
  double tracking_error_max(long r, int node) const;  // max across coordinates
  double max_tracking_error(long r) const;            // max over nodes (1-norm)

  double min_weight() const;  // min y_i(r) over the whole run
};

PushSumTrace run_pushsum(const GraphSequence& seq, std::span<const double> x0, int d,
                         const PerturbationSource& eps, long rounds);

// (8/delta) * (lambda^t ||x(0)||_1 + sum_{s=1..t} lambda^{t-s} ||eps(s)||_1):
// the tracking bound on |z_i(t+1) - xbar(t)|.
double lemma1_bound(const PushSumTrace& trace, const ConnectivityParams& params, long t);

// lemma1_bound for t = 0..rounds-1 in one pass.
std::vector<double> lemma1_bound_series(const PushSumTrace& trace, const ConnectivityParams& params);

// 4 (||x(0)||_1 + D (1 + ln t)) / (delta (1-lambda) (sqrt(t+2) - 1)): the
// bound on the 1/sqrt(s)-weighted mean tracking error when every
// ||eps_i(s)||_1 <= D / sqrt(s).
double corollary2_bound(const PushSumTrace& trace, const ConnectivityParams& params,
                        double perturbation_scale, long t);

// (1/sum_k alpha(k+1)) * sum_{k=0..t} alpha(k+1) |z_i(k+1) - xbar(k)| with
// alpha(s) = 1/sqrt(s); the quantity corollary2_bound controls.
double weighted_tracking_error(const PushSumTrace& trace, int node, long t);

}  // namespace sgp

#endif
