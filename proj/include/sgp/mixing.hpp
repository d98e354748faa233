#ifndef SGP_MIXING_HPP
#define SGP_MIXING_HPP

#include <optional>
#include <string>
#include <vector>

#include "sgp/graph.hpp"

namespace sgp {

// Dense row-major matrix. All reductions run in fixed index order so that
// results are bit-identical across platforms and builds.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols, double value = 0.0);
  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  Matrix multiply(const Matrix& rhs) const;
  Matrix transpose() const;
  std::vector<double> multiply_vector(const std::vector<double>& v) const;

  double min_row_sum() const;
  double max_row_sum() const;
  // max_i (max_j - min_j) over row i.
  double max_row_spread() const;
  // max_j (max_i - min_i) over column j.
  double max_column_spread() const;
  // max_j |colsum_j - 1|.
  double max_column_sum_drift() const;

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Column-stochastic mixing matrix of a digraph: entry (i, j) = 1/d_j when j
// is an in-neighbor of i (self-loop included), 0 otherwise. Columns sum to 1
// up to rounding and every diagonal entry is strictly positive.
class MixingMatrix {
public:
  explicit MixingMatrix(const Digraph& g);

  int size() const { return entries_.rows(); }
  double at(int i, int j) const { return entries_.at(i, j); }
  const Matrix& entries() const { return entries_; }
  double max_column_sum_drift() const { return entries_.max_column_sum_drift(); }
  bool doubly_stochastic(double tol = 1e-12) const;

private:
  Matrix entries_;
};

inline MixingMatrix build_mixing(const Digraph& g) { return MixingMatrix(g); }

// Running product A(t:s) = A(t) ... A(s), grown on the left one round at a
// time. Stays column-stochastic; no renormalization is applied, the drift
// diagnostic reports accumulated column-sum error instead.
class ProductAccumulator {
public:
  ProductAccumulator(const MixingMatrix& a_start, long start_round);

  // product <- a * product, extending A(t:s) to A(t+1:s).
  void accumulate(const MixingMatrix& a);

  const Matrix& product() const { return product_; }
  long start_round() const { return start_; }
  long end_round() const { return end_; }
  int size() const { return product_.rows(); }

private:
  Matrix product_;
  long start_ = 0;
  long end_ = 0;
};

struct ConnectivityParams {
  enum class Provenance { TheoreticalGeneral, TheoreticalRegular, Empirical };

  double delta = 1.0;   // in (0, 1]
  double lambda = 0.5;  // in [0, 1]; extreme window sizes round to 1.0 in double
  double C = 4.0;       // > 0
  Provenance provenance = Provenance::TheoreticalGeneral;
};

// Running minimum over t = 1..horizon of min_i y_i(t) for y(t) grown by the
// mixing matrices from y(0) = 1; equivalently the minimum row sum over the
// forward products of the first t matrices. Result lies in (0, 1].
double measure_delta(const GraphSequence& seq, long horizon);

// Worst-case (delta, lambda, C) for a B-connected sequence on n nodes.
// General sequences: delta = n^{-nB}, lambda = (1 - n^{-nB})^{1/(nB)}, C = 4.
// Regular sequences: delta = 1 and lambda = min{(1 - 1/(4n^3))^{1/B},
// sqrt(sigma2_max)}; C = 2*sqrt(2), or 2 when the sigma2 branch is smaller.
ConnectivityParams theoretical_params(int n, int window, bool regular,
                                      std::optional<double> sigma2_max = std::nullopt);

// Fits the geometric decay rate of the column spread of transposed-matrix
// products grown from round `start`. Samples below the 1e-13 noise floor are
// excluded from the fit; if consensus is below the floor from the first
// sample the rate is reported as 0.
double estimate_lambda(const GraphSequence& seq, long start, long horizon);

// Second-largest singular value of a doubly stochastic mixing matrix, by
// power iteration on A'A deflated against the all-ones direction.
double sigma2(const MixingMatrix& a);

struct PhiEstimate {
  std::vector<double> phi;       // stochastic limit vector, phi_i = row value
  double residual_spread = 0.0;  // row spread left when extension stopped
  long oldest_round = 0;         // s reached by the backward extension
};

// Approximates the limit vector of A(t:s) as s recedes: extends the product
// to older rounds until every row is constant to within tol (or round 0 is
// reached) and returns the row values.
PhiEstimate estimate_phi(const GraphSequence& seq, long t, double tol = 1e-12);

}  // namespace sgp

#endif
