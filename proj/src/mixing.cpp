#include "sgp/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sgp/rng.hpp"

namespace sgp {

Matrix::Matrix(int rows, int cols, double value)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, value) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("matrix dimensions must be nonnegative");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n, 0.0);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::multiply(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("matrix dimension mismatch");
  Matrix out(rows_, rhs.cols_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      const double a = at(i, k);
      if (a == 0.0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out.at(i, j) += a * rhs.at(k, j);
    }
  }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_, 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
  return out;
}

std::vector<double> Matrix::multiply_vector(const std::vector<double>& v) const {
  if (static_cast<int>(v.size()) != cols_) throw std::invalid_argument("matrix dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(rows_), 0.0);
  for (int i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (int j = 0; j < cols_; ++j) acc += at(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double Matrix::min_row_sum() const {
  double result = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (int j = 0; j < cols_; ++j) sum += at(i, j);
    result = std::min(result, sum);
  }
  return result;
}

double Matrix::max_row_sum() const {
  double result = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (int j = 0; j < cols_; ++j) sum += at(i, j);
    result = std::max(result, sum);
  }
  return result;
}

double Matrix::max_row_spread() const {
  double result = 0.0;
  for (int i = 0; i < rows_; ++i) {
    double lo = at(i, 0), hi = at(i, 0);
    for (int j = 1; j < cols_; ++j) {
      lo = std::min(lo, at(i, j));
      hi = std::max(hi, at(i, j));
    }
    result = std::max(result, hi - lo);
  }
  return result;
}

double Matrix::max_column_spread() const {
  double result = 0.0;
  for (int j = 0; j < cols_; ++j) {
    double lo = at(0, j), hi = at(0, j);
    for (int i = 1; i < rows_; ++i) {
      lo = std::min(lo, at(i, j));
      hi = std::max(hi, at(i, j));
    }
    result = std::max(result, hi - lo);
  }
  return result;
}

double Matrix::max_column_sum_drift() const {
  double result = 0.0;
  for (int j = 0; j < cols_; ++j) {
    double sum = 0.0;
    for (int i = 0; i < rows_; ++i) sum += at(i, j);
    result = std::max(result, std::abs(sum - 1.0));
  }
  return result;
}

MixingMatrix::MixingMatrix(const Digraph& g) : entries_(g.node_count(), g.node_count(), 0.0) {
  const int n = g.node_count();
  for (int j = 0; j < n; ++j) {
    const double share = 1.0 / g.out_degree(j);
    entries_.at(j, j) = share;
    for (int i : g.out_neighbors(j)) entries_.at(i, j) = share;
  }
}

bool MixingMatrix::doubly_stochastic(double tol) const {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += entries_.at(i, j);
    if (std::abs(sum - 1.0) > tol) return false;
  }
  return max_column_sum_drift() <= tol;
}

ProductAccumulator::ProductAccumulator(const MixingMatrix& a_start, long start_round)
    : product_(a_start.entries()), start_(start_round), end_(start_round) {}

void ProductAccumulator::accumulate(const MixingMatrix& a) {
  if (a.size() != product_.rows()) throw std::invalid_argument("matrix dimension mismatch");
  product_ = a.entries().multiply(product_);
  ++end_;
}

double measure_delta(const GraphSequence& seq, long horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const int n = seq.node_count();
  std::vector<double> y(static_cast<std::size_t>(n), 1.0);
  double result = 1.0;
  for (long t = 0; t < horizon; ++t) {
    const MixingMatrix a(seq.graph_at(t));
    y = a.entries().multiply_vector(y);
    for (double v : y) result = std::min(result, v);
  }
  return result;
}

ConnectivityParams theoretical_params(int n, int window, bool regular,
                                      std::optional<double> sigma2_max) {
  if (n < 1) throw std::invalid_argument("node count must be >= 1");
  if (window < 1) throw std::invalid_argument("connectivity window must be >= 1");
  if (sigma2_max && (*sigma2_max < 0.0 || *sigma2_max >= 1.0))
    throw std::invalid_argument("sigma2_max must lie in [0, 1)");

  ConnectivityParams p;
  if (!regular) {
    // delta = n^{-nB}, lambda = (1 - n^{-nB})^{1/(nB)}. Computed through
    // log-space; for large nB both round to the representable endpoints.
    const double exponent = static_cast<double>(n) * window;
    p.delta = std::exp(-exponent * std::log(static_cast<double>(n)));
    if (n == 1) {
      p.lambda = 0.0;  // single node: products are [1], no spread to contract
    } else {
      p.lambda = std::exp(std::log1p(-p.delta) / exponent);
    }
    p.C = 4.0;
    p.provenance = ConnectivityParams::Provenance::TheoreticalGeneral;
    return p;
  }

  p.delta = 1.0;
  const double cubed = 4.0 * std::pow(static_cast<double>(n), 3.0);
  const double structural = std::exp(std::log1p(-1.0 / cubed) / window);
  p.lambda = structural;
  p.C = 2.0 * std::sqrt(2.0);
  if (sigma2_max) {
    const double spectral = std::sqrt(*sigma2_max);
    if (spectral < structural) {
      p.lambda = spectral;
      p.C = 2.0;
    }
  }
  p.provenance = ConnectivityParams::Provenance::TheoreticalRegular;
  return p;
}

double estimate_lambda(const GraphSequence& seq, long start, long horizon) {
  constexpr double kFloor = 1e-13;
  if (horizon - start < 10) throw std::invalid_argument("horizon too short to fit a decay rate");

  Matrix product = MixingMatrix(seq.graph_at(start)).entries().transpose();
  std::vector<double> steps;    // t - start
  std::vector<double> log_err;  // log of column spread
  for (long t = start;; ++t) {
    if (t > start) {
      const Matrix at = MixingMatrix(seq.graph_at(t)).entries().transpose();
      product = at.multiply(product);
    }
    const double spread = product.max_column_spread();
    if (spread > kFloor) {
      steps.push_back(static_cast<double>(t - start));
      log_err.push_back(std::log(spread));
    } else {
      // Row-stochastic multiplication never widens a column's spread, so
      // once below the floor the decay stays there.
      break;
    }
    if (t == horizon) break;
  }

  if (steps.size() < 2) return 0.0;  // consensus at or below the floor from the start

  const double count = static_cast<double>(steps.size());
  double sum_u = 0.0, sum_v = 0.0, sum_uu = 0.0, sum_uv = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    sum_u += steps[k];
    sum_v += log_err[k];
    sum_uu += steps[k] * steps[k];
    sum_uv += steps[k] * log_err[k];
  }
  const double denom = count * sum_uu - sum_u * sum_u;
  if (denom == 0.0) return 0.0;
  const double slope = (count * sum_uv - sum_u * sum_v) / denom;
  return std::exp(slope);
}

double sigma2(const MixingMatrix& a) {
  const int n = a.size();
  if (n == 1) return 0.0;

  const Matrix& m = a.entries();
  const Matrix mt = m.transpose();

  auto project = [n](std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    for (double& x : v) x -= mean;
  };
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  Rng rng(0x5ec08dULL);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = rng.next_double() - 0.5;
  project(x);
  double x_norm = norm(x);
  if (x_norm == 0.0) return 0.0;
  for (double& v : x) v /= x_norm;

  double value = 0.0;
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> u = mt.multiply_vector(m.multiply_vector(x));  // A'A x
    project(u);
    double rayleigh = 0.0;
    for (int i = 0; i < n; ++i) rayleigh += x[i] * u[i];
    const double u_norm = norm(u);
    if (u_norm < 1e-250) return 0.0;
    for (double& v : u) v /= u_norm;
    x = std::move(u);
    if (std::abs(rayleigh - value) <= 1e-14 * std::max(1.0, std::abs(rayleigh))) {
      value = rayleigh;
      break;
    }
    value = rayleigh;
  }
  return std::sqrt(std::max(value, 0.0));
}

PhiEstimate estimate_phi(const GraphSequence& seq, long t, double tol) {
  if (t < 0) throw std::invalid_argument("round index must be >= 0");
  Matrix product = MixingMatrix(seq.graph_at(t)).entries();
  long s = t;
  while (s > 0 && product.max_row_spread() > tol) {
    --s;
    product = product.multiply(MixingMatrix(seq.graph_at(s)).entries());
  }

  PhiEstimate est;
  est.residual_spread = product.max_row_spread();
  est.oldest_round = s;
  const int n = product.rows();
  est.phi.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double mean = 0.0;
    for (int j = 0; j < n; ++j) mean += product.at(i, j);
    est.phi[static_cast<std::size_t>(i)] = mean / n;
  }
  return est;
}

}  // namespace sgp
