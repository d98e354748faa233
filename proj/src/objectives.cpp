#include "sgp/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgp {
namespace {

double sign_or_zero(double v) {
  if (v > 0.0) return 1.0;
  if (v < 0.0) return -1.0;
  return 0.0;  // kink: zero is in the subdifferential and has minimal norm
}

}  // namespace

double Optimum::distance(std::span<const double> z) const {
  double sq = 0.0;
  for (std::size_t l = 0; l < lower.size(); ++l) {
    const double clamped = std::clamp(z[l], lower[l], upper[l]);
    const double diff = z[l] - clamped;
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

ObjectiveSpec ObjectiveSpec::abs_deviation(std::vector<double> anchors) {
  if (anchors.empty()) throw std::invalid_argument("objective needs at least one anchor");
  ObjectiveSpec spec;
  spec.family_ = ObjectiveFamily::AbsDeviation;
  spec.n_ = static_cast<int>(anchors.size());
  spec.d_ = 1;
  spec.anchors_.reserve(anchors.size());
  for (double a : anchors) spec.anchors_.push_back({a});
  spec.bounds_.assign(anchors.size(), 1.0);
  return spec;
}

namespace {

void validate_anchor_grid(const std::vector<std::vector<double>>& anchors) {
  if (anchors.empty()) throw std::invalid_argument("objective needs at least one anchor");
  const std::size_t d = anchors.front().size();
  if (d == 0) throw std::invalid_argument("anchor dimension must be >= 1");
  for (const auto& a : anchors)
    if (a.size() != d) throw std::invalid_argument("anchors must share a dimension");
}

}  // namespace

ObjectiveSpec ObjectiveSpec::l1_distance(std::vector<std::vector<double>> anchors) {
  validate_anchor_grid(anchors);
  ObjectiveSpec spec;
  spec.family_ = ObjectiveFamily::L1Distance;
  spec.n_ = static_cast<int>(anchors.size());
  spec.d_ = static_cast<int>(anchors.front().size());
  spec.anchors_ = std::move(anchors);
  spec.bounds_.assign(static_cast<std::size_t>(spec.n_), std::sqrt(static_cast<double>(spec.d_)));
  return spec;
}

ObjectiveSpec ObjectiveSpec::huber(std::vector<std::vector<double>> anchors, double kappa) {
  validate_anchor_grid(anchors);
  if (!(kappa > 0.0)) throw std::invalid_argument("huber threshold must be positive");
  ObjectiveSpec spec;
  spec.family_ = ObjectiveFamily::Huber;
  spec.n_ = static_cast<int>(anchors.size());
  spec.d_ = static_cast<int>(anchors.front().size());
  spec.anchors_ = std::move(anchors);
  spec.kappa_ = kappa;
  spec.bounds_.assign(static_cast<std::size_t>(spec.n_),
                      kappa * std::sqrt(static_cast<double>(spec.d_)));
  return spec;
}

ObjectiveSpec ObjectiveSpec::linear_clipped(std::vector<std::vector<double>> anchors,
                                            std::vector<std::vector<double>> slopes) {
  validate_anchor_grid(anchors);
  if (slopes.size() != anchors.size())
    throw std::invalid_argument("linear-clipped needs one slope vector per anchor");
  const std::size_t d = anchors.front().size();
  for (const auto& s : slopes)
    if (s.size() != d) throw std::invalid_argument("slopes must match the anchor dimension");
  ObjectiveSpec spec;
  spec.family_ = ObjectiveFamily::LinearClipped;
  spec.n_ = static_cast<int>(anchors.size());
  spec.d_ = static_cast<int>(d);
  spec.anchors_ = std::move(anchors);
  spec.slopes_ = std::move(slopes);
  spec.bounds_.reserve(spec.slopes_.size());
  for (const auto& s : spec.slopes_) {
    double sq = 0.0;
    for (double v : s) sq += v * v;
    spec.bounds_.push_back(std::sqrt(sq));
  }
  return spec;
}

ObjectiveSpec ObjectiveSpec::zero(int n, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("objective needs n >= 1 and d >= 1");
  ObjectiveSpec spec;
  spec.family_ = ObjectiveFamily::Zero;
  spec.n_ = n;
  spec.d_ = d;
  spec.anchors_.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(d), 0.0));
  spec.bounds_.assign(static_cast<std::size_t>(n), 0.0);
  return spec;
}

void ObjectiveSpec::check_point(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != d_) throw std::invalid_argument("point dimension mismatch");
  for (double v : z)
    if (!std::isfinite(v)) throw std::invalid_argument("objective evaluated at a non-finite point");
}

double ObjectiveSpec::local_value(int i, std::span<const double> z) const {
  if (i < 0 || i >= n_) throw std::out_of_range("node index out of range");
  check_point(z);
  const auto& a = anchors_[static_cast<std::size_t>(i)];
  switch (family_) {
    case ObjectiveFamily::AbsDeviation:
    case ObjectiveFamily::L1Distance: {
      double sum = 0.0;
      for (int l = 0; l < d_; ++l) sum += std::abs(z[l] - a[l]);
      return sum;
    }
    case ObjectiveFamily::Huber: {
      double sum = 0.0;
      for (int l = 0; l < d_; ++l) {
        const double u = std::abs(z[l] - a[l]);
        sum += u <= kappa_ ? 0.5 * u * u : kappa_ * (u - 0.5 * kappa_);
      }
      return sum;
    }
    case ObjectiveFamily::LinearClipped: {
      const auto& s = slopes_[static_cast<std::size_t>(i)];
      double dot = 0.0;
      for (int l = 0; l < d_; ++l) dot += s[l] * (z[l] - a[l]);
      return std::max(dot, 0.0);
    }
    case ObjectiveFamily::Zero:
      return 0.0;
  }
  return 0.0;
}

void ObjectiveSpec::subgradient(int i, std::span<const double> z, std::span<double> out) const {
  if (i < 0 || i >= n_) throw std::out_of_range("node index out of range");
  check_point(z);
  if (static_cast<int>(out.size()) != d_) throw std::invalid_argument("output dimension mismatch");
  const auto& a = anchors_[static_cast<std::size_t>(i)];
  switch (family_) {
    case ObjectiveFamily::AbsDeviation:
    case ObjectiveFamily::L1Distance:
      for (int l = 0; l < d_; ++l) out[l] = sign_or_zero(z[l] - a[l]);
      return;
    case ObjectiveFamily::Huber:
      for (int l = 0; l < d_; ++l) out[l] = std::clamp(z[l] - a[l], -kappa_, kappa_);
      return;
    case ObjectiveFamily::LinearClipped: {
      const auto& s = slopes_[static_cast<std::size_t>(i)];
      double dot = 0.0;
      for (int l = 0; l < d_; ++l) dot += s[l] * (z[l] - a[l]);
      if (dot > 0.0) {
        for (int l = 0; l < d_; ++l) out[l] = s[l];
      } else {
        for (int l = 0; l < d_; ++l) out[l] = 0.0;
      }
      return;
    }
    case ObjectiveFamily::Zero:
      for (int l = 0; l < d_; ++l) out[l] = 0.0;
      return;
  }
}

double ObjectiveSpec::sum_bounds() const {
  double sum = 0.0;
  for (double b : bounds_) sum += b;
  return sum;
}

double ObjectiveSpec::sum_squared_bounds() const {
  double sum = 0.0;
  for (double b : bounds_) sum += b * b;
  return sum;
}

double ObjectiveSpec::evaluate_total(std::span<const double> z) const {
  double sum = 0.0;
  for (int i = 0; i < n_; ++i) sum += local_value(i, z);
  return sum;
}

std::optional<Optimum> ObjectiveSpec::optimum() const {
  if (family_ != ObjectiveFamily::AbsDeviation && family_ != ObjectiveFamily::L1Distance)
    return std::nullopt;

  // Coordinate-wise median; an even anchor count makes the whole interval
  // between the two central values optimal.
  Optimum opt;
  opt.representative.resize(static_cast<std::size_t>(d_));
  opt.lower.resize(static_cast<std::size_t>(d_));
  opt.upper.resize(static_cast<std::size_t>(d_));
  std::vector<double> column(static_cast<std::size_t>(n_));
  for (int l = 0; l < d_; ++l) {
    for (int i = 0; i < n_; ++i) column[static_cast<std::size_t>(i)] = anchors_[static_cast<std::size_t>(i)][l];
    std::sort(column.begin(), column.end());
    if (n_ % 2 == 1) {
      const double median = column[static_cast<std::size_t>(n_ / 2)];
      opt.lower[l] = opt.upper[l] = opt.representative[l] = median;
    } else {
      opt.lower[l] = column[static_cast<std::size_t>(n_ / 2 - 1)];
      opt.upper[l] = column[static_cast<std::size_t>(n_ / 2)];
      opt.representative[l] = 0.5 * (opt.lower[l] + opt.upper[l]);
    }
  }
  opt.value = evaluate_total(opt.representative);
  return opt;
}

Optimum grid_search_optimum(const ObjectiveSpec& spec, int points_per_dim) {
  const int d = spec.dimension();
  if (d > 2) throw std::invalid_argument("grid search supports d <= 2");
  if (points_per_dim < 2) throw std::invalid_argument("grid needs at least 2 points per dimension");

  std::vector<double> lo(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
  std::vector<double> hi(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
  for (const auto& a : spec.anchors()) {
    for (int l = 0; l < d; ++l) {
      lo[l] = std::min(lo[l], a[l]);
      hi[l] = std::max(hi[l], a[l]);
    }
  }
  for (int l = 0; l < d; ++l) {
    if (hi[l] - lo[l] < 1.0) {  // degenerate box: widen so the grid has room
      lo[l] -= 0.5;
      hi[l] += 0.5;
    }
  }

  std::vector<double> best_z(static_cast<std::size_t>(d), 0.0);
  double best_f = std::numeric_limits<double>::infinity();
  auto sweep = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> z(static_cast<std::size_t>(d));
    if (d == 1) {
      for (int i = 0; i < points_per_dim; ++i) {
        z[0] = a[0] + (b[0] - a[0]) * i / (points_per_dim - 1);
        const double f = spec.evaluate_total(z);
        if (f < best_f) {
          best_f = f;
          best_z = z;
        }
      }
      return;
    }
    for (int i = 0; i < points_per_dim; ++i) {
      z[0] = a[0] + (b[0] - a[0]) * i / (points_per_dim - 1);
      for (int j = 0; j < points_per_dim; ++j) {
        z[1] = a[1] + (b[1] - a[1]) * j / (points_per_dim - 1);
        const double f = spec.evaluate_total(z);
        if (f < best_f) {
          best_f = f;
          best_z = z;
        }
      }
    }
  };

  sweep(lo, hi);

  // One refinement pass around the best coarse cell.
  std::vector<double> rlo(static_cast<std::size_t>(d)), rhi(static_cast<std::size_t>(d));
  for (int l = 0; l < d; ++l) {
    const double cell = (hi[l] - lo[l]) / (points_per_dim - 1);
    rlo[l] = std::max(lo[l], best_z[l] - cell);
    rhi[l] = std::min(hi[l], best_z[l] + cell);
  }
  sweep(rlo, rhi);

  Optimum opt;
  opt.representative = best_z;
  opt.value = best_f;
  opt.lower = best_z;
  opt.upper = best_z;
  return opt;
}

}  // namespace sgp
