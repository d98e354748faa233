#ifndef SGP_OBJECTIVES_HPP
#define SGP_OBJECTIVES_HPP

#include <optional>
#include <span>
#include <vector>

namespace sgp {

enum class ObjectiveFamily { AbsDeviation, L1Distance, Huber, LinearClipped, Zero };

// Optimal set of F as a coordinate-aligned box, with a representative point
// and the optimal value.
struct Optimum {
  std::vector<double> representative;
  double value = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;

  // Euclidean distance from z to the box.
  double distance(std::span<const double> z) const;
};

// Local convex functions f_1..f_n on R^d with uniformly bounded subgradient
// oracles. All chosen families have globally bounded subgradients, so the
// boundedness hypothesis of the convergence results holds exactly.
class ObjectiveSpec {
public:
  // f_i(z) = |z - a_i|, d = 1, L_i = 1.
  static ObjectiveSpec abs_deviation(std::vector<double> anchors);
  // f_i(z) = ||z - a_i||_1, L_i = sqrt(d).
  static ObjectiveSpec l1_distance(std::vector<std::vector<double>> anchors);
  // Coordinate-wise Huber loss around a_i with threshold kappa, L_i = kappa*sqrt(d).
  static ObjectiveSpec huber(std::vector<std::vector<double>> anchors, double kappa);
  // f_i(z) = max(g_i'(z - a_i), 0), L_i = ||g_i||_2.
  static ObjectiveSpec linear_clipped(std::vector<std::vector<double>> anchors,
                                      std::vector<std::vector<double>> slopes);
  // f_i == 0; reduces the optimizer to the unperturbed averaging protocol.
  static ObjectiveSpec zero(int n, int d);

  int node_count() const { return n_; }
  int dimension() const { return d_; }
  ObjectiveFamily family() const { return family_; }
  const std::vector<std::vector<double>>& anchors() const { return anchors_; }

  double local_value(int i, std::span<const double> z) const;
  // Writes a subgradient of f_i at z into `out` (length d). Ties at kinks
  // break to the zero coordinate, which is always in the subdifferential
  // there and minimizes the oracle norm.
  void subgradient(int i, std::span<const double> z, std::span<double> out) const;

  double subgradient_bound(int i) const { return bounds_[i]; }  // L_i
  double sum_bounds() const;                                    // sum_i L_i
  double sum_squared_bounds() const;                            // sum_i L_i^2

  // F(z) = sum_i f_i(z).
  double evaluate_total(std::span<const double> z) const;

  // Closed-form optimum where one exists (abs-deviation and l1-distance:
  // coordinate-wise median box). nullopt signals "no analytic optimum";
  // callers fall back to grid_search_optimum.
  std::optional<Optimum> optimum() const;

private:
  ObjectiveSpec() = default;
  void check_point(std::span<const double> z) const;

  ObjectiveFamily family_ = ObjectiveFamily::Zero;
  int n_ = 0;
  int d_ = 1;
  std::vector<std::vector<double>> anchors_;
  std::vector<std::vector<double>> slopes_;
  double kappa_ = 1.0;
  std::vector<double> bounds_;
};

// Independent optimum oracle: uniform grid over the anchors' bounding box,
// refined once around the best cell. Supports d <= 2.
Optimum grid_search_optimum(const ObjectiveSpec& spec, int points_per_dim = 100);

}  // namespace sgp

#endif
