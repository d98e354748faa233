#ifndef SGP_PERTURBATION_HPP
#define SGP_PERTURBATION_HPP

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "sgp/objectives.hpp"
#include "sgp/schedule.hpp"

namespace sgp {

// Additive disturbance applied to the value variable after each mixing step.
// Implementations must be pure functions of (t, node, current ratio z) so
// replays under the same configuration are identical.
class PerturbationSource {
public:
  virtual ~PerturbationSource() = default;
  // Writes eps_i(t) into out (length d); z is node i's ratio z_i(t).
  virtual void eval(long t, int node, std::span<const double> z, std::span<double> out) const = 0;
};

class ZeroPerturbation final : public PerturbationSource {
public:
  void eval(long, int, std::span<const double>, std::span<double> out) const override {
    for (double& v : out) v = 0.0;
  }
};

// eps_i(t) = scale / sqrt(t) on every node and coordinate.
class DecayingPerturbation final : public PerturbationSource {
public:
  explicit DecayingPerturbation(double scale) : scale_(scale) {}

  void eval(long t, int, std::span<const double>, std::span<double> out) const override {
    const double v = scale_ / std::sqrt(static_cast<double>(t));
    for (double& o : out) o = v;
  }

  double scale() const { return scale_; }

private:
  double scale_;
};

// Explicit per-round values; values[t-1] holds the stacked n*d vector applied
// at round t, zero beyond the end of the list.
class CustomSequencePerturbation final : public PerturbationSource {
public:
  CustomSequencePerturbation(int n, int d, std::vector<std::vector<double>> values)
      : n_(n), d_(d), values_(std::move(values)) {}

  void eval(long t, int node, std::span<const double>, std::span<double> out) const override {
    if (t < 1 || static_cast<std::size_t>(t) > values_.size()) {
      for (double& v : out) v = 0.0;
      return;
    }
    const auto& round = values_[static_cast<std::size_t>(t - 1)];
    for (int l = 0; l < d_; ++l) out[l] = round[static_cast<std::size_t>(node) * d_ + l];
  }

private:
  int n_;
  int d_;
  std::vector<std::vector<double>> values_;
};

// eps_i(t) = -alpha(t) * g_i(z_i(t)): the optimizer's descent step expressed
// as a perturbation of the averaging protocol.
class SubgradientPerturbation final : public PerturbationSource {
public:
  SubgradientPerturbation(ObjectiveSpec spec, StepSchedule schedule)
      : spec_(std::move(spec)), schedule_(schedule) {}

  void eval(long t, int node, std::span<const double> z, std::span<double> out) const override {
    spec_.subgradient(node, z, out);
    const double step = schedule_.alpha(t);
    // v == 0 maps to +0.0, not -0.0, so a zero objective leaves the exact
    // byte-level trace of the unperturbed protocol.
    for (double& v : out) v = v == 0.0 ? 0.0 : -step * v;
  }

  const ObjectiveSpec& objective() const { return spec_; }
  const StepSchedule& schedule() const { return schedule_; }

private:
  ObjectiveSpec spec_;
  StepSchedule schedule_;
};

}  // namespace sgp

#endif
