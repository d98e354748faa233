#ifndef SGP_SCHEDULE_HPP
#define SGP_SCHEDULE_HPP

#include <cmath>
#include <stdexcept>

namespace sgp {

enum class ScheduleKind { InvSqrt, InvTPower, CustomSummableSquare };

// Positive non-increasing stepsizes alpha(t) for t >= 1 with divergent sum
// and summable squares. All kinds are of the form scale / (t + offset)^p
// with p in (1/2, 1], which certifies both series conditions analytically.
class StepSchedule {
public:
  static StepSchedule inv_sqrt(long offset = 0) {
    return StepSchedule(ScheduleKind::InvSqrt, 1.0, 0.5, offset);
  }
  static StepSchedule inv_t_power(double power, long offset = 0) {
    return StepSchedule(ScheduleKind::InvTPower, 1.0, power, offset);
  }
  static StepSchedule custom_summable_square(double scale, double power, long offset = 0) {
    return StepSchedule(ScheduleKind::CustomSummableSquare, scale, power, offset);
  }

  double alpha(long t) const {
    if (t < 1) throw std::invalid_argument("stepsize index must be >= 1");
    // sqrt is correctly rounded where pow is not; the trace determinism
    // contract leans on it for the 1/sqrt(t) schedule.
    if (power_ == 0.5) return scale_ / std::sqrt(static_cast<double>(t + offset_));
    return scale_ / std::pow(static_cast<double>(t + offset_), power_);
  }

  ScheduleKind kind() const { return kind_; }
  double power() const { return power_; }
  double scale() const { return scale_; }
  long offset() const { return offset_; }

  // The rate bounds are stated for alpha(t) = 1/sqrt(t) exactly.
  bool is_plain_inv_sqrt() const {
    return kind_ == ScheduleKind::InvSqrt && offset_ == 0 && scale_ == 1.0;
  }

private:
  StepSchedule(ScheduleKind kind, double scale, double power, long offset)
      : kind_(kind), scale_(scale), power_(power), offset_(offset) {
    // inv-sqrt is the rate schedule with p = 1/2 exactly; the other kinds
    // need p > 1/2 for the squared stepsizes to sum.
    const double min_power = kind == ScheduleKind::InvSqrt ? 0.5 : 0.5 + 1e-12;
    if (!(power >= min_power) || !(power <= 1.0))
      throw std::invalid_argument("stepsize exponent must lie in (1/2, 1]");
    if (!(scale > 0.0)) throw std::invalid_argument("stepsize scale must be positive");
    if (offset < 0) throw std::invalid_argument("stepsize offset must be >= 0");
  }

  ScheduleKind kind_;
  double scale_;
  double power_;
  long offset_;
};

}  // namespace sgp

#endif
