#ifndef SGP_CONFIG_HPP
#define SGP_CONFIG_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sgp/graph.hpp"
#include "sgp/objectives.hpp"
#include "sgp/perturbation.hpp"
#include "sgp/schedule.hpp"

namespace sgp {

// Invalid or unparsable run configuration; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class X0Kind { Inline, Zero, Uniform };
enum class PerturbationKind { Zero, DecayingDeterministic, CustomSequence };

// A fully validated run description. Identical configs produce identical
// traces byte-for-byte; every random choice is derived from `seed`.
struct RunConfig {
  std::uint64_t seed = 0;
  int n = 1;
  int d = 1;
  long rounds = 1;  // horizon T

  // graph sequence
  GraphModel model = GraphModel::RandomBConnected;
  int window = 1;  // claimed B
  double extra_edge_prob = 0.1;
  // per-round edge lists (0-based), one entry for static, the cycle for
  // cyclic-schedule
  std::vector<std::vector<std::pair<int, int>>> edge_rounds;
  std::vector<int> degrees;  // regular-family hop counts

  // objective (optimize runs)
  bool has_objective = false;
  ObjectiveFamily family = ObjectiveFamily::AbsDeviation;
  std::vector<std::vector<double>> anchors;  // empty: generated from seed
  std::array<double, 2> anchor_range{0.0, 10.0};
  double kappa = 1.0;
  std::vector<std::vector<double>> slopes;

  // stepsize schedule
  ScheduleKind schedule_kind = ScheduleKind::InvSqrt;
  double schedule_power = 0.5;
  double schedule_scale = 1.0;
  long schedule_offset = 0;

  // initial values
  X0Kind x0_kind = X0Kind::Zero;
  std::vector<std::vector<double>> x0_values;  // n rows of d entries
  std::array<double, 2> x0_range{-1.0, 1.0};

  // perturbation (pushsum runs)
  PerturbationKind perturbation_kind = PerturbationKind::Zero;
  double perturbation_scale = 0.1;
  std::vector<std::vector<double>> perturbation_values;  // n*d per round

  std::vector<std::string> monitors;
  bool monitors_specified = false;

  double consensus_tol = 1e-2;
  double opt_tol = 5e-2;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

GraphSequence make_graph_sequence(const RunConfig& cfg);
ObjectiveSpec make_objective(const RunConfig& cfg);
StepSchedule make_schedule(const RunConfig& cfg);
std::vector<double> make_initial_values(const RunConfig& cfg);
std::unique_ptr<PerturbationSource> make_perturbation(const RunConfig& cfg);

}  // namespace sgp

#endif
