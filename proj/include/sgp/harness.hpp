#ifndef SGP_HARNESS_HPP
#define SGP_HARNESS_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sgp/config.hpp"
#include "sgp/mixing.hpp"
#include "sgp/optimizer.hpp"
#include "sgp/pushsum.hpp"

namespace sgp {

// Shortest round-trip decimal form of a double (nan/inf spelled out), used
// for every real written to CSV or JSON summaries.
std::string format_double(double value);

enum class RunMode { GraphCheck, PushSum, Optimize, Bounds };

struct MonitorReport {
  std::string name;
  long violations = 0;
  double worst_margin = 0.0;  // most negative slack seen (0 when clean)
  std::string note;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 at least one monitor violation
  std::string summary_json;
  std::vector<MonitorReport> monitors;
  std::vector<std::string> stdout_lines;  // graphcheck verdicts, bounds JSON
};

// Executes one experiment: runs the pipeline for `mode`, applies the
// configured monitors, and (when out_dir is set) writes trace.csv and
// summary.json there. Monitor violations are reported, never fatal.
RunOutcome run_experiment(const RunConfig& cfg, RunMode mode,
                          const std::optional<std::string>& out_dir);

// Connectivity parameters used by the bound monitors for this sequence:
// regular families get the regular branch with sigma2 measured over one
// period, everything else the general worst case for the claimed window.
ConnectivityParams params_for_sequence(const GraphSequence& seq);

// The v-points the per-step inequality is checked against: the analytic
// optimum when one exists, the origin, and three points seeded near the
// anchor range.
std::vector<std::vector<double>> monitor_points(const ObjectiveSpec& spec,
                                                const std::optional<Optimum>& opt,
                                                std::uint64_t seed);

// trace.csv writers; one row per (round, node, coordinate).
void write_pushsum_csv(std::ostream& out, const PushSumTrace& trace,
                       const ConnectivityParams& params);
void write_sgp_csv(std::ostream& out, const SgpTrace& trace, const ObjectiveSpec& spec,
                   const ConnectivityParams& params, const std::optional<Optimum>& opt,
                   const StepSchedule& sched,
                   const std::vector<std::vector<double>>& probe_points);

}  // namespace sgp

#endif
