#include "sgp/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "sgp/rng.hpp"

namespace sgp {
namespace {

using nlohmann::json;

constexpr std::uint64_t kMonitorPointStream = 0x6d6f6e70;

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

ConnectivityParams params_for_sequence(const GraphSequence& seq) {
  const int n = seq.node_count();
  bool regular = seq.regular_by_construction();
  std::optional<double> sigma2_max;

  const std::size_t period = seq.period_length();
  if (period > 0) {
    // Periodic sequences: inspect one period for regularity and, when
    // regular, for the worst spectral contraction.
    bool all_regular = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < period; ++k) {
      const Digraph g = seq.graph_at(static_cast<long>(k));
      if (!g.regular()) {
        all_regular = false;
        break;
      }
      worst = std::max(worst, sigma2(MixingMatrix(g)));
    }
    if (all_regular) {
      regular = true;
      if (worst < 1.0) sigma2_max = worst;
    }
  }
  return theoretical_params(n, seq.claimed_window(), regular, sigma2_max);
}

void write_pushsum_csv(std::ostream& out, const PushSumTrace& trace,
                       const ConnectivityParams& params) {
  out << "t,node,coord,x,y,z,eps,xbar,track_err,lemma1_bound\n";
  const std::vector<double> bounds = lemma1_bound_series(trace, params);
  for (long r = 1; r <= trace.rounds; ++r) {
    const auto& x = trace.x[static_cast<std::size_t>(r - 1)];
    const auto& y = trace.y[static_cast<std::size_t>(r - 1)];
    const auto& z = trace.z[static_cast<std::size_t>(r - 1)];
    const auto& eps = trace.eps[static_cast<std::size_t>(r - 1)];
    const auto& xbar = trace.xbar[static_cast<std::size_t>(r)];
    const std::string bound = format_double(bounds[static_cast<std::size_t>(r - 1)]);
    for (int i = 0; i < trace.n; ++i) {
      for (int l = 0; l < trace.d; ++l) {
        const std::size_t k = static_cast<std::size_t>(i) * trace.d + l;
        out << r << ',' << (i + 1) << ',' << (l + 1) << ',' << format_double(x[k]) << ','
            << format_double(y[static_cast<std::size_t>(i)]) << ',' << format_double(z[k]) << ','
            << format_double(eps[k]) << ',' << format_double(xbar[static_cast<std::size_t>(l)])
            << ',' << format_double(trace.tracking_error_coord(r, i, l)) << ',' << bound << '\n';
      }
    }
  }
}

// The analytic optimum when one exists, the origin, and three seeded points
// near the anchors' range.
std::vector<std::vector<double>> monitor_points(const ObjectiveSpec& spec,
                                                const std::optional<Optimum>& opt,
                                                std::uint64_t seed) {
  std::vector<std::vector<double>> points;
  if (opt) points.push_back(opt->representative);
  points.emplace_back(static_cast<std::size_t>(spec.dimension()), 0.0);
  Rng rng(mix_seed(seed, kMonitorPointStream, 0));
  double lo = -1.0, hi = 1.0;
  for (const auto& a : spec.anchors())
    for (double v : a) {
      lo = std::min(lo, v - 1.0);
      hi = std::max(hi, v + 1.0);
    }
  for (int k = 0; k < 3; ++k) {
    std::vector<double> p(static_cast<std::size_t>(spec.dimension()));
    for (double& v : p) v = rng.uniform(lo, hi);
    points.push_back(std::move(p));
  }
  return points;
}

void write_sgp_csv(std::ostream& out, const SgpTrace& trace, const ObjectiveSpec& spec,
                   const ConnectivityParams& params, const std::optional<Optimum>& opt,
                   const StepSchedule& sched,
                   const std::vector<std::vector<double>>& probe_points) {
  out << "t,node,coord,x,y,z,ztilde,xbar,F_xbar,F_ztilde,consensus_radius,dist_to_opt,"
         "th2_bound,lemma8_residual_min\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool rate_bound = opt.has_value() && sched.is_plain_inv_sqrt();

  for (long r = 1; r <= trace.rounds; ++r) {
    const auto& x = trace.x[static_cast<std::size_t>(r - 1)];
    const auto& y = trace.y[static_cast<std::size_t>(r - 1)];
    const auto& z = trace.z[static_cast<std::size_t>(r - 1)];
    const auto& zt = trace.ztilde[static_cast<std::size_t>(r - 1)];
    const auto& xbar = trace.xbar[static_cast<std::size_t>(r)];

    const double f_xbar = spec.evaluate_total(xbar);
    const double radius = trace.consensus_radius(r);
    const double th2 =
        rate_bound ? theorem2_bound(spec, params, trace.x0, opt->representative, r, sched) : nan;
    double residual_min = std::numeric_limits<double>::infinity();
    for (const auto& v : probe_points)
      residual_min = std::min(residual_min, lemma_key_residual(trace, spec, v, r - 1));

    const std::string radius_s = format_double(radius);
    const std::string f_xbar_s = format_double(f_xbar);
    const std::string th2_s = format_double(th2);
    const std::string residual_s = format_double(residual_min);

    for (int i = 0; i < trace.n; ++i) {
      std::span<const double> z_i(z.data() + static_cast<std::size_t>(i) * trace.d,
                                  static_cast<std::size_t>(trace.d));
      std::span<const double> zt_i(zt.data() + static_cast<std::size_t>(i) * trace.d,
                                   static_cast<std::size_t>(trace.d));
      const double f_ztilde = spec.evaluate_total(zt_i);
      const double dist = opt ? opt->distance(z_i) : nan;
      const std::string f_ztilde_s = format_double(f_ztilde);
      const std::string dist_s = format_double(dist);
      for (int l = 0; l < trace.d; ++l) {
        const std::size_t k = static_cast<std::size_t>(i) * trace.d + l;
        out << r << ',' << (i + 1) << ',' << (l + 1) << ',' << format_double(x[k]) << ','
            << format_double(y[static_cast<std::size_t>(i)]) << ',' << format_double(z[k]) << ','
            << format_double(zt[k]) << ',' << format_double(xbar[static_cast<std::size_t>(l)])
            << ',' << f_xbar_s << ',' << f_ztilde_s << ',' << radius_s << ',' << dist_s << ','
            << th2_s << ',' << residual_s << '\n';
      }
    }
  }
}

namespace {

class MonitorSet {
public:
  explicit MonitorSet(std::vector<std::string> enabled) : enabled_(std::move(enabled)) {}

  bool wants(const std::string& name) const {
    return std::find(enabled_.begin(), enabled_.end(), name) != enabled_.end();
  }

  MonitorReport& report(const std::string& name) {
    for (auto& r : reports_)
      if (r.name == name) return r;
    reports_.push_back({name, 0, 0.0, ""});
    return reports_.back();
  }

  // Records a check of `observed <= limit`; margin is limit - observed.
  void check_upper(const std::string& name, double observed, double limit) {
    auto& r = report(name);
    const double margin = limit - observed;
    if (margin < 0.0) {
      ++r.violations;
      r.worst_margin = std::min(r.worst_margin, margin);
    }
  }

  void note(const std::string& name, const std::string& text) { report(name).note = text; }

  long total_violations() const {
    long total = 0;
    for (const auto& r : reports_) total += r.violations;
    return total;
  }

  std::vector<MonitorReport> take() { return std::move(reports_); }

private:
  std::vector<std::string> enabled_;
  std::vector<MonitorReport> reports_;
};

std::vector<std::string> default_monitors(RunMode mode, const RunConfig& cfg) {
  if (cfg.monitors_specified) return cfg.monitors;
  if (mode == RunMode::PushSum) {
    std::vector<std::string> names{"mass", "ysum", "lemma1"};
    if (cfg.perturbation_kind == PerturbationKind::DecayingDeterministic)
      names.push_back("corollary2");
    return names;
  }
  if (mode == RunMode::Optimize)
    return {"mass", "ysum", "avdone", "lemma8", "theorem2", "lemma9", "consensus", "optimality"};
  return {};
}

// eq:xsum — the column sums of every mixing matrix are 1, so the total mass
// of x moves only through the accumulated perturbations.
template <typename Trace>
void check_mass(MonitorSet& monitors, const Trace& trace) {
  if (!monitors.wants("mass")) return;
  const int n = trace.n;
  const int d = trace.d;
  std::vector<double> expected(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < d; ++l) expected[l] += trace.x0[static_cast<std::size_t>(i) * d + l];
  for (long r = 1; r <= trace.rounds; ++r) {
    const auto& eps = trace.eps[static_cast<std::size_t>(r - 1)];
    const auto& x = trace.x[static_cast<std::size_t>(r - 1)];
    for (int l = 0; l < d; ++l) {
      for (int i = 0; i < n; ++i) expected[l] += eps[static_cast<std::size_t>(i) * d + l];
      double actual = 0.0;
      for (int i = 0; i < n; ++i) actual += x[static_cast<std::size_t>(i) * d + l];
      const double tol = 1e-9 * std::max(1.0, std::abs(expected[l]));
      monitors.check_upper("mass", std::abs(actual - expected[l]), tol);
    }
  }
}

template <typename Trace>
void check_ysum(MonitorSet& monitors, const Trace& trace) {
  if (!monitors.wants("ysum")) return;
  for (const auto& y : trace.y) {
    double sum = 0.0;
    for (double v : y) sum += v;
    monitors.check_upper("ysum", std::abs(sum - trace.n), 1e-10);
  }
}

void check_lemma1(MonitorSet& monitors, const PushSumTrace& trace, const ConnectivityParams& params) {
  if (!monitors.wants("lemma1")) return;
  const std::vector<double> bounds = lemma1_bound_series(trace, params);
  for (long r = 1; r <= trace.rounds; ++r)
    for (int i = 0; i < trace.n; ++i)
      monitors.check_upper("lemma1", trace.tracking_error(r, i),
                           bounds[static_cast<std::size_t>(r - 1)]);
}

void check_corollary2(MonitorSet& monitors, const PushSumTrace& trace,
                      const ConnectivityParams& params, double node_scale) {
  if (!monitors.wants("corollary2")) return;
  // ||eps_i(s)||_1 = d * scale / sqrt(s) for the decaying source.
  const double D = node_scale * trace.d;
  std::vector<double> weighted(static_cast<std::size_t>(trace.n), 0.0);
  double weight_sum = 0.0;
  for (long k = 0; k + 1 <= trace.rounds; ++k) {
    const double alpha = 1.0 / std::sqrt(static_cast<double>(k + 1));
    weight_sum += alpha;
    for (int i = 0; i < trace.n; ++i)
      weighted[static_cast<std::size_t>(i)] += alpha * trace.tracking_error(k + 1, i);
    const long t = k;
    if (t < 1) continue;
    const double bound = corollary2_bound(trace, params, D, t);
    for (int i = 0; i < trace.n; ++i)
      monitors.check_upper("corollary2", weighted[static_cast<std::size_t>(i)] / weight_sum, bound);
  }
}

void check_avdone(MonitorSet& monitors, const SgpTrace& trace, const ObjectiveSpec& spec) {
  if (!monitors.wants("avdone")) return;
  const int n = trace.n;
  const int d = trace.d;
  std::vector<double> g(static_cast<std::size_t>(d));
  std::vector<double> g_sum(static_cast<std::size_t>(d));
  for (long r = 1; r <= trace.rounds; ++r) {
    const auto& z = trace.z[static_cast<std::size_t>(r - 1)];
    const auto& prev = trace.xbar[static_cast<std::size_t>(r - 1)];
    const auto& next = trace.xbar[static_cast<std::size_t>(r)];
    const double alpha = trace.alpha[static_cast<std::size_t>(r - 1)];
    std::fill(g_sum.begin(), g_sum.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      spec.subgradient(i, std::span<const double>(z.data() + static_cast<std::size_t>(i) * d,
                                                  static_cast<std::size_t>(d)),
                       g);
      for (int l = 0; l < d; ++l) g_sum[l] += g[l];
    }
    for (int l = 0; l < d; ++l) {
      const double predicted = prev[static_cast<std::size_t>(l)] - (alpha / n) * g_sum[l];
      monitors.check_upper("avdone", std::abs(next[static_cast<std::size_t>(l)] - predicted), 1e-10);
    }
  }
}

void check_lemma8(MonitorSet& monitors, const SgpTrace& trace, const ObjectiveSpec& spec,
                  const std::vector<std::vector<double>>& points) {
  if (!monitors.wants("lemma8")) return;
  for (long t = 0; t + 1 <= trace.rounds; ++t)
    for (const auto& v : points)
      monitors.check_upper("lemma8", -lemma_key_residual(trace, spec, v, t), 1e-9);
}

void check_theorem2(MonitorSet& monitors, const SgpTrace& trace, const ObjectiveSpec& spec,
                    const ConnectivityParams& params, const std::optional<Optimum>& opt,
                    const StepSchedule& sched) {
  if (!monitors.wants("theorem2")) return;
  if (!opt) {
    monitors.note("theorem2", "skipped: no analytic optimum");
    return;
  }
  if (!sched.is_plain_inv_sqrt()) {
    monitors.note("theorem2", "skipped: schedule is not 1/sqrt(t)");
    return;
  }
  for (long r = 1; r <= trace.rounds; ++r) {
    const double bound = theorem2_bound(spec, params, trace.x0, opt->representative, r, sched);
    const auto& zt = trace.ztilde[static_cast<std::size_t>(r - 1)];
    for (int i = 0; i < trace.n; ++i) {
      std::span<const double> zt_i(zt.data() + static_cast<std::size_t>(i) * trace.d,
                                   static_cast<std::size_t>(trace.d));
      monitors.check_upper("theorem2", spec.evaluate_total(zt_i) - opt->value, bound);
    }
  }
}

void check_lemma9(MonitorSet& monitors, const SgpTrace& trace, const ObjectiveSpec& spec,
                  const ConnectivityParams& params, const std::optional<Optimum>& opt,
                  const StepSchedule& sched) {
  if (!monitors.wants("lemma9")) return;
  if (!opt) {
    monitors.note("lemma9", "skipped: no analytic optimum");
    return;
  }
  if (!sched.is_plain_inv_sqrt()) {
    monitors.note("lemma9", "skipped: schedule is not 1/sqrt(t)");
    return;
  }
  const int d = trace.d;
  std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
  double weight_sum = 0.0;
  std::vector<double> avg(static_cast<std::size_t>(d));
  for (long t = 0; t + 1 <= trace.rounds; ++t) {
    const double alpha = trace.alpha[static_cast<std::size_t>(t)];  // alpha(t+1)
    const auto& xb = trace.xbar[static_cast<std::size_t>(t)];
    for (int l = 0; l < d; ++l) acc[l] += alpha * xb[static_cast<std::size_t>(l)];
    weight_sum += alpha;
    if (t < 1) continue;
    for (int l = 0; l < d; ++l) avg[l] = acc[l] / weight_sum;
    const double bound = lemma9_bound(spec, params, trace.x0, opt->representative, t, sched);
    monitors.check_upper("lemma9", spec.evaluate_total(avg) - opt->value, bound);
  }
}

void check_consensus(MonitorSet& monitors, const SgpTrace& trace, double tol) {
  if (!monitors.wants("consensus")) return;
  const long decile = std::max<long>(1, trace.rounds / 10);
  double first = 0.0, last = 0.0;
  for (long r = 1; r <= decile; ++r) first += trace.consensus_radius(r);
  for (long r = trace.rounds - decile + 1; r <= trace.rounds; ++r) last += trace.consensus_radius(r);
  first /= decile;
  last /= decile;
  if (trace.rounds >= 20) monitors.check_upper("consensus", last, first);
  monitors.check_upper("consensus", trace.consensus_radius(trace.rounds), tol);
}

void check_optimality(MonitorSet& monitors, const SgpTrace& trace,
                      const std::optional<Optimum>& opt, double tol) {
  if (!monitors.wants("optimality")) return;
  if (!opt) {
    monitors.note("optimality", "skipped: no analytic optimum");
    return;
  }
  const auto& z = trace.z[static_cast<std::size_t>(trace.rounds - 1)];
  double worst = 0.0;
  for (int i = 0; i < trace.n; ++i) {
    std::span<const double> z_i(z.data() + static_cast<std::size_t>(i) * trace.d,
                                static_cast<std::size_t>(trace.d));
    worst = std::max(worst, opt->distance(z_i));
  }
  monitors.check_upper("optimality", worst, tol);
}

json monitor_json(const std::vector<MonitorReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    json entry{{"name", r.name}, {"violations", r.violations}, {"worst_margin", r.worst_margin}};
    if (!r.note.empty()) entry["note"] = r.note;
    arr.push_back(entry);
  }
  return arr;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

RunOutcome finish(const RunConfig& cfg, MonitorSet& monitors, json summary,
                  const std::optional<std::string>& out_dir, const std::string& trace_csv,
                  double runtime_seconds) {
  RunOutcome outcome;
  outcome.monitors = monitors.take();
  const long violations = [&outcome] {
    long total = 0;
    for (const auto& r : outcome.monitors) total += r.violations;
    return total;
  }();

  summary["seed"] = cfg.seed;
  summary["n"] = cfg.n;
  summary["d"] = cfg.d;
  summary["T"] = cfg.rounds;
  summary["monitors"] = monitor_json(outcome.monitors);
  summary["violation_total"] = violations;
  summary["runtime_seconds"] = runtime_seconds;

  outcome.exit_code = violations > 0 ? 1 : 0;
  outcome.summary_json = summary.dump(2);

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    if (!trace_csv.empty())
      write_text_file((std::filesystem::path(*out_dir) / "trace.csv").string(), trace_csv);
    write_text_file((std::filesystem::path(*out_dir) / "summary.json").string(),
                    outcome.summary_json + "\n");
  }
  return outcome;
}

}  // namespace

RunOutcome run_experiment(const RunConfig& cfg, RunMode mode,
                          const std::optional<std::string>& out_dir) {
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&started] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  const GraphSequence seq = make_graph_sequence(cfg);
  MonitorSet monitors(default_monitors(mode, cfg));

  if (mode == RunMode::GraphCheck) {
    const long k_max = std::max<long>(1, cfg.rounds / cfg.window);
    const ConnectivityCheck check = verify_b_connected(seq, cfg.window, k_max);
    std::vector<std::string> lines;
    for (long k = 0; k < k_max; ++k)
      lines.push_back("window=" + std::to_string(k) + " connected=" +
                      (check.window_ok[static_cast<std::size_t>(k)] ? "true" : "false"));
    json summary{{"mode", "graphcheck"},
                 {"B", cfg.window},
                 {"windows_checked", k_max},
                 {"all_connected", check.all_connected}};
    if (check.first_failing_window) summary["first_failing_window"] = *check.first_failing_window;
    RunOutcome outcome = finish(cfg, monitors, std::move(summary), out_dir, "", elapsed());
    outcome.exit_code = check.all_connected ? 0 : 1;
    outcome.stdout_lines = std::move(lines);
    return outcome;
  }

  if (mode == RunMode::Bounds) {
    const ConnectivityParams theory = params_for_sequence(seq);
    const double measured = measure_delta(seq, cfg.rounds);
    const long fit_horizon = std::max<long>(10, cfg.rounds);
    const double fitted = estimate_lambda(seq, 0, fit_horizon);
    json bounds{{"delta_theoretical", theory.delta},
                {"delta_measured", measured},
                {"lambda_theoretical", theory.lambda},
                {"lambda_empirical", fitted},
                {"C", theory.C}};
    json summary = bounds;
    summary["mode"] = "bounds";
    RunOutcome outcome = finish(cfg, monitors, std::move(summary), out_dir, "", elapsed());
    outcome.stdout_lines.push_back(bounds.dump());
    return outcome;
  }

  if (mode == RunMode::PushSum) {
    const std::vector<double> x0 = make_initial_values(cfg);
    const std::unique_ptr<PerturbationSource> source = make_perturbation(cfg);
    const ConnectivityParams params = params_for_sequence(seq);
    const PushSumTrace trace = run_pushsum(seq, x0, cfg.d, *source, cfg.rounds);

    check_mass(monitors, trace);
    check_ysum(monitors, trace);
    check_lemma1(monitors, trace, params);
    if (cfg.perturbation_kind == PerturbationKind::DecayingDeterministic)
      check_corollary2(monitors, trace, params, cfg.perturbation_scale);
    else if (monitors.wants("corollary2"))
      monitors.note("corollary2", "skipped: perturbation is not decaying-deterministic");

    std::ostringstream csv;
    write_pushsum_csv(csv, trace, params);
    json summary{{"mode", "pushsum"},
                 {"delta", params.delta},
                 {"lambda", params.lambda},
                 {"C", params.C},
                 {"final_max_tracking_error", trace.max_tracking_error(trace.rounds)},
                 {"min_weight", trace.min_weight()},
                 {"xbar_final", trace.xbar.back()}};
    return finish(cfg, monitors, std::move(summary), out_dir, csv.str(), elapsed());
  }

  // Optimize
  const std::vector<double> x0 = make_initial_values(cfg);
  const ObjectiveSpec spec = make_objective(cfg);
  const StepSchedule sched = make_schedule(cfg);
  const ConnectivityParams params = params_for_sequence(seq);
  const SgpTrace trace = run_sgp(seq, spec, sched, x0, cfg.rounds);
  const std::optional<Optimum> opt = spec.optimum();
  const auto points = monitor_points(spec, opt, cfg.seed);

  check_mass(monitors, trace);
  check_ysum(monitors, trace);
  check_avdone(monitors, trace, spec);
  check_lemma8(monitors, trace, spec, points);
  check_theorem2(monitors, trace, spec, params, opt, sched);
  check_lemma9(monitors, trace, spec, params, opt, sched);
  check_consensus(monitors, trace, cfg.consensus_tol);
  check_optimality(monitors, trace, opt, cfg.opt_tol);

  std::ostringstream csv;
  write_sgp_csv(csv, trace, spec, params, opt, sched, points);

  const auto& z_final = trace.z[static_cast<std::size_t>(trace.rounds - 1)];
  double worst_dist = std::numeric_limits<double>::quiet_NaN();
  if (opt) {
    worst_dist = 0.0;
    for (int i = 0; i < trace.n; ++i) {
      std::span<const double> z_i(z_final.data() + static_cast<std::size_t>(i) * trace.d,
                                  static_cast<std::size_t>(trace.d));
      worst_dist = std::max(worst_dist, opt->distance(z_i));
    }
  }
  double worst_f_ztilde = 0.0;
  const auto& zt_final = trace.ztilde[static_cast<std::size_t>(trace.rounds - 1)];
  for (int i = 0; i < trace.n; ++i) {
    std::span<const double> zt_i(zt_final.data() + static_cast<std::size_t>(i) * trace.d,
                                 static_cast<std::size_t>(trace.d));
    worst_f_ztilde = std::max(worst_f_ztilde, spec.evaluate_total(zt_i));
  }

  json summary{{"mode", "optimize"},
               {"delta", params.delta},
               {"lambda", params.lambda},
               {"C", params.C},
               {"consensus_radius_final", trace.consensus_radius(trace.rounds)},
               {"F_xbar_final", spec.evaluate_total(trace.xbar.back())},
               {"max_F_ztilde_final", worst_f_ztilde}};
  if (opt) {
    summary["F_star"] = opt->value;
    summary["z_star"] = opt->representative;
    summary["max_dist_to_opt_final"] = worst_dist;
  }
  return finish(cfg, monitors, std::move(summary), out_dir, csv.str(), elapsed());
}

}  // namespace sgp
