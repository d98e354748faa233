#include "sgp/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sgp/graph.hpp"
#include "sgp/harness.hpp"
#include "sgp/mixing.hpp"
#include "sgp/objectives.hpp"
#include "sgp/optimizer.hpp"
#include "sgp/pushsum.hpp"
#include "sgp/rng.hpp"
#include "sgp/schedule.hpp"

namespace sgp {
namespace {

struct Tally {
  long checks = 0;
  long failures = 0;
  double worst_margin = 0.0;  // most negative slack seen
  std::ostringstream notes;

  // observed must stay <= limit.
  void upper(double observed, double limit, const char* what) {
    ++checks;
    const double margin = limit - observed;
    if (!(margin >= 0.0)) {
      ++failures;
      if (margin < worst_margin || failures == 1) {
        worst_margin = std::min(worst_margin, margin);
        notes << " [" << what << " exceeded by " << format_double(-margin) << "]";
      }
    }
  }

  void require(bool ok, const char* what) {
    ++checks;
    if (!ok) {
      ++failures;
      notes << " [" << what << "]";
    }
  }

  CriterionResult result(int id, std::string name) const {
    CriterionResult r;
    r.id = id;
    r.name = std::move(name);
    r.passed = failures == 0;
    std::ostringstream detail;
    detail << checks << " checks, " << failures << " failures";
    const std::string extra = notes.str();
    if (!extra.empty()) detail << extra;
    r.detail = detail.str();
    return r;
  }
};

std::vector<double> seeded_x0(std::uint64_t seed, int n, int d, double low, double high) {
  Rng rng(mix_seed(seed, 0x783030, 0));
  std::vector<double> x0(static_cast<std::size_t>(n) * d);
  for (double& v : x0) v = rng.uniform(low, high);
  return x0;
}

struct SequenceCase {
  GraphSequence seq;
  std::string label;
};

std::vector<SequenceCase> general_sequences(std::uint64_t seed) {
  // Ten seeded B-connected sequences spanning n in {5, 10, 20}, B in {1, 3}.
  std::vector<SequenceCase> cases;
  const std::pair<int, int> combos[] = {{5, 1}, {5, 3}, {10, 1}, {10, 3}, {20, 1},
                                        {20, 3}, {5, 1}, {10, 3}, {20, 1}, {5, 3}};
  int k = 0;
  for (const auto& [n, b] : combos) {
    std::ostringstream label;
    label << "random n=" << n << " B=" << b << " #" << k;
    cases.push_back({GraphSequence::random_b_connected(n, b, mix_seed(seed, 2, static_cast<std::uint64_t>(k))),
                     label.str()});
    ++k;
  }
  return cases;
}

std::vector<SequenceCase> regular_sequences() {
  std::vector<SequenceCase> cases;
  cases.push_back({GraphSequence::regular_family(5, {2}), "circulant n=5 c=2"});
  cases.push_back({GraphSequence::regular_family(8, {1, 3}), "circulant n=8 c=1,3"});
  cases.push_back({GraphSequence::regular_family(12, {2, 4, 3}), "circulant n=12 c=2,4,3"});
  return cases;
}

CriterionResult criterion1(std::uint64_t seed) {
  Tally tally;

  // 100 graphs drawn across the generator models.
  long built = 0;
  for (int k = 0; k < 40; ++k) {
    const int n = 3 + static_cast<int>(mix_seed(seed, 10, static_cast<std::uint64_t>(k)) % 18);
    const int b = 1 + static_cast<int>(k % 3);
    const GraphSequence seq = GraphSequence::random_b_connected(n, b, mix_seed(seed, 11, static_cast<std::uint64_t>(k)));
    const MixingMatrix a(seq.graph_at(k));
    tally.upper(a.max_column_sum_drift(), 1e-12, "column sum drift");
    ++built;
  }
  for (int k = 0; k < 30; ++k) {
    const int n = 4 + (k % 12);
    const int c = 1 + (k % std::max(1, n - 1));
    const MixingMatrix a(Digraph::circulant(n, std::min(c, n - 1)));
    tally.upper(a.max_column_sum_drift(), 1e-12, "column sum drift");
    ++built;
  }
  for (int k = 0; k < 30; ++k) {
    const int n = 2 + (k % 10);
    const MixingMatrix a(k % 2 == 0 ? Digraph::complete(n) : Digraph::ring(n));
    tally.upper(a.max_column_sum_drift(), 1e-12, "column sum drift");
    ++built;
  }
  tally.require(built == 100, "graph count");

  // Conservation over full runs, with and without perturbations.
  for (int k = 0; k < 3; ++k) {
    const GraphSequence seq = GraphSequence::random_b_connected(6, 2, mix_seed(seed, 12, static_cast<std::uint64_t>(k)));
    const std::vector<double> x0 = seeded_x0(mix_seed(seed, 13, static_cast<std::uint64_t>(k)), 6, 1, -5.0, 5.0);
    const DecayingPerturbation eps(k == 0 ? 0.0 : 0.5);
    const PushSumTrace trace = run_pushsum(seq, x0, 1, eps, 300);

    double expected = 0.0;
    for (double v : trace.x0) expected += v;
    for (long r = 1; r <= trace.rounds; ++r) {
      for (double v : trace.eps[static_cast<std::size_t>(r - 1)]) expected += v;
      double actual = 0.0;
      for (double v : trace.x[static_cast<std::size_t>(r - 1)]) actual += v;
      tally.upper(std::abs(actual - expected), 1e-9 * std::max(1.0, std::abs(expected)), "mass identity");
      double ysum = 0.0;
      for (double v : trace.y[static_cast<std::size_t>(r - 1)]) ysum += v;
      tally.upper(std::abs(ysum - trace.n), 1e-10, "y conservation");
    }
  }

  return tally.result(1, "column stochasticity and conservation");
}

CriterionResult criterion2(std::uint64_t seed) {
  Tally tally;
  const ZeroPerturbation eps;
  for (const auto& [seq, label] : general_sequences(seed)) {
    const int n = seq.node_count();
    const ConnectivityParams params = theoretical_params(n, seq.claimed_window(), false);
    const std::vector<double> x0 = seeded_x0(mix_seed(seed, 20, static_cast<std::uint64_t>(n) * 7 + seq.claimed_window()),
                                             n, 1, -3.0, 3.0);
    const PushSumTrace trace = run_pushsum(seq, x0, 1, eps, 300);
    const double average0 = trace.xbar[0][0];
    for (long r = 1; r <= trace.rounds; ++r) {
      const double bound = lemma1_bound(trace, params, r - 1);
      for (int i = 0; i < n; ++i) {
        const double err = std::abs(trace.z[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i)] - average0);
        tally.upper(err, bound, label.c_str());
      }
    }
  }
  return tally.result(2, "unperturbed tracking stays under the geometric bound");
}

CriterionResult criterion3(std::uint64_t seed) {
  Tally tally;
  for (const auto& [seq, label] : general_sequences(seed)) {
    const int n = seq.node_count();
    const double theoretical = theoretical_params(n, seq.claimed_window(), false).delta;
    const double measured = measure_delta(seq, 200);
    tally.upper(theoretical, measured, label.c_str());  // measured >= theoretical
  }
  for (const auto& [seq, label] : regular_sequences()) {
    const double measured = measure_delta(seq, 200);
    tally.upper(std::abs(measured - 1.0), 1e-9, label.c_str());
  }
  return tally.result(3, "influence imbalance bounds");
}

CriterionResult criterion4(std::uint64_t seed) {
  Tally tally;
  for (const auto& [seq, label] : general_sequences(seed)) {
    const double theoretical = theoretical_params(seq.node_count(), seq.claimed_window(), false).lambda;
    const double fitted = estimate_lambda(seq, 0, 200);
    tally.require(lambda_within_bound(fitted, theoretical), label.c_str());
  }
  for (const auto& [seq, label] : regular_sequences()) {
    double sigma_max = 0.0;
    for (std::size_t k = 0; k < seq.period_length(); ++k)
      sigma_max = std::max(sigma_max, sigma2(MixingMatrix(seq.graph_at(static_cast<long>(k)))));
    const ConnectivityParams params =
        theoretical_params(seq.node_count(), 1, true,
                           sigma_max < 1.0 ? std::optional<double>(sigma_max) : std::nullopt);
    const double fitted = estimate_lambda(seq, 0, 200);
    tally.require(lambda_within_bound(fitted, params.lambda), label.c_str());
    tally.upper(fitted, std::sqrt(sigma_max) + 0.05, label.c_str());
  }
  return tally.result(4, "fitted consensus rate stays under the theoretical rate");
}

CriterionResult criterion5(std::uint64_t seed) {
  Tally tally;
  const long horizon = 10001;  // weighted error up to t needs round t+1
  std::vector<SequenceCase> cases;
  cases.push_back({GraphSequence::random_b_connected(5, 1, mix_seed(seed, 50, 0)), "random n=5 B=1"});
  cases.push_back({GraphSequence::regular_family(5, {2}), "circulant n=5 c=2"});

  for (const auto& [seq, label] : cases) {
    const ConnectivityParams params =
        seq.regular_by_construction()
            ? params_for_sequence(seq)
            : theoretical_params(seq.node_count(), seq.claimed_window(), false);
    const std::vector<double> x0 = seeded_x0(mix_seed(seed, 51, 0), seq.node_count(), 1, -2.0, 2.0);
    for (const double scale : {0.1, 1.0}) {
      const DecayingPerturbation eps(scale);
      const PushSumTrace trace = run_pushsum(seq, x0, 1, eps, horizon);
      for (const long t : {100L, 1000L, 10000L}) {
        const double bound = corollary2_bound(trace, params, scale, t);
        for (int i = 0; i < seq.node_count(); ++i)
          tally.upper(weighted_tracking_error(trace, i, t), bound, label.c_str());
      }
    }
  }
  return tally.result(5, "decaying perturbations obey the weighted-average bound");
}

CriterionResult criterion6(std::uint64_t seed) {
  Tally tally;
  struct Problem {
    ObjectiveSpec spec;
    GraphSequence seq;
    const char* label;
  };
  std::vector<Problem> problems;
  problems.push_back({ObjectiveSpec::abs_deviation({1, 2, 3, 4, 10}),
                      GraphSequence::random_b_connected(5, 2, mix_seed(seed, 60, 0)), "median"});
  problems.push_back({ObjectiveSpec::l1_distance({{0, 0}, {2, 2}, {0, 2}, {3, 1}}),
                      GraphSequence::random_b_connected(4, 2, mix_seed(seed, 60, 1)), "l1-distance"});

  const StepSchedule sched = StepSchedule::inv_sqrt();
  for (auto& [spec, seq, label] : problems) {
    const int n = spec.node_count();
    const int d = spec.dimension();
    const std::vector<double> x0 = seeded_x0(mix_seed(seed, 61, static_cast<std::uint64_t>(d)), n, d, -2.0, 6.0);
    const SgpTrace trace = run_sgp(seq, spec, sched, x0, 2000);

    std::vector<std::vector<double>> points;
    points.push_back(spec.optimum()->representative);
    points.emplace_back(static_cast<std::size_t>(d), 0.0);
    Rng rng(mix_seed(seed, 62, static_cast<std::uint64_t>(d)));
    for (int k = 0; k < 3; ++k) {
      std::vector<double> p(static_cast<std::size_t>(d));
      for (double& v : p) v = rng.uniform(-4.0, 12.0);
      points.push_back(std::move(p));
    }
    for (long t = 0; t + 1 <= trace.rounds; ++t)
      for (const auto& v : points)
        tally.upper(-lemma_key_residual(trace, spec, v, t), 1e-9, label);
  }
  return tally.result(6, "per-step descent inequality holds along full runs");
}

// The rate/consensus criteria run the median problem over a dense, fast
// mixing B=2 sequence; the 1e-2 consensus-radius threshold at T = 20000
// needs per-round spreads of about the final stepsize, which sparser
// sequences do not reach.
struct MedianRun {
  ObjectiveSpec spec = ObjectiveSpec::abs_deviation({1, 2, 3, 4, 10});
  GraphSequence seq;
  StepSchedule sched = StepSchedule::inv_sqrt();
  std::vector<double> x0;
  MedianRun(std::uint64_t seed)
      : seq(GraphSequence::random_b_connected(5, 2, mix_seed(seed, 70, 0), 0.65)),
        x0(5, 0.0) {}
};

CriterionResult criterion7(std::uint64_t seed) {
  Tally tally;
  MedianRun run(seed);
  const ConnectivityParams params = theoretical_params(5, 2, false);
  const SgpTrace trace = run_sgp(run.seq, run.spec, run.sched, run.x0, 10000);
  const std::vector<double> z_star{3.0};
  const double f_star = 11.0;

  for (long t = 1; t <= trace.rounds; ++t) {
    const double bound = theorem2_bound(run.spec, params, trace.x0, z_star, t, run.sched);
    const auto& zt = trace.ztilde[static_cast<std::size_t>(t - 1)];
    for (int i = 0; i < 5; ++i)
      tally.upper(run.spec.evaluate_total(std::span<const double>(&zt[static_cast<std::size_t>(i)], 1)) - f_star,
                  bound, "rate bound");
  }

  const auto& zt_early = trace.ztilde[99];
  const auto& zt_late = trace.ztilde[9999];
  for (int i = 0; i < 5; ++i) {
    const double early =
        run.spec.evaluate_total(std::span<const double>(&zt_early[static_cast<std::size_t>(i)], 1)) - f_star;
    const double late =
        run.spec.evaluate_total(std::span<const double>(&zt_late[static_cast<std::size_t>(i)], 1)) - f_star;
    tally.upper(late, 0.2 * early, "decay factor");
  }
  return tally.result(7, "running-average objective obeys the rate bound and decays");
}

CriterionResult criterion8(std::uint64_t seed) {
  Tally tally;
  MedianRun run(seed);
  const SgpTrace trace = run_sgp(run.seq, run.spec, run.sched, run.x0, 20000);
  const Optimum opt = *run.spec.optimum();

  tally.upper(trace.consensus_radius(trace.rounds), 1e-2, "consensus radius");
  const auto& z = trace.z[static_cast<std::size_t>(trace.rounds - 1)];
  for (int i = 0; i < 5; ++i)
    tally.upper(opt.distance(std::span<const double>(&z[static_cast<std::size_t>(i)], 1)), 5e-2,
                "distance to optimum");
  return tally.result(8, "consensus and optimality at the final round");
}

CriterionResult criterion9(std::uint64_t seed) {
  Tally tally;
  (void)seed;
  // A Lipschitz gradient keeps the comparison well-posed: sign-based
  // subgradients flip on one-ulp differences whenever the trajectory grazes
  // a kink, which no independently ordered oracle can reproduce to 1e-10.
  const ObjectiveSpec spec = ObjectiveSpec::huber({{1}, {2}, {3}, {4}, {10}}, 1.0);
  const GraphSequence seq = GraphSequence::static_graph(Digraph::complete(5));
  const StepSchedule sched = StepSchedule::inv_sqrt();
  const std::vector<double> x0(5, 2.0);  // equal starts
  const SgpTrace trace = run_sgp(seq, spec, sched, x0, 1000);

  // Centralized reference: u <- u - alpha(t) * (1/n) sum_j g_j(u).
  double u = 2.0;
  std::vector<double> g(1);
  for (long t = 1; t <= trace.rounds; ++t) {
    double g_sum = 0.0;
    for (int j = 0; j < 5; ++j) {
      spec.subgradient(j, std::span<const double>(&u, 1), g);
      g_sum += g[0];
    }
    u -= sched.alpha(t) * g_sum / 5.0;
    tally.upper(std::abs(trace.xbar[static_cast<std::size_t>(t)][0] - u), 1e-10, "trajectory mismatch");
  }
  return tally.result(9, "network average matches centralized subgradient descent");
}

CriterionResult criterion10(std::uint64_t seed) {
  Tally tally;
  const GraphSequence seq = GraphSequence::random_b_connected(5, 2, mix_seed(seed, 100, 0));
  const std::vector<double> x0 = seeded_x0(mix_seed(seed, 101, 0), 5, 1, -4.0, 4.0);
  const ConnectivityParams params = theoretical_params(5, 2, false);

  const ZeroPerturbation eps;
  const PushSumTrace plain = run_pushsum(seq, x0, 1, eps, 500);
  const SgpTrace opt = run_sgp(seq, ObjectiveSpec::zero(5, 1), StepSchedule::inv_sqrt(), x0, 500);

  std::ostringstream a, b;
  write_pushsum_csv(a, plain, params);
  write_pushsum_csv(b, opt.as_pushsum_trace(), params);
  tally.require(a.str() == b.str(), "trace bytes differ");
  return tally.result(10, "zero-objective run is byte-identical to the unperturbed protocol");
}

}  // namespace

bool AcceptanceReport::all_passed() const {
  for (const auto& c : criteria)
    if (!c.passed) return false;
  return true;
}

bool lambda_within_bound(double fitted, double theoretical) { return fitted <= theoretical; }

AcceptanceReport run_acceptance_suite(std::uint64_t base_seed) {
  AcceptanceReport report;
  report.criteria.push_back(criterion1(base_seed));
  report.criteria.push_back(criterion2(base_seed));
  report.criteria.push_back(criterion3(base_seed));
  report.criteria.push_back(criterion4(base_seed));
  report.criteria.push_back(criterion5(base_seed));
  report.criteria.push_back(criterion6(base_seed));
  report.criteria.push_back(criterion7(base_seed));
  report.criteria.push_back(criterion8(base_seed));
  report.criteria.push_back(criterion9(base_seed));
  report.criteria.push_back(criterion10(base_seed));
  return report;
}

}  // namespace sgp
