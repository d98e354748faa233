#include "sgp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sgp/rng.hpp"

namespace sgp {
namespace {

using nlohmann::json;

constexpr std::uint64_t kAnchorStream = 0x616e6368;
constexpr std::uint64_t kX0Stream = 0x78304a;

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& context) {
  for (const auto& item : obj.items()) {
    if (!allowed.contains(item.key()))
      fail("unknown key \"" + item.key() + "\" in " + context);
  }
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail("\"" + key + "\" must be a number");
  return v.get<double>();
}

long as_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) fail("\"" + key + "\" must be an integer");
  return v.get<long>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) fail("\"" + key + "\" must be a string");
  return v.get<std::string>();
}

// Accepts [[...d values...] x n] or, for d = 1, a flat list of n numbers.
std::vector<std::vector<double>> as_point_rows(const json& v, const std::string& key, int n, int d) {
  if (!v.is_array()) fail("\"" + key + "\" must be an array");
  std::vector<std::vector<double>> rows;
  rows.reserve(v.size());
  for (const auto& row : v) {
    if (row.is_number()) {
      if (d != 1) fail("\"" + key + "\" entries must be arrays of " + std::to_string(d) + " numbers");
      rows.push_back({row.get<double>()});
      continue;
    }
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      fail("\"" + key + "\" entries must be arrays of " + std::to_string(d) + " numbers");
    std::vector<double> point;
    point.reserve(row.size());
    for (const auto& x : row) point.push_back(as_number(x, key));
    rows.push_back(std::move(point));
  }
  if (n > 0 && static_cast<int>(rows.size()) != n)
    fail("\"" + key + "\" must have exactly " + std::to_string(n) + " rows");
  return rows;
}

// 1-based [from, to] pairs as used in configs and reports.
std::vector<std::pair<int, int>> as_edge_list(const json& v, const std::string& key, int n) {
  if (!v.is_array()) fail("\"" + key + "\" must be an array of [from, to] pairs");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_array() || e.size() != 2) fail("\"" + key + "\" entries must be [from, to] pairs");
    const long from = as_integer(e[0], key);
    const long to = as_integer(e[1], key);
    if (from < 1 || from > n || to < 1 || to > n)
      fail("\"" + key + "\" node indices must lie in 1.." + std::to_string(n));
    if (from == to) fail("\"" + key + "\" must not contain self-loops; they are implicit");
    edges.emplace_back(static_cast<int>(from - 1), static_cast<int>(to - 1));
  }
  return edges;
}

void parse_graph(const json& obj, RunConfig& cfg) {
  reject_unknown_keys(obj, {"model", "B", "p", "edges", "rounds", "degrees"}, "\"graph\"");
  const json* model = find(obj, "model");
  if (!model) fail("\"graph\" requires a \"model\"");
  const std::string name = as_string(*model, "model");

  if (const json* b = find(obj, "B")) {
    const long window = as_integer(*b, "B");
    if (window < 1) fail("B must be >= 1");
    cfg.window = static_cast<int>(window);
  }

  if (name == "static") {
    cfg.model = GraphModel::Static;
    const json* edges = find(obj, "edges");
    if (!edges) fail("static graph model requires \"edges\"");
    cfg.edge_rounds.push_back(as_edge_list(*edges, "edges", cfg.n));
  } else if (name == "cyclic-schedule") {
    cfg.model = GraphModel::CyclicSchedule;
    const json* rounds = find(obj, "rounds");
    if (!rounds || !rounds->is_array() || rounds->empty())
      fail("cyclic-schedule requires a nonempty \"rounds\" array of edge lists");
    for (const auto& r : *rounds) cfg.edge_rounds.push_back(as_edge_list(r, "rounds", cfg.n));
  } else if (name == "random-B-connected") {
    cfg.model = GraphModel::RandomBConnected;
    if (const json* p = find(obj, "p")) {
      cfg.extra_edge_prob = as_number(*p, "p");
      if (cfg.extra_edge_prob < 0.0 || cfg.extra_edge_prob > 1.0) fail("p must lie in [0, 1]");
    }
  } else if (name == "regular-family") {
    cfg.model = GraphModel::RegularFamily;
    const json* degrees = find(obj, "degrees");
    if (!degrees || !degrees->is_array() || degrees->empty())
      fail("regular-family requires a nonempty \"degrees\" array");
    for (const auto& c : *degrees) {
      const long hops = as_integer(c, "degrees");
      if (hops < 1 || hops > cfg.n - 1) fail("\"degrees\" entries must lie in 1..n-1");
      cfg.degrees.push_back(static_cast<int>(hops));
    }
  } else {
    fail("unknown graph model \"" + name + "\"");
  }
}

void parse_objective(const json& obj, RunConfig& cfg) {
  reject_unknown_keys(obj, {"family", "anchors", "anchor_range", "kappa", "slopes"}, "\"objective\"");
  const json* family = find(obj, "family");
  if (!family) fail("\"objective\" requires a \"family\"");
  const std::string name = as_string(*family, "family");
  if (name == "abs-deviation") {
    cfg.family = ObjectiveFamily::AbsDeviation;
    if (cfg.d != 1) fail("abs-deviation requires d = 1");
  } else if (name == "l1-distance") {
    cfg.family = ObjectiveFamily::L1Distance;
  } else if (name == "huber") {
    cfg.family = ObjectiveFamily::Huber;
  } else if (name == "linear-clipped") {
    cfg.family = ObjectiveFamily::LinearClipped;
  } else {
    fail("unknown objective family \"" + name + "\"");
  }
  cfg.has_objective = true;

  if (const json* anchors = find(obj, "anchors"))
    cfg.anchors = as_point_rows(*anchors, "anchors", cfg.n, cfg.d);
  if (const json* range = find(obj, "anchor_range")) {
    if (!range->is_array() || range->size() != 2) fail("\"anchor_range\" must be [low, high]");
    cfg.anchor_range = {as_number((*range)[0], "anchor_range"), as_number((*range)[1], "anchor_range")};
    if (!(cfg.anchor_range[0] < cfg.anchor_range[1])) fail("\"anchor_range\" must satisfy low < high");
  }
  if (const json* kappa = find(obj, "kappa")) {
    cfg.kappa = as_number(*kappa, "kappa");
    if (!(cfg.kappa > 0.0)) fail("kappa must be positive");
  }
  if (const json* slopes = find(obj, "slopes"))
    cfg.slopes = as_point_rows(*slopes, "slopes", cfg.n, cfg.d);
  if (cfg.family == ObjectiveFamily::LinearClipped && cfg.slopes.empty())
    fail("linear-clipped requires \"slopes\"");
}

void parse_schedule(const json& obj, RunConfig& cfg) {
  reject_unknown_keys(obj, {"kind", "power", "scale", "offset"}, "\"schedule\"");
  const json* kind = find(obj, "kind");
  if (!kind) fail("\"schedule\" requires a \"kind\"");
  const std::string name = as_string(*kind, "kind");
  if (name == "inv-sqrt") {
    cfg.schedule_kind = ScheduleKind::InvSqrt;
    cfg.schedule_power = 0.5;
  } else if (name == "inv-t-power") {
    cfg.schedule_kind = ScheduleKind::InvTPower;
  } else if (name == "custom-summable-square") {
    cfg.schedule_kind = ScheduleKind::CustomSummableSquare;
  } else {
    fail("unknown schedule kind \"" + name + "\"");
  }
  if (const json* power = find(obj, "power")) {
    if (name == "inv-sqrt") fail("\"power\" is fixed at 1/2 for inv-sqrt");
    cfg.schedule_power = as_number(*power, "power");
    if (!(cfg.schedule_power > 0.5 && cfg.schedule_power <= 1.0))
      fail("schedule power must lie in (1/2, 1]");
  } else if (name == "inv-t-power") {
    fail("inv-t-power requires a \"power\"");
  }
  if (const json* scale = find(obj, "scale")) {
    if (name != "custom-summable-square") fail("\"scale\" is only valid for custom-summable-square");
    cfg.schedule_scale = as_number(*scale, "scale");
    if (!(cfg.schedule_scale > 0.0)) fail("schedule scale must be positive");
  }
  if (const json* offset = find(obj, "offset")) {
    cfg.schedule_offset = as_integer(*offset, "offset");
    if (cfg.schedule_offset < 0) fail("schedule offset must be >= 0");
  }
}

void parse_x0(const json& v, RunConfig& cfg) {
  if (v.is_array()) {
    cfg.x0_kind = X0Kind::Inline;
    cfg.x0_values = as_point_rows(v, "x0", cfg.n, cfg.d);
    return;
  }
  if (!v.is_object()) fail("\"x0\" must be an array of points or an object");
  reject_unknown_keys(v, {"kind", "low", "high"}, "\"x0\"");
  const json* kind = find(v, "kind");
  if (!kind) fail("\"x0\" requires a \"kind\"");
  const std::string name = as_string(*kind, "kind");
  if (name == "zero") {
    cfg.x0_kind = X0Kind::Zero;
  } else if (name == "uniform") {
    cfg.x0_kind = X0Kind::Uniform;
    const json* low = find(v, "low");
    const json* high = find(v, "high");
    if (!low || !high) fail("uniform x0 requires \"low\" and \"high\"");
    cfg.x0_range = {as_number(*low, "low"), as_number(*high, "high")};
    if (!(cfg.x0_range[0] < cfg.x0_range[1])) fail("x0 range must satisfy low < high");
  } else {
    fail("unknown x0 kind \"" + name + "\"");
  }
}

void parse_perturbation(const json& obj, RunConfig& cfg) {
  reject_unknown_keys(obj, {"kind", "scale", "values"}, "\"perturbation\"");
  const json* kind = find(obj, "kind");
  if (!kind) fail("\"perturbation\" requires a \"kind\"");
  const std::string name = as_string(*kind, "kind");
  if (name == "zero") {
    cfg.perturbation_kind = PerturbationKind::Zero;
  } else if (name == "decaying-deterministic") {
    cfg.perturbation_kind = PerturbationKind::DecayingDeterministic;
    if (const json* scale = find(obj, "scale")) cfg.perturbation_scale = as_number(*scale, "scale");
  } else if (name == "custom-sequence") {
    cfg.perturbation_kind = PerturbationKind::CustomSequence;
    const json* values = find(obj, "values");
    if (!values || !values->is_array()) fail("custom-sequence requires a \"values\" array");
    for (const auto& round : *values) {
      auto rows = as_point_rows(round, "values", cfg.n, cfg.d);
      std::vector<double> flat;
      flat.reserve(static_cast<std::size_t>(cfg.n) * cfg.d);
      for (const auto& row : rows)
        for (double x : row) flat.push_back(x);
      cfg.perturbation_values.push_back(std::move(flat));
    }
  } else {
    fail("unknown perturbation kind \"" + name + "\"");
  }
}

const std::set<std::string> kKnownMonitors = {"mass",   "ysum",     "lemma1",   "corollary2",
                                              "avdone", "lemma8",   "theorem2", "lemma9",
                                              "consensus", "optimality"};

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) fail("config parse error: not valid JSON");
  if (!root.is_object()) fail("config must be a JSON object");
  reject_unknown_keys(root,
                      {"seed", "n", "d", "T", "graph", "objective", "schedule", "x0",
                       "perturbation", "monitors", "thresholds"},
                      "config");

  RunConfig cfg;
  const json* seed = find(root, "seed");
  if (!seed) fail("config requires \"seed\"");
  const long seed_value = as_integer(*seed, "seed");
  if (seed_value < 0) fail("seed must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed_value);

  const json* n = find(root, "n");
  if (!n) fail("config requires \"n\"");
  const long nodes = as_integer(*n, "n");
  if (nodes < 1) fail("n must be >= 1");
  cfg.n = static_cast<int>(nodes);

  if (const json* d = find(root, "d")) {
    const long dim = as_integer(*d, "d");
    if (dim < 1) fail("d must be >= 1");
    cfg.d = static_cast<int>(dim);
  }

  const json* horizon = find(root, "T");
  if (!horizon) fail("config requires \"T\"");
  cfg.rounds = as_integer(*horizon, "T");
  if (cfg.rounds < 1) fail("T must be >= 1");

  const json* graph = find(root, "graph");
  if (!graph) fail("config requires \"graph\"");
  if (!graph->is_object()) fail("\"graph\" must be an object");
  parse_graph(*graph, cfg);

  if (const json* objective = find(root, "objective")) {
    if (!objective->is_object()) fail("\"objective\" must be an object");
    parse_objective(*objective, cfg);
  }

  if (const json* schedule = find(root, "schedule")) {
    if (!schedule->is_object()) fail("\"schedule\" must be an object");
    parse_schedule(*schedule, cfg);
  }

  if (const json* x0 = find(root, "x0")) parse_x0(*x0, cfg);

  if (const json* perturbation = find(root, "perturbation")) {
    if (!perturbation->is_object()) fail("\"perturbation\" must be an object");
    parse_perturbation(*perturbation, cfg);
  }

  if (const json* monitors = find(root, "monitors")) {
    if (!monitors->is_array()) fail("\"monitors\" must be an array of names");
    cfg.monitors_specified = true;
    for (const auto& m : *monitors) {
      const std::string name = as_string(m, "monitors");
      if (!kKnownMonitors.contains(name)) fail("unknown monitor \"" + name + "\"");
      cfg.monitors.push_back(name);
    }
  }

  if (const json* thresholds = find(root, "thresholds")) {
    if (!thresholds->is_object()) fail("\"thresholds\" must be an object");
    reject_unknown_keys(*thresholds, {"consensus_tol", "opt_tol"}, "\"thresholds\"");
    if (const json* c = find(*thresholds, "consensus_tol")) {
      cfg.consensus_tol = as_number(*c, "consensus_tol");
      if (!(cfg.consensus_tol > 0.0)) fail("consensus_tol must be positive");
    }
    if (const json* o = find(*thresholds, "opt_tol")) {
      cfg.opt_tol = as_number(*o, "opt_tol");
      if (!(cfg.opt_tol > 0.0)) fail("opt_tol must be positive");
    }
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

GraphSequence make_graph_sequence(const RunConfig& cfg) {
  switch (cfg.model) {
    case GraphModel::Static: {
      Digraph g(cfg.n);
      for (const auto& [from, to] : cfg.edge_rounds.front()) g.add_edge(from, to);
      return GraphSequence::static_graph(std::move(g), cfg.window);
    }
    case GraphModel::CyclicSchedule: {
      std::vector<Digraph> period;
      period.reserve(cfg.edge_rounds.size());
      for (const auto& round : cfg.edge_rounds) {
        Digraph g(cfg.n);
        for (const auto& [from, to] : round) g.add_edge(from, to);
        period.push_back(std::move(g));
      }
      return GraphSequence::cyclic_schedule(std::move(period), cfg.window);
    }
    case GraphModel::RandomBConnected:
      return GraphSequence::random_b_connected(cfg.n, cfg.window, cfg.seed, cfg.extra_edge_prob);
    case GraphModel::RegularFamily:
      return GraphSequence::regular_family(cfg.n, cfg.degrees);
  }
  throw ConfigError("unhandled graph model");
}

ObjectiveSpec make_objective(const RunConfig& cfg) {
  if (!cfg.has_objective) throw ConfigError("config has no \"objective\" section");
  std::vector<std::vector<double>> anchors = cfg.anchors;
  if (anchors.empty()) {
    Rng rng(mix_seed(cfg.seed, kAnchorStream, 0));
    anchors.assign(static_cast<std::size_t>(cfg.n), std::vector<double>(static_cast<std::size_t>(cfg.d)));
    for (auto& row : anchors)
      for (double& v : row) v = rng.uniform(cfg.anchor_range[0], cfg.anchor_range[1]);
  }
  switch (cfg.family) {
    case ObjectiveFamily::AbsDeviation: {
      std::vector<double> flat;
      flat.reserve(anchors.size());
      for (const auto& row : anchors) flat.push_back(row.front());
      return ObjectiveSpec::abs_deviation(std::move(flat));
    }
    case ObjectiveFamily::L1Distance:
      return ObjectiveSpec::l1_distance(std::move(anchors));
    case ObjectiveFamily::Huber:
      return ObjectiveSpec::huber(std::move(anchors), cfg.kappa);
    case ObjectiveFamily::LinearClipped:
      return ObjectiveSpec::linear_clipped(std::move(anchors), cfg.slopes);
    case ObjectiveFamily::Zero:
      return ObjectiveSpec::zero(cfg.n, cfg.d);
  }
  throw ConfigError("unhandled objective family");
}

StepSchedule make_schedule(const RunConfig& cfg) {
  switch (cfg.schedule_kind) {
    case ScheduleKind::InvSqrt:
      return StepSchedule::inv_sqrt(cfg.schedule_offset);
    case ScheduleKind::InvTPower:
      return StepSchedule::inv_t_power(cfg.schedule_power, cfg.schedule_offset);
    case ScheduleKind::CustomSummableSquare:
      return StepSchedule::custom_summable_square(cfg.schedule_scale, cfg.schedule_power,
                                                  cfg.schedule_offset);
  }
  throw ConfigError("unhandled schedule kind");
}

std::vector<double> make_initial_values(const RunConfig& cfg) {
  std::vector<double> x0(static_cast<std::size_t>(cfg.n) * cfg.d, 0.0);
  switch (cfg.x0_kind) {
    case X0Kind::Zero:
      break;
    case X0Kind::Inline:
      for (int i = 0; i < cfg.n; ++i)
        for (int l = 0; l < cfg.d; ++l)
          x0[static_cast<std::size_t>(i) * cfg.d + l] = cfg.x0_values[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
      break;
    case X0Kind::Uniform: {
      Rng rng(mix_seed(cfg.seed, kX0Stream, 0));
      for (double& v : x0) v = rng.uniform(cfg.x0_range[0], cfg.x0_range[1]);
      break;
    }
  }
  return x0;
}

std::unique_ptr<PerturbationSource> make_perturbation(const RunConfig& cfg) {
  switch (cfg.perturbation_kind) {
    case PerturbationKind::Zero:
      return std::make_unique<ZeroPerturbation>();
    case PerturbationKind::DecayingDeterministic:
      return std::make_unique<DecayingPerturbation>(cfg.perturbation_scale);
    case PerturbationKind::CustomSequence:
      return std::make_unique<CustomSequencePerturbation>(cfg.n, cfg.d, cfg.perturbation_values);
  }
  throw ConfigError("unhandled perturbation kind");
}

}  // namespace sgp
