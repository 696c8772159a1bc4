#include "circmotion/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#ifndef CIRCMOTION_DEFAULT_SCENARIO_DIR
#define CIRCMOTION_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace circmotion {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ScenarioError(path + ": " + message);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Wraps one JSON object, remembers which keys were read and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const json* find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  const json& require(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(at(key), "required field is missing");
    return *v;
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return join(path_, key); }

  // Unknown fields are errors so that typos in gain names never pass silently.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(at(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

long long as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_doubles(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], index(path, i)));
  return out;
}

Eigen::Vector2d as_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected a pair [x, y]");
  return {as_double(j[0], index(path, 0)), as_double(j[1], index(path, 1))};
}

std::vector<Eigen::Vector2d> as_points(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of [x, y] pairs");
  std::vector<Eigen::Vector2d> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_point(j[i], index(path, i)));
  return out;
}

std::array<double, 2> as_range(const json& j, const std::string& path) {
  const Eigen::Vector2d p = as_point(j, path);
  if (p.x() > p.y()) fail(path, "range lower bound exceeds upper bound");
  return {p.x(), p.y()};
}

// Accepts either a single pair or a list of pairs.
std::vector<Eigen::Vector2d> as_point_or_points(const json& j, const std::string& path) {
  if (j.is_array() && j.size() == 2 && j[0].is_number()) return {as_point(j, path)};
  return as_points(j, path);
}

std::vector<double> as_scalar_or_list(const json& j, const std::string& path) {
  if (j.is_number()) return {as_double(j, path)};
  return as_doubles(j, path);
}

Partition as_partition(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected a list of one-based agent index lists");
  Partition out;
  for (std::size_t b = 0; b < j.size(); ++b) {
    const std::string bp = index(path, b);
    if (!j[b].is_array()) fail(bp, "expected a list of agent indices");
    std::vector<int> block;
    for (std::size_t i = 0; i < j[b].size(); ++i) {
      const long long k = as_int(j[b][i], index(bp, i));
      if (k < 1) fail(index(bp, i), "agent indices are one-based");
      block.push_back(static_cast<int>(k - 1));
    }
    out.push_back(std::move(block));
  }
  return out;
}

GraphSpec parse_graph(const json& j, const std::string& path) {
  Section sec(j, path);
  GraphSpec g;
  const int forms = sec.has("circulant") + sec.has("edges") + sec.has("blocks");
  if (forms != 1) fail(path, "give exactly one of 'circulant', 'edges' (with 'n') or 'blocks'");
  if (const json* row = sec.find("circulant")) {
    g.kind = GraphSpec::Kind::Circulant;
    g.circulant_row = as_doubles(*row, sec.at("circulant"));
  } else if (const json* edges = sec.find("edges")) {
    g.kind = GraphSpec::Kind::Edges;
    const long long n = as_int(sec.require("n"), sec.at("n"));
    if (n < 1) fail(sec.at("n"), "must be >= 1");
    g.n = static_cast<int>(n);
    const std::string ep = sec.at("edges");
    if (!edges->is_array()) fail(ep, "expected a list of [j, k] pairs");
    for (std::size_t i = 0; i < edges->size(); ++i) {
      const json& e = (*edges)[i];
      const std::string p = index(ep, i);
      if (!e.is_array() || e.size() != 2) fail(p, "expected a pair [j, k]");
      const long long a = as_int(e[0], index(p, 0));
      const long long b = as_int(e[1], index(p, 1));
      if (a < 1 || a > n || b < 1 || b > n) {
        fail(p, "vertex indices must lie in 1.." + std::to_string(n));
      }
      g.edges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
    }
  } else {
    g.kind = GraphSpec::Kind::Blocks;
    const json& blocks = sec.require("blocks");
    const std::string bp = sec.at("blocks");
    if (!blocks.is_array() || blocks.empty()) fail(bp, "expected a non-empty list of graphs");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      g.blocks.push_back(parse_graph(blocks[i], index(bp, i)));
    }
  }
  sec.finish();
  return g;
}

InitialSpec parse_initial(const json& j, const std::string& path) {
  Section sec(j, path);
  InitialSpec init;
  if (const json* r = sec.find("random")) {
    Section rs(*r, sec.at("random"));
    RandomInit ri;
    const json& seed = rs.require("seed");
    if (!seed.is_number_unsigned()) fail(rs.at("seed"), "expected a non-negative integer");
    ri.seed = seed.get<std::uint64_t>();
    if (const json* n = rs.find("n")) {
      const long long v = as_int(*n, rs.at("n"));
      if (v < 1) fail(rs.at("n"), "must be >= 1");
      ri.n = static_cast<int>(v);
    }
    if (const json* v = rs.find("x_range")) ri.x_range = as_range(*v, rs.at("x_range"));
    if (const json* v = rs.find("y_range")) ri.y_range = as_range(*v, rs.at("y_range"));
    if (const json* v = rs.find("heading_deg_range")) {
      ri.heading_deg_range = as_range(*v, rs.at("heading_deg_range"));
    }
    if (const json* v = rs.find("omega_range")) ri.omega_range = as_range(*v, rs.at("omega_range"));
    rs.finish();
    init.random = ri;
    if (sec.has("positions") || sec.has("headings_deg") || sec.has("angular_velocities")) {
      fail(path, "'random' cannot be combined with explicit arrays");
    }
  } else {
    init.positions = as_points(sec.require("positions"), sec.at("positions"));
    init.headings_deg = as_doubles(sec.require("headings_deg"), sec.at("headings_deg"));
    init.angular_velocities =
        as_doubles(sec.require("angular_velocities"), sec.at("angular_velocities"));
  }
  sec.finish();
  return init;
}

// Fields each law accepts besides "law" and "saturation".
const std::vector<std::string>& law_fields(const std::string& law) {
  static const std::vector<std::string> none;
  static const std::vector<std::string> individual{"K", "Omega_d"};
  static const std::vector<std::string> circle{"K", "kappa", "Omega_d", "c_d"};
  static const std::vector<std::string> pattern{"K",  "kappa", "Omega_d",          "c_d",
                                                "M", "K_m",   "pattern_weighting"};
  static const std::vector<std::string> subgroup{"K", "kappa", "Omega_d", "c_d", "blocks"};
  static const std::vector<std::string> multi{"K", "kappa", "Omega_d", "c_d", "blocks", "intra"};
  if (law == "open_loop") return none;
  if (law == "individual_balance" || law == "individual_sync") return individual;
  if (law == "common_circle") return circle;
  if (law == "pattern") return pattern;
  if (law == "subgroup_common_circle") return subgroup;
  if (law == "multi_level") return multi;
  fail("controller.law",
       "unknown law '" + law +
           "' (expected open_loop, individual_balance, individual_sync, common_circle, "
           "pattern, subgroup_common_circle or multi_level)");
}

ControllerConfig parse_controller(const json& j, const std::string& path) {
  Section sec(j, path);
  const std::string law = as_string(sec.require("law"), sec.at("law"));
  const auto& allowed = law_fields(law);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "law" || key == "saturation") continue;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(sec.at(key), "not a parameter of law '" + law + "'");
    }
  }

  auto num = [&](const char* key) { return as_double(sec.require(key), sec.at(key)); };
  auto scalar_omega = [&]() {
    const json& v = sec.require("Omega_d");
    if (!v.is_number()) fail(sec.at("Omega_d"), "expected a single number for this law");
    return as_double(v, sec.at("Omega_d"));
  };

  ControllerConfig cfg;
  if (law == "open_loop") {
    cfg.law = OpenLoopLaw{};
  } else if (law == "individual_balance" || law == "individual_sync") {
    cfg.law = IndividualLaw{
        .mode = law == "individual_balance" ? PhaseMode::Balance : PhaseMode::Sync,
        .K = num("K"),
        .omega_d = scalar_omega()};
  } else if (law == "common_circle") {
    cfg.law = CommonCircleLaw{.K = num("K"),
                              .kappa = num("kappa"),
                              .omega_d = scalar_omega(),
                              .center = as_point(sec.require("c_d"), sec.at("c_d"))};
  } else if (law == "pattern") {
    PatternLaw l{.K = num("K"),
                 .kappa = num("kappa"),
                 .omega_d = scalar_omega(),
                 .center = as_point(sec.require("c_d"), sec.at("c_d")),
                 .gains = as_doubles(sec.require("K_m"), sec.at("K_m"))};
    if (const json* m = sec.find("M")) {
      if (as_int(*m, sec.at("M")) != l.order()) {
        fail(sec.at("M"), "must equal the length of K_m (" + std::to_string(l.order()) + ")");
      }
    }
    if (const json* w = sec.find("pattern_weighting")) {
      const std::string v = as_string(*w, sec.at("pattern_weighting"));
      if (v == "coupling") {
        l.weighting = PatternWeighting::Coupling;
      } else if (v == "potential") {
        l.weighting = PatternWeighting::Potential;
      } else {
        fail(sec.at("pattern_weighting"), "expected 'coupling' or 'potential'");
      }
    }
    cfg.law = std::move(l);
  } else {
    const Partition blocks = as_partition(sec.require("blocks"), sec.at("blocks"));
    std::vector<double> omegas = as_scalar_or_list(sec.require("Omega_d"), sec.at("Omega_d"));
    std::vector<Eigen::Vector2d> centers =
        as_point_or_points(sec.require("c_d"), sec.at("c_d"));
    if (centers.size() == 1) centers.assign(blocks.size(), centers.front());
    if (law == "subgroup_common_circle") {
      if (omegas.size() == 1) omegas.assign(blocks.size(), omegas.front());
      cfg.law = SubgroupLaw{.K = num("K"),
                            .kappa = num("kappa"),
                            .omega_d = std::move(omegas),
                            .centers = std::move(centers),
                            .blocks = blocks};
    } else {
      MultiLevelLaw l{.K = num("K"),
                      .kappa = num("kappa"),
                      .omega_d = std::move(omegas),
                      .centers = std::move(centers),
                      .blocks = blocks};
      if (const json* v = sec.find("intra")) {
        const std::string s = as_string(*v, sec.at("intra"));
        if (s == "all_to_all") {
          l.intra = IntraCoupling::AllToAll;
        } else if (s == "none") {
          l.intra = IntraCoupling::None;
        } else {
          fail(sec.at("intra"), "expected 'all_to_all' or 'none'");
        }
      }
      cfg.law = std::move(l);
    }
  }
  if (const json* sat = sec.find("saturation")) cfg.saturation = as_double(*sat, sec.at("saturation"));
  sec.finish();
  return cfg;
}

IntegrationSettings parse_integration(const json& j, const std::string& path) {
  Section sec(j, path);
  IntegrationSettings s;
  if (const json* v = sec.find("dt")) s.dt = as_double(*v, sec.at("dt"));
  if (const json* v = sec.find("t_end")) s.t_end = as_double(*v, sec.at("t_end"));
  if (const json* v = sec.find("record_every")) {
    s.record_every = static_cast<int>(as_int(*v, sec.at("record_every")));
  }
  sec.finish();
  return s;
}

Thresholds parse_thresholds(const json& j, const std::string& path) {
  Section sec(j, path);
  Thresholds t;
  auto opt = [&](const char* key, double& field) {
    if (const json* v = sec.find(key)) field = as_double(*v, sec.at(key));
  };
  opt("balance_order", t.balance_order);
  opt("sync_order", t.sync_order);
  opt("omega_error", t.omega_error);
  opt("radius_error", t.radius_error);
  opt("pattern_residual", t.pattern_residual);
  opt("window_fraction", t.window_fraction);
  sec.finish();
  return t;
}

OutputSpec parse_outputs(const json& j, const std::string& path) {
  Section sec(j, path);
  OutputSpec o;
  if (const json* v = sec.find("directory")) o.directory = as_string(*v, sec.at("directory"));
  if (const json* v = sec.find("trajectory")) o.trajectory = as_bool(*v, sec.at("trajectory"));
  if (const json* v = sec.find("metrics")) o.metrics = as_bool(*v, sec.at("metrics"));
  if (const json* v = sec.find("report")) o.report = as_bool(*v, sec.at("report"));
  if (const json* v = sec.find("heading_mod_2pi")) {
    o.heading_mod_2pi = as_bool(*v, sec.at("heading_mod_2pi"));
  }
  sec.finish();
  return o;
}

json point_json(const Eigen::Vector2d& p) { return json::array({p.x(), p.y()}); }

json graph_json(const GraphSpec& g) {
  json j = json::object();
  switch (g.kind) {
    case GraphSpec::Kind::Circulant:
      j["circulant"] = g.circulant_row;
      break;
    case GraphSpec::Kind::Edges: {
      j["n"] = g.n;
      json edges = json::array();
      for (const auto& [a, b] : g.edges) edges.push_back(json::array({a + 1, b + 1}));
      j["edges"] = std::move(edges);
      break;
    }
    case GraphSpec::Kind::Blocks: {
      json blocks = json::array();
      for (const auto& b : g.blocks) blocks.push_back(graph_json(b));
      j["blocks"] = std::move(blocks);
      break;
    }
  }
  return j;
}

json partition_json(const Partition& blocks) {
  json out = json::array();
  for (const auto& b : blocks) {
    json block = json::array();
    for (int k : b) block.push_back(k + 1);
    out.push_back(std::move(block));
  }
  return out;
}

json points_json(const std::vector<Eigen::Vector2d>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back(point_json(p));
  return out;
}

json controller_json(const ControllerConfig& cfg) {
  json j = json::object();
  j["law"] = law_name(cfg.law);
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, IndividualLaw>) {
          j["K"] = l.K;
          j["Omega_d"] = l.omega_d;
        } else if constexpr (std::is_same_v<T, CommonCircleLaw>) {
          j["K"] = l.K;
          j["kappa"] = l.kappa;
          j["Omega_d"] = l.omega_d;
          j["c_d"] = point_json(l.center);
        } else if constexpr (std::is_same_v<T, PatternLaw>) {
          j["K"] = l.K;
          j["kappa"] = l.kappa;
          j["Omega_d"] = l.omega_d;
          j["c_d"] = point_json(l.center);
          j["M"] = l.order();
          j["K_m"] = l.gains;
          j["pattern_weighting"] =
              l.weighting == PatternWeighting::Coupling ? "coupling" : "potential";
        } else if constexpr (std::is_same_v<T, SubgroupLaw>) {
          j["K"] = l.K;
          j["kappa"] = l.kappa;
          j["Omega_d"] = l.omega_d;
          j["c_d"] = points_json(l.centers);
          j["blocks"] = partition_json(l.blocks);
        } else if constexpr (std::is_same_v<T, MultiLevelLaw>) {
          j["K"] = l.K;
          j["kappa"] = l.kappa;
          if (l.omega_d.size() == 1) {
            j["Omega_d"] = l.omega_d.front();
          } else {
            j["Omega_d"] = l.omega_d;
          }
          j["c_d"] = points_json(l.centers);
          j["blocks"] = partition_json(l.blocks);
          j["intra"] = l.intra == IntraCoupling::AllToAll ? "all_to_all" : "none";
        }
      },
      cfg.law);
  if (cfg.saturation) j["saturation"] = *cfg.saturation;
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

InteractionGraph build_graph(const GraphSpec& spec) {
  switch (spec.kind) {
    case GraphSpec::Kind::Circulant:
      return InteractionGraph::from_circulant_row(spec.circulant_row);
    case GraphSpec::Kind::Edges:
      return InteractionGraph::from_edges(spec.n, spec.edges);
    case GraphSpec::Kind::Blocks: {
      std::vector<InteractionGraph> parts;
      for (const auto& b : spec.blocks) parts.push_back(build_graph(b));
      return InteractionGraph::block_diagonal(parts);
    }
  }
  throw std::logic_error("unhandled graph kind");
}

SwarmState initial_state(const InitialSpec& spec) {
  constexpr double deg = std::numbers::pi / 180.0;
  if (spec.random) {
    const RandomInit& r = *spec.random;
    std::mt19937_64 gen(r.seed);
    auto uniform = [&gen](const std::array<double, 2>& range) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      return range[0] + (range[1] - range[0]) * u;
    };
    std::vector<Eigen::Vector2d> pos(r.n);
    Eigen::VectorXd theta(r.n), omega(r.n);
    for (int k = 0; k < r.n; ++k) {
      pos[k].x() = uniform(r.x_range);
      pos[k].y() = uniform(r.y_range);
      theta(k) = uniform(r.heading_deg_range) * deg;
      omega(k) = uniform(r.omega_range);
    }
    return SwarmState::from_arrays(pos, theta, omega);
  }
  const Eigen::VectorXd theta =
      Eigen::Map<const Eigen::VectorXd>(spec.headings_deg.data(),
                                        static_cast<Eigen::Index>(spec.headings_deg.size())) *
      deg;
  const Eigen::VectorXd omega = Eigen::Map<const Eigen::VectorXd>(
      spec.angular_velocities.data(), static_cast<Eigen::Index>(spec.angular_velocities.size()));
  return SwarmState::from_arrays(spec.positions, theta, omega);
}

std::vector<std::string> validate_scenario(const Scenario& sc) {
  if (sc.format != kScenarioFormat) {
    fail("format", "unsupported format " + std::to_string(sc.format) + " (expected 1)");
  }
  if (sc.name.empty()) fail("name", "must not be empty");

  std::optional<InteractionGraph> graph;
  try {
    graph = build_graph(sc.graph);
  } catch (const std::invalid_argument& e) {
    fail("graph", e.what());
  }
  const int n = graph->size();

  if (sc.initial.random) {
    if (sc.initial.random->n != n) {
      fail("initial.random.n", "is " + std::to_string(sc.initial.random->n) +
                                   " but the graph has " + std::to_string(n) + " vertices");
    }
  } else {
    auto check_len = [n](std::size_t len, const char* field) {
      if (static_cast<int>(len) != n) {
        fail(std::string("initial.") + field,
             "has " + std::to_string(len) + " entries but the graph has " + std::to_string(n) +
                 " vertices");
      }
    };
    check_len(sc.initial.positions.size(), "positions");
    check_len(sc.initial.headings_deg.size(), "headings_deg");
    check_len(sc.initial.angular_velocities.size(), "angular_velocities");
  }

  const auto& in = sc.integration;
  if (!(in.dt > 0)) fail("integration.dt", "must be > 0");
  if (!(in.t_end >= in.dt)) fail("integration.t_end", "must be >= dt");
  if (in.record_every < 1) fail("integration.record_every", "must be >= 1");

  const auto& th = sc.thresholds;
  auto positive = [](double v, const char* field) {
    if (!(v > 0)) fail(std::string("thresholds.") + field, "must be > 0");
  };
  positive(th.balance_order, "balance_order");
  positive(th.sync_order, "sync_order");
  positive(th.omega_error, "omega_error");
  positive(th.radius_error, "radius_error");
  positive(th.pattern_residual, "pattern_residual");
  if (!(th.window_fraction > 0 && th.window_fraction <= 1)) {
    fail("thresholds.window_fraction", "must lie in (0, 1]");
  }

  try {
    return validate(sc.controller, *graph);
  } catch (const std::invalid_argument& e) {
    fail("controller", e.what());
  }
}

Scenario parse_scenario_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(source + ": " + e.what());
  }
  try {
    Section root(j, "");
    Scenario sc;
    const json& fmt = root.require("format");
    sc.format = static_cast<int>(as_int(fmt, "format"));
    if (sc.format != kScenarioFormat) {
      fail("format", "unsupported format " + std::to_string(sc.format) + " (expected 1)");
    }
    sc.name = as_string(root.require("name"), "name");
    if (const json* d = root.find("description")) sc.description = as_string(*d, "description");
    sc.graph = parse_graph(root.require("graph"), "graph");
    sc.initial = parse_initial(root.require("initial"), "initial");
    sc.controller = parse_controller(root.require("controller"), "controller");
    if (const json* v = root.find("integration")) sc.integration = parse_integration(*v, "integration");
    if (const json* v = root.find("thresholds")) sc.thresholds = parse_thresholds(*v, "thresholds");
    if (const json* v = root.find("outputs")) sc.outputs = parse_outputs(*v, "outputs");
    root.finish();

    // A random block without 'n' takes the graph size.
    if (sc.initial.random && sc.initial.random->n == 0) {
      try {
        sc.initial.random->n = build_graph(sc.graph).size();
      } catch (const std::invalid_argument& e) {
        fail("graph", e.what());
      }
    }
    validate_scenario(sc);
    return sc;
  } catch (const ScenarioError& e) {
    throw ScenarioError(source + ": " + e.what());
  }
}

Scenario parse_scenario(const std::filesystem::path& path) {
  return parse_scenario_text(read_file(path), path.string());
}

std::string serialize_scenario(const Scenario& sc) {
  json j = json::object();
  j["format"] = sc.format;
  j["name"] = sc.name;
  if (!sc.description.empty()) j["description"] = sc.description;
  j["graph"] = graph_json(sc.graph);

  json init = json::object();
  if (sc.initial.random) {
    const RandomInit& r = *sc.initial.random;
    init["random"] = {{"seed", r.seed},
                      {"n", r.n},
                      {"x_range", r.x_range},
                      {"y_range", r.y_range},
                      {"heading_deg_range", r.heading_deg_range},
                      {"omega_range", r.omega_range}};
  } else {
    init["positions"] = points_json(sc.initial.positions);
    init["headings_deg"] = sc.initial.headings_deg;
    init["angular_velocities"] = sc.initial.angular_velocities;
  }
  j["initial"] = std::move(init);
  j["controller"] = controller_json(sc.controller);
  j["integration"] = {{"dt", sc.integration.dt},
                      {"t_end", sc.integration.t_end},
                      {"record_every", sc.integration.record_every}};
  j["thresholds"] = {{"balance_order", sc.thresholds.balance_order},
                     {"sync_order", sc.thresholds.sync_order},
                     {"omega_error", sc.thresholds.omega_error},
                     {"radius_error", sc.thresholds.radius_error},
                     {"pattern_residual", sc.thresholds.pattern_residual},
                     {"window_fraction", sc.thresholds.window_fraction}};
  j["outputs"] = {{"directory", sc.outputs.directory},
                  {"trajectory", sc.outputs.trajectory},
                  {"metrics", sc.outputs.metrics},
                  {"report", sc.outputs.report},
                  {"heading_mod_2pi", sc.outputs.heading_mod_2pi}};
  return j.dump(2) + "\n";
}

PreparedScenario prepare(const Scenario& sc) {
  validate_scenario(sc);
  InteractionGraph graph = build_graph(sc.graph);
  Controller controller(sc.controller, graph);
  return {std::move(graph), std::move(controller), initial_state(sc.initial)};
}

RunResult run(const Scenario& sc) {
  const PreparedScenario p = prepare(sc);
  return simulate(p.initial, p.controller, sc.integration, sc.thresholds);
}

std::filesystem::path bundled_scenario_dir() {
  if (const char* env = std::getenv("CIRCMOTION_SCENARIO_DIR"); env && *env) return env;
  return CIRCMOTION_DEFAULT_SCENARIO_DIR;
}

std::vector<std::string> list_bundled_scenarios() {
  std::vector<std::string> names;
  const auto dir = bundled_scenario_dir();
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path resolve_scenario(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  const auto bundled = bundled_scenario_dir() / (name_or_path + ".json");
  if (std::filesystem::is_regular_file(bundled)) return bundled;
  throw ScenarioError(name_or_path + ": no such file and no bundled scenario of that name (see " +
                      bundled_scenario_dir().string() + ")");
}

}  // namespace circmotion
