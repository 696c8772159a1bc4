#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "circmotion/agent.hpp"
#include "circmotion/controllers.hpp"
#include "circmotion/graph.hpp"
#include "circmotion/simulator.hpp"

namespace circmotion {

/// Rejection of a scenario file. `what()` starts with the offending field
/// path (e.g. "controller.K_m[2]") or the line/column of a syntax error.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kScenarioFormat = 1;

/// Graph section exactly as written: a circulant first row, an edge list, or
/// a block-diagonal composition of nested graph sections.
struct GraphSpec {
  enum class Kind { Circulant, Edges, Blocks };
  Kind kind = Kind::Circulant;
  std::vector<double> circulant_row;
  int n = 0;
  std::vector<Edge> edges;  // zero-based (one-based in files)
  std::vector<GraphSpec> blocks;
  bool operator==(const GraphSpec&) const = default;
};

InteractionGraph build_graph(const GraphSpec& spec);

/// Uniform random initial conditions. Draw order per agent is x, y,
/// heading, angular velocity, from a 64-bit Mersenne twister seeded with
/// `seed`; doubles use the top 53 bits so the arrays are identical on every
/// platform.
struct RandomInit {
  std::uint64_t seed = 0;
  int n = 0;
  std::array<double, 2> x_range{-10.0, 10.0};
  std::array<double, 2> y_range{-10.0, 10.0};
  std::array<double, 2> heading_deg_range{0.0, 360.0};
  std::array<double, 2> omega_range{-1.0, 1.0};
  bool operator==(const RandomInit&) const = default;
};

/// Initial conditions. Headings are in degrees here and in files; the
/// simulation works in radians.
struct InitialSpec {
  std::optional<RandomInit> random;
  std::vector<Eigen::Vector2d> positions;
  std::vector<double> headings_deg;
  std::vector<double> angular_velocities;
  bool operator==(const InitialSpec&) const = default;
};

SwarmState initial_state(const InitialSpec& spec);

struct OutputSpec {
  std::string directory;  // empty: chosen by the caller
  bool trajectory = true;
  bool metrics = true;
  bool report = true;
  bool heading_mod_2pi = false;  // extra wrapped-heading column in trajectory.csv
  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  int format = kScenarioFormat;
  std::string name;
  std::string description;
  GraphSpec graph;
  InitialSpec initial;
  ControllerConfig controller;
  IntegrationSettings integration;
  Thresholds thresholds;
  OutputSpec outputs;
  bool operator==(const Scenario&) const = default;
};

/// Parses and fully validates a scenario; throws ScenarioError.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text, const std::string& source = "<string>");

/// Serializes to the documented JSON form; parse_scenario_text of the result
/// reproduces the same Scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Cross-field checks (array lengths, graph size, controller hypotheses).
/// Returns the controller's warnings.
std::vector<std::string> validate_scenario(const Scenario& scenario);

/// Graph, controller and initial state built from a validated scenario.
struct PreparedScenario {
  InteractionGraph graph;
  Controller controller;
  SwarmState initial;
};

PreparedScenario prepare(const Scenario& scenario);

RunResult run(const Scenario& scenario);

/// Directory holding the bundled scenarios: $CIRCMOTION_SCENARIO_DIR if set,
/// otherwise the repository's scenarios/ folder.
std::filesystem::path bundled_scenario_dir();

/// Sorted names (file stems) of the bundled scenarios.
std::vector<std::string> list_bundled_scenarios();

/// An existing file path is used as is; otherwise `name_or_path` is looked
/// up among the bundled scenarios.
std::filesystem::path resolve_scenario(const std::string& name_or_path);

}  // namespace circmotion
