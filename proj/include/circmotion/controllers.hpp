#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "circmotion/agent.hpp"
#include "circmotion/graph.hpp"
#include "circmotion/potentials.hpp"

namespace circmotion {

/// Agent index sets, one per subgroup. Zero-based; must partition 0..N-1.
using Partition = std::vector<std::vector<int>>;

enum class PhaseMode { Balance, Sync };

/// u = 0: every agent keeps circling at its initial angular velocity.
struct OpenLoopLaw {
  bool operator==(const OpenLoopLaw&) const = default;
};

/// Individual circles of radius 1/|omega_d|; Balance needs K > 0, Sync K < 0.
struct IndividualLaw {
  PhaseMode mode = PhaseMode::Balance;
  double K = 1.0;
  double omega_d = 0.2;
  bool operator==(const IndividualLaw&) const = default;
};

/// Common circle about `center`; the sign of K selects balance (> 0) or
/// synchronization (< 0).
struct CommonCircleLaw {
  double K = 1.0;
  double kappa = 0.1;
  double omega_d = 0.2;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  bool operator==(const CommonCircleLaw&) const = default;
};

/// (M, N)-pattern on a common circle; gains holds K_1..K_M.
struct PatternLaw {
  double K = 1.0;
  double kappa = 0.1;
  double omega_d = 0.2;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  std::vector<double> gains;
  PatternWeighting weighting = PatternWeighting::Coupling;
  int order() const { return static_cast<int>(gains.size()); }
  bool operator==(const PatternLaw&) const = default;
};

/// Independent common-circle laws per block, each with its own radius and
/// centre; the graph must have no edges between blocks.
struct SubgroupLaw {
  double K = -1.0;
  double kappa = 0.5;
  std::vector<double> omega_d;             // one per block
  std::vector<Eigen::Vector2d> centers;    // one per block
  Partition blocks;
  bool operator==(const SubgroupLaw&) const = default;
};

enum class IntraCoupling { None, AllToAll };

/// Shared radius, per-block centres; the phase coupling runs over the block
/// graph plus (optionally) the all-to-all graph on every agent.
struct MultiLevelLaw {
  double K = -1.0;
  double kappa = 0.5;
  std::vector<double> omega_d;  // one value, or one per block (all equal)
  std::vector<Eigen::Vector2d> centers;
  Partition blocks;
  IntraCoupling intra = IntraCoupling::AllToAll;
  double common_omega_d() const { return omega_d.empty() ? 0.0 : omega_d.front(); }
  bool operator==(const MultiLevelLaw&) const = default;
};

using ControlLaw = std::variant<OpenLoopLaw, IndividualLaw, CommonCircleLaw, PatternLaw,
                                SubgroupLaw, MultiLevelLaw>;

struct ControllerConfig {
  ControlLaw law;
  /// Symmetric saturation |u_k| <= u_max. Off unless set.
  std::optional<double> saturation;
  bool operator==(const ControllerConfig&) const = default;
};

std::string law_name(const ControlLaw& law);

/// Checks gain signs, divisibility, partitions and sizes against `graph`.
/// Throws std::invalid_argument naming the violated hypothesis. Returns
/// warnings for configurations that are allowed but carry no guarantee.
std::vector<std::string> validate(const ControllerConfig& config, const InteractionGraph& graph);

// Free-function forms of each law. All validate their arguments.

Eigen::VectorXd u_individual(const SwarmState& s, const InteractionGraph& g, double K,
                             double omega_d, PhaseMode mode);

Eigen::VectorXd u_common_circle(const SwarmState& s, const InteractionGraph& g, double K,
                                double kappa, double omega_d, const Eigen::Vector2d& center);

Eigen::VectorXd u_pattern(const SwarmState& s, const InteractionGraph& g, double K, double kappa,
                          double omega_d, const Eigen::Vector2d& center,
                          std::span<const double> gains,
                          PatternWeighting weighting = PatternWeighting::Coupling);

Eigen::VectorXd u_subgroup(const SwarmState& s, const InteractionGraph& block_graph,
                           const Partition& blocks, double K, double kappa,
                           std::span<const double> omega_d,
                           std::span<const Eigen::Vector2d> centers);

Eigen::VectorXd u_multilevel(const SwarmState& s, const InteractionGraph& inter_graph,
                             const InteractionGraph& intra_graph, const Partition& blocks,
                             double K, double kappa, double omega_d,
                             std::span<const Eigen::Vector2d> centers);

/// Convergence target implied by a law.
enum class Objective { None, Balance, Sync, Pattern, BlockBalance, BlockSync };

/// A validated law bound to its interaction graph. Evaluates controls and
/// the composite potential that the law descends.
class Controller {
 public:
  /// `check` = false skips validation; only meant for negative-control tests.
  Controller(ControllerConfig config, InteractionGraph graph, bool check = true);

  Eigen::VectorXd controls(const SwarmState& s) const;
  Eigen::VectorXd operator()(const SwarmState& s) const { return controls(s); }

  /// Composite potential matched to the law; NaN for the open-loop law.
  double lyapunov(const SwarmState& s) const;
  bool has_lyapunov() const;

  Objective objective() const;
  /// Pattern order M, or 1 for non-pattern laws.
  int pattern_order() const;

  /// Target circle of agent k (centre, radius) for circle laws.
  std::optional<std::pair<Eigen::Vector2d, double>> target_circle(int k) const;
  /// Desired angular velocity of agent k.
  double desired_omega(int k) const;

  const ControllerConfig& config() const { return config_; }
  const InteractionGraph& graph() const { return graph_; }
  const Partition& blocks() const { return blocks_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  ControllerConfig config_;
  InteractionGraph graph_;
  Eigen::MatrixXd coupling_laplacian_;  // block graph (+ all-to-all for multi-level)
  double coupling_lambda_max_ = 0.0;
  Partition blocks_;
  std::vector<int> block_of_;
  std::vector<double> block_lambda_max_;
  std::vector<std::string> warnings_;
};

}  // namespace circmotion
