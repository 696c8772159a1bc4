#include "circmotion/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace circmotion {

namespace {

[[noreturn]] void reject(const std::string& what) { throw std::invalid_argument(what); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// -kappa rho (omega - omega_d) + omega_d^2 (kappa <r - c, e^{i theta}> + K phase)
// evaluated for the agents in `agents` with a common target.
void circle_law(const SwarmState& s, const Eigen::VectorXd& phase, double K, double kappa,
                double omega_d, Complex center, std::span<const int> agents,
                Eigen::VectorXd& u) {
  const double rho = 1.0 / omega_d;
  const double omega_d2 = omega_d * omega_d;
  for (int k : agents) {
    const auto& a = s.agents[k];
    const double along = inner(to_complex(a.position) - center, std::polar(1.0, a.heading));
    u(k) = -kappa * rho * (a.angular_velocity - omega_d) +
           omega_d2 * (kappa * along + K * phase(k));
  }
}

std::vector<int> all_agents(int n) {
  std::vector<int> idx(n);
  for (int k = 0; k < n; ++k) idx[k] = k;
  return idx;
}

void check_size(const SwarmState& s, int n) {
  if (s.size() != n) {
    reject("swarm has " + std::to_string(s.size()) + " agents but the graph has " +
           std::to_string(n) + " vertices");
  }
}

std::vector<int> check_partition(const Partition& blocks, int n) {
  if (blocks.empty()) reject("blocks must contain at least one block");
  std::vector<int> owner(n, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) reject("block " + std::to_string(b + 1) + " is empty");
    for (int k : blocks[b]) {
      if (k < 0 || k >= n) {
        reject("block " + std::to_string(b + 1) + " references agent " + std::to_string(k + 1) +
               " outside 1.." + std::to_string(n));
      }
      if (owner[k] != -1) {
        reject("agent " + std::to_string(k + 1) + " is assigned to more than one block");
      }
      owner[k] = static_cast<int>(b);
    }
  }
  for (int k = 0; k < n; ++k) {
    if (owner[k] == -1) reject("agent " + std::to_string(k + 1) + " is not assigned to a block");
  }
  return owner;
}

void check_block_structure(const InteractionGraph& g, const std::vector<int>& owner) {
  for (const auto& [a, b] : g.edges()) {
    if (owner[a] != owner[b]) {
      reject("graph edge (" + std::to_string(a + 1) + ", " + std::to_string(b + 1) +
             ") crosses subgroup blocks; the Laplacian is not block-diagonal");
    }
  }
}

void check_circle_gains(double K, double kappa, double omega_d, const char* law) {
  if (!std::isfinite(K) || K == 0.0) reject(std::string(law) + ": K must be finite and nonzero");
  if (!(kappa > 0) || !std::isfinite(kappa)) reject(std::string(law) + ": requires kappa > 0");
  if (!(omega_d > 0) || !std::isfinite(omega_d)) {
    reject(std::string(law) + ": requires Omega_d > 0");
  }
}

void check_pattern(double K, double kappa, double omega_d, std::span<const double> gains,
                   int n) {
  check_circle_gains(K, kappa, omega_d, "pattern law");
  if (!(K > 0)) reject("pattern law: hypothesis K > 0 violated");
  const int big_m = static_cast<int>(gains.size());
  if (big_m < 1) reject("pattern law: K_m must list M >= 1 gains");
  if (big_m > n || n % big_m != 0) {
    reject("pattern law: M = " + std::to_string(big_m) + " does not divide N = " +
           std::to_string(n));
  }
  for (int m = 1; m < big_m; ++m) {
    if (!(gains[m - 1] > 0)) {
      reject("pattern law: hypothesis K_m > 0 for m < M violated at m = " + std::to_string(m));
    }
  }
  if (!(gains[big_m - 1] < 0)) reject("pattern law: hypothesis K_M < 0 violated");
}

void check_individual(double K, double omega_d, PhaseMode mode) {
  if (!std::isfinite(omega_d)) reject("individual-circle law: Omega_d must be finite");
  if (mode == PhaseMode::Balance && !(K > 0)) {
    reject("individual balancing law: hypothesis K > 0 violated");
  }
  if (mode == PhaseMode::Sync && !(K < 0)) {
    reject("individual synchronization law: hypothesis K < 0 violated");
  }
}

void check_block_targets(std::size_t n_blocks, std::size_t n_omega, std::size_t n_centers,
                         bool allow_single_omega) {
  if (n_centers != n_blocks) {
    reject("c_d lists " + std::to_string(n_centers) + " centres for " +
           std::to_string(n_blocks) + " blocks");
  }
  if (n_omega != n_blocks && !(allow_single_omega && n_omega == 1)) {
    reject("Omega_d lists " + std::to_string(n_omega) + " values for " +
           std::to_string(n_blocks) + " blocks");
  }
}

Eigen::VectorXd saturate(Eigen::VectorXd u, const std::optional<double>& limit) {
  if (limit) u = u.cwiseMax(-*limit).cwiseMin(*limit);
  return u;
}

Eigen::MatrixXd sub_laplacian(const Eigen::MatrixXd& L, const std::vector<int>& idx) {
  return L(idx, idx);
}

}  // namespace

std::string law_name(const ControlLaw& law) {
  return std::visit(
      overloaded{
          [](const OpenLoopLaw&) { return std::string("open_loop"); },
          [](const IndividualLaw& l) {
            return std::string(l.mode == PhaseMode::Balance ? "individual_balance"
                                                            : "individual_sync");
          },
          [](const CommonCircleLaw&) { return std::string("common_circle"); },
          [](const PatternLaw&) { return std::string("pattern"); },
          [](const SubgroupLaw&) { return std::string("subgroup_common_circle"); },
          [](const MultiLevelLaw&) { return std::string("multi_level"); },
      },
      law);
}

std::vector<std::string> validate(const ControllerConfig& config, const InteractionGraph& graph) {
  std::vector<std::string> warnings;
  const int n = graph.size();
  if (config.saturation && !(*config.saturation > 0)) reject("saturation limit must be > 0");

  auto warn_graph = [&](bool needs_circulant) {
    if (!graph.is_connected()) {
      warnings.push_back("interaction graph is not connected; convergence is not guaranteed");
    }
    if (needs_circulant && !graph.is_circulant()) {
      warnings.push_back(
          "interaction graph is not circulant; the balanced maximum is not guaranteed");
    }
  };

  std::visit(
      overloaded{
          [&](const OpenLoopLaw&) {},
          [&](const IndividualLaw& l) {
            check_individual(l.K, l.omega_d, l.mode);
            warn_graph(l.mode == PhaseMode::Balance);
          },
          [&](const CommonCircleLaw& l) {
            check_circle_gains(l.K, l.kappa, l.omega_d, "common-circle law");
            warn_graph(l.K > 0);
          },
          [&](const PatternLaw& l) {
            check_pattern(l.K, l.kappa, l.omega_d, l.gains, n);
            warn_graph(true);
          },
          [&](const SubgroupLaw& l) {
            const auto owner = check_partition(l.blocks, n);
            check_block_structure(graph, owner);
            check_block_targets(l.blocks.size(), l.omega_d.size(), l.centers.size(), false);
            for (double w : l.omega_d) check_circle_gains(l.K, l.kappa, w, "subgroup law");
            for (std::size_t b = 0; b < l.blocks.size(); ++b) {
              const auto sub = sub_laplacian(graph.laplacian(), l.blocks[b]);
              std::vector<Edge> edges;
              for (int j = 0; j < sub.rows(); ++j) {
                for (int k = j + 1; k < sub.cols(); ++k) {
                  if (sub(j, k) != 0.0) edges.emplace_back(j, k);
                }
              }
              const auto block = InteractionGraph::from_edges(static_cast<int>(sub.rows()), edges);
              if (!block.is_connected()) {
                warnings.push_back("block " + std::to_string(b + 1) + " is not connected");
              }
              if (l.K > 0 && !block.is_circulant()) {
                warnings.push_back("block " + std::to_string(b + 1) + " is not circulant");
              }
            }
          },
          [&](const MultiLevelLaw& l) {
            const auto owner = check_partition(l.blocks, n);
            check_block_structure(graph, owner);
            check_block_targets(l.blocks.size(), l.omega_d.size(), l.centers.size(), true);
            for (double w : l.omega_d) {
              if (w != l.omega_d.front()) {
                reject("multi-level law requires a common Omega_d (shared radius) for all blocks");
              }
            }
            check_circle_gains(l.K, l.kappa, l.common_omega_d(), "multi-level law");
          },
      },
      config.law);
  return warnings;
}

Eigen::VectorXd u_individual(const SwarmState& s, const InteractionGraph& g, double K,
                             double omega_d, PhaseMode mode) {
  check_individual(K, omega_d, mode);
  check_size(s, g.size());
  const Eigen::VectorXd coupling = phase_coupling(s.headings(), g, 1);
  const Eigen::ArrayXd err = s.angular_velocities().array() - omega_d;
  if (mode == PhaseMode::Balance) return (-K * (err - coupling.array())).matrix();
  return (K * (err + coupling.array())).matrix();
}

Eigen::VectorXd u_common_circle(const SwarmState& s, const InteractionGraph& g, double K,
                                double kappa, double omega_d, const Eigen::Vector2d& center) {
  check_circle_gains(K, kappa, omega_d, "common-circle law");
  check_size(s, g.size());
  Eigen::VectorXd u(s.size());
  circle_law(s, phase_coupling(s.headings(), g, 1), K, kappa, omega_d, to_complex(center),
             all_agents(s.size()), u);
  return u;
}

Eigen::VectorXd u_pattern(const SwarmState& s, const InteractionGraph& g, double K, double kappa,
                          double omega_d, const Eigen::Vector2d& center,
                          std::span<const double> gains, PatternWeighting weighting) {
  check_size(s, g.size());
  check_pattern(K, kappa, omega_d, gains, s.size());
  const Eigen::VectorXd phase = -pattern_gradient(s.headings(), g.laplacian(), gains, weighting);
  Eigen::VectorXd u(s.size());
  circle_law(s, phase, K, kappa, omega_d, to_complex(center), all_agents(s.size()), u);
  return u;
}

Eigen::VectorXd u_subgroup(const SwarmState& s, const InteractionGraph& block_graph,
                           const Partition& blocks, double K, double kappa,
                           std::span<const double> omega_d,
                           std::span<const Eigen::Vector2d> centers) {
  check_size(s, block_graph.size());
  const auto owner = check_partition(blocks, s.size());
  check_block_structure(block_graph, owner);
  check_block_targets(blocks.size(), omega_d.size(), centers.size(), false);
  for (double w : omega_d) check_circle_gains(K, kappa, w, "subgroup law");
  const Eigen::VectorXd coupling = phase_coupling(s.headings(), block_graph, 1);
  Eigen::VectorXd u(s.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    circle_law(s, coupling, K, kappa, omega_d[b], to_complex(centers[b]), blocks[b], u);
  }
  return u;
}

Eigen::VectorXd u_multilevel(const SwarmState& s, const InteractionGraph& inter_graph,
                             const InteractionGraph& intra_graph, const Partition& blocks,
                             double K, double kappa, double omega_d,
                             std::span<const Eigen::Vector2d> centers) {
  check_size(s, inter_graph.size());
  check_size(s, intra_graph.size());
  const auto owner = check_partition(blocks, s.size());
  check_block_structure(inter_graph, owner);
  check_block_targets(blocks.size(), 1, centers.size(), true);
  check_circle_gains(K, kappa, omega_d, "multi-level law");
  const Eigen::MatrixXd L = inter_graph.laplacian() + intra_graph.laplacian();
  const Eigen::VectorXd coupling = phase_coupling(s.headings(), L, 1);
  Eigen::VectorXd u(s.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    circle_law(s, coupling, K, kappa, omega_d, to_complex(centers[b]), blocks[b], u);
  }
  return u;
}

Controller::Controller(ControllerConfig config, InteractionGraph graph, bool check)
    : config_(std::move(config)), graph_(std::move(graph)) {
  if (check) warnings_ = validate(config_, graph_);
  coupling_laplacian_ = graph_.laplacian();
  coupling_lambda_max_ = graph_.lambda_max();

  const Partition* blocks = nullptr;
  if (const auto* l = std::get_if<SubgroupLaw>(&config_.law)) blocks = &l->blocks;
  if (const auto* l = std::get_if<MultiLevelLaw>(&config_.law)) {
    blocks = &l->blocks;
    if (l->intra == IntraCoupling::AllToAll) {
      coupling_laplacian_ += InteractionGraph::complete(graph_.size()).laplacian();
      coupling_lambda_max_ = dense_eigenvalues(coupling_laplacian_).maxCoeff();
    }
  }
  if (blocks) {
    blocks_ = *blocks;
    block_of_.assign(graph_.size(), 0);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      for (int k : blocks_[b]) {
        if (k >= 0 && k < graph_.size()) block_of_[k] = static_cast<int>(b);
      }
      block_lambda_max_.push_back(
          std::max(0.0, dense_eigenvalues(sub_laplacian(graph_.laplacian(), blocks_[b])).maxCoeff()));
    }
  } else {
    blocks_ = {all_agents(graph_.size())};
    block_of_.assign(graph_.size(), 0);
  }
}

Eigen::VectorXd Controller::controls(const SwarmState& s) const {
  check_size(s, graph_.size());
  const int n = s.size();
  const Eigen::VectorXd theta = s.headings();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);

  std::visit(
      overloaded{
          [&](const OpenLoopLaw&) {},
          [&](const IndividualLaw& l) {
            const Eigen::ArrayXd coupling = phase_coupling(theta, coupling_laplacian_, 1).array();
            const Eigen::ArrayXd err = s.angular_velocities().array() - l.omega_d;
            if (l.mode == PhaseMode::Balance) {
              u = (-l.K * (err - coupling)).matrix();
            } else {
              u = (l.K * (err + coupling)).matrix();
            }
          },
          [&](const CommonCircleLaw& l) {
            circle_law(s, phase_coupling(theta, coupling_laplacian_, 1), l.K, l.kappa, l.omega_d,
                       to_complex(l.center), blocks_.front(), u);
          },
          [&](const PatternLaw& l) {
            const Eigen::VectorXd phase =
                -pattern_gradient(theta, coupling_laplacian_, l.gains, l.weighting);
            circle_law(s, phase, l.K, l.kappa, l.omega_d, to_complex(l.center), blocks_.front(),
                       u);
          },
          [&](const SubgroupLaw& l) {
            const Eigen::VectorXd coupling = phase_coupling(theta, coupling_laplacian_, 1);
            for (std::size_t b = 0; b < blocks_.size(); ++b) {
              circle_law(s, coupling, l.K, l.kappa, l.omega_d[b], to_complex(l.centers[b]),
                         blocks_[b], u);
            }
          },
          [&](const MultiLevelLaw& l) {
            const Eigen::VectorXd coupling = phase_coupling(theta, coupling_laplacian_, 1);
            for (std::size_t b = 0; b < blocks_.size(); ++b) {
              circle_law(s, coupling, l.K, l.kappa, l.common_omega_d(), to_complex(l.centers[b]),
                         blocks_[b], u);
            }
          },
      },
      config_.law);
  return saturate(std::move(u), config_.saturation);
}

bool Controller::has_lyapunov() const {
  return !std::holds_alternative<OpenLoopLaw>(config_.law);
}

double Controller::lyapunov(const SwarmState& s) const {
  using detail::composite_unchecked;
  return std::visit(
      overloaded{
          [&](const OpenLoopLaw&) { return std::numeric_limits<double>::quiet_NaN(); },
          [&](const IndividualLaw& l) {
            CompositeParams p{.K = l.K, .omega_d = l.omega_d};
            const auto kind = l.mode == PhaseMode::Balance ? CompositeKind::V1 : CompositeKind::V2;
            return composite_unchecked(kind, s, coupling_laplacian_, coupling_lambda_max_, p);
          },
          [&](const CommonCircleLaw& l) {
            CompositeParams p{.K = l.K, .kappa = l.kappa, .omega_d = l.omega_d, .center = l.center};
            const auto kind = l.K > 0 ? CompositeKind::U1 : CompositeKind::U2;
            return composite_unchecked(kind, s, coupling_laplacian_, coupling_lambda_max_, p);
          },
          [&](const PatternLaw& l) {
            CompositeParams p{.K = l.K,
                              .kappa = l.kappa,
                              .omega_d = l.omega_d,
                              .center = l.center,
                              .pattern_gains = l.gains,
                              .pattern_weighting = l.weighting};
            return composite_unchecked(CompositeKind::V, s, coupling_laplacian_,
                                       coupling_lambda_max_, p);
          },
          [&](const SubgroupLaw& l) {
            // Blocks decouple, so the sum of per-block common-circle
            // composites is itself non-increasing.
            double total = 0.0;
            for (std::size_t b = 0; b < blocks_.size(); ++b) {
              SwarmState sub;
              for (int k : blocks_[b]) sub.agents.push_back(s.agents[k]);
              CompositeParams p{
                  .K = l.K, .kappa = l.kappa, .omega_d = l.omega_d[b], .center = l.centers[b]};
              const auto kind = l.K > 0 ? CompositeKind::U1 : CompositeKind::U2;
              total += composite_unchecked(kind, sub,
                                           sub_laplacian(coupling_laplacian_, blocks_[b]),
                                           block_lambda_max_[b], p);
            }
            return total;
          },
          [&](const MultiLevelLaw& l) {
            const double omega_d = l.common_omega_d();
            const double rho = 1.0 / omega_d;
            const Eigen::VectorXd theta = s.headings();
            double s_val = 0.0;
            for (int k = 0; k < s.size(); ++k) {
              const Complex e = to_complex(s.agents[k].position) -
                                to_complex(l.centers[block_of_[k]]) +
                                Complex(0.0, rho) * std::polar(1.0, s.agents[k].heading);
              s_val += 0.5 * std::norm(e);
            }
            const double w = w_m(theta, coupling_laplacian_, 1);
            const double phase =
                l.K > 0 ? l.K * (0.5 * s.size() * coupling_lambda_max_ - w) : -l.K * w;
            return l.kappa * s_val + rho * phase +
                   rho * rho * rho * g_potential(s.angular_velocities(), omega_d);
          },
      },
      config_.law);
}

Objective Controller::objective() const {
  return std::visit(
      overloaded{
          [](const OpenLoopLaw&) { return Objective::None; },
          [](const IndividualLaw& l) {
            return l.mode == PhaseMode::Balance ? Objective::Balance : Objective::Sync;
          },
          [](const CommonCircleLaw& l) { return l.K > 0 ? Objective::Balance : Objective::Sync; },
          [](const PatternLaw&) { return Objective::Pattern; },
          [](const SubgroupLaw& l) {
            return l.K > 0 ? Objective::BlockBalance : Objective::BlockSync;
          },
          [](const MultiLevelLaw& l) { return l.K > 0 ? Objective::Balance : Objective::Sync; },
      },
      config_.law);
}

int Controller::pattern_order() const {
  if (const auto* l = std::get_if<PatternLaw>(&config_.law)) return l->order();
  return 1;
}

std::optional<std::pair<Eigen::Vector2d, double>> Controller::target_circle(int k) const {
  return std::visit(
      overloaded{
          [](const OpenLoopLaw&) -> std::optional<std::pair<Eigen::Vector2d, double>> {
            return std::nullopt;
          },
          [](const IndividualLaw&) -> std::optional<std::pair<Eigen::Vector2d, double>> {
            return std::nullopt;
          },
          [](const CommonCircleLaw& l) -> std::optional<std::pair<Eigen::Vector2d, double>> {
            return std::pair{l.center, 1.0 / l.omega_d};
          },
          [](const PatternLaw& l) -> std::optional<std::pair<Eigen::Vector2d, double>> {
            return std::pair{l.center, 1.0 / l.omega_d};
          },
          [&](const SubgroupLaw& l) -> std::optional<std::pair<Eigen::Vector2d, double>> {
            const int b = block_of_[k];
            return std::pair{l.centers[b], 1.0 / l.omega_d[b]};
          },
          [&](const MultiLevelLaw& l) -> std::optional<std::pair<Eigen::Vector2d, double>> {
            return std::pair{l.centers[block_of_[k]], 1.0 / l.common_omega_d()};
          },
      },
      config_.law);
}

double Controller::desired_omega(int k) const {
  return std::visit(
      overloaded{
          [&](const OpenLoopLaw&) { return std::numeric_limits<double>::quiet_NaN(); },
          [](const IndividualLaw& l) { return l.omega_d; },
          [](const CommonCircleLaw& l) { return l.omega_d; },
          [](const PatternLaw& l) { return l.omega_d; },
          [&](const SubgroupLaw& l) { return l.omega_d[block_of_[k]]; },
          [](const MultiLevelLaw& l) { return l.common_omega_d(); },
      },
      config_.law);
}

}  // namespace circmotion
