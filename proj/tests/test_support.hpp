#pragma once

#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "circmotion/agent.hpp"
#include "circmotion/graph.hpp"

namespace circmotion::testing {

inline constexpr double kPi = std::numbers::pi;

/// Ring on six agents, the graph of the six-agent example scenarios.
inline InteractionGraph ring6() {
  const std::vector<double> row{2, -1, 0, 0, 0, -1};
  return InteractionGraph::from_circulant_row(row);
}

/// Twelve agents in three blocks of four: cycle, complete, cycle.
inline InteractionGraph blocks12() {
  const std::vector<double> cycle{2, -1, 0, -1};
  const std::vector<double> full{3, -1, -1, -1};
  const std::vector<InteractionGraph> parts{InteractionGraph::from_circulant_row(cycle),
                                            InteractionGraph::from_circulant_row(full),
                                            InteractionGraph::from_circulant_row(cycle)};
  return InteractionGraph::block_diagonal(parts);
}

/// Initial state of the six-agent examples.
inline SwarmState example1_state() {
  const std::vector<Eigen::Vector2d> pos{{1, -1}, {10, 3}, {-1, -5}, {-5, 1}, {12, 5}, {-4, 10}};
  Eigen::VectorXd theta(6);
  theta << 30, 45, 120, 75, 90, 60;
  theta *= kPi / 180.0;
  Eigen::VectorXd omega(6);
  omega << 0.2, -0.3, 0.4, -0.5, 0.6, -0.8;
  return SwarmState::from_arrays(pos, theta, omega);
}

inline Eigen::VectorXd random_angles(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> d(-kPi, kPi);
  Eigen::VectorXd t(n);
  for (int k = 0; k < n; ++k) t(k) = d(gen);
  return t;
}

inline SwarmState random_state(std::mt19937_64& gen, int n, double spread = 10.0) {
  std::uniform_real_distribution<double> pos(-spread, spread);
  std::uniform_real_distribution<double> om(-1.0, 1.0);
  std::vector<Eigen::Vector2d> p(n);
  Eigen::VectorXd w(n);
  for (int k = 0; k < n; ++k) {
    p[k] = {pos(gen), pos(gen)};
    w(k) = om(gen);
  }
  return SwarmState::from_arrays(p, random_angles(gen, n), w);
}

/// Agents on the circle of radius 1/omega_d about `center`, moving
/// anticlockwise with the given headings and omega = omega_d.
inline SwarmState on_circle(const Eigen::VectorXd& theta, double omega_d,
                            const Eigen::Vector2d& center) {
  const double rho = 1.0 / omega_d;
  std::vector<Eigen::Vector2d> p(theta.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    // r = c - i rho e^{i theta}
    p[k] = center + rho * Eigen::Vector2d(std::sin(theta(k)), -std::cos(theta(k)));
  }
  return SwarmState::from_arrays(p, theta, Eigen::VectorXd::Constant(theta.size(), omega_d));
}

/// Evenly spread phases: M clusters of N/M agents, cluster j at 2 pi j / M.
inline Eigen::VectorXd pattern_phases(int n, int M, double offset = 0.3) {
  Eigen::VectorXd t(n);
  for (int k = 0; k < n; ++k) t(k) = offset + 2.0 * kPi * (k % M) / M;
  return t;
}

}  // namespace circmotion::testing
