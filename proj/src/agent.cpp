#include "circmotion/agent.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace circmotion {

Eigen::VectorXcd SwarmState::positions() const {
  Eigen::VectorXcd r(size());
  for (int k = 0; k < size(); ++k) r(k) = to_complex(agents[k].position);
  return r;
}

Eigen::VectorXd SwarmState::headings() const {
  Eigen::VectorXd theta(size());
  for (int k = 0; k < size(); ++k) theta(k) = agents[k].heading;
  return theta;
}

Eigen::VectorXd SwarmState::angular_velocities() const {
  Eigen::VectorXd omega(size());
  for (int k = 0; k < size(); ++k) omega(k) = agents[k].angular_velocity;
  return omega;
}

Eigen::VectorXd SwarmState::flatten() const {
  Eigen::VectorXd flat(kAgentDim * size());
  for (int k = 0; k < size(); ++k) {
    const auto& a = agents[k];
    flat.segment<kAgentDim>(kAgentDim * k) << a.position.x(), a.position.y(), a.heading,
        a.angular_velocity;
  }
  return flat;
}

SwarmState SwarmState::unflatten(const Eigen::VectorXd& flat, double time) {
  if (flat.size() % kAgentDim != 0) {
    throw std::invalid_argument("flattened state length is not a multiple of 4");
  }
  SwarmState s;
  s.time = time;
  const auto n = flat.size() / kAgentDim;
  s.agents.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    auto& a = s.agents[k];
    a.position = flat.segment<2>(kAgentDim * k);
    a.heading = flat(kAgentDim * k + 2);
    a.angular_velocity = flat(kAgentDim * k + 3);
  }
  return s;
}

SwarmState SwarmState::from_arrays(const std::vector<Eigen::Vector2d>& positions,
                                   const Eigen::VectorXd& headings,
                                   const Eigen::VectorXd& angular_velocities, double time) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  if (n < 1) throw std::invalid_argument("swarm needs at least one agent");
  if (headings.size() != n || angular_velocities.size() != n) {
    throw std::invalid_argument("positions, headings and angular velocities differ in length");
  }
  SwarmState s;
  s.time = time;
  s.agents.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    s.agents[k] = {positions[k], headings(k), angular_velocities(k)};
  }
  return s;
}

Eigen::VectorXd SwarmDerivative::flatten() const {
  const auto n = d_heading.size();
  Eigen::VectorXd flat(kAgentDim * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    flat.segment<kAgentDim>(kAgentDim * k) << d_position(0, k), d_position(1, k), d_heading(k),
        d_angular_velocity(k);
  }
  return flat;
}

SwarmDerivative derivative(const SwarmState& s, const Eigen::Ref<const Eigen::VectorXd>& controls) {
  const int n = s.size();
  if (controls.size() != n) {
    throw std::invalid_argument("expected " + std::to_string(n) + " controls, got " +
                                std::to_string(controls.size()));
  }
  if (!controls.allFinite()) throw std::invalid_argument("controls contain non-finite values");
  SwarmDerivative d;
  d.d_position.resize(2, n);
  d.d_heading.resize(n);
  d.d_angular_velocity = controls;
  for (int k = 0; k < n; ++k) {
    const auto& a = s.agents[k];
    if (!a.position.allFinite() || !std::isfinite(a.heading) ||
        !std::isfinite(a.angular_velocity)) {
      throw std::invalid_argument("agent " + std::to_string(k) + " has a non-finite state");
    }
    d.d_position(0, k) = std::cos(a.heading);
    d.d_position(1, k) = std::sin(a.heading);
    d.d_heading(k) = a.angular_velocity;
  }
  return d;
}

Eigen::Vector2d centroid(const SwarmState& s) {
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  for (const auto& a : s.agents) sum += a.position;
  return sum / static_cast<double>(s.size());
}

}  // namespace circmotion
