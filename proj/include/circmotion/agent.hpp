#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace circmotion {

using Complex = std::complex<double>;

inline Complex to_complex(const Eigen::Vector2d& p) { return {p.x(), p.y()}; }
inline Eigen::Vector2d to_point(Complex z) { return {z.real(), z.imag()}; }

/// <z1, z2> = Re(conj(z1) z2), the planar dot product in complex form.
template <typename Scalar>
Scalar inner(const std::complex<Scalar>& z1, const std::complex<Scalar>& z2) {
  return z1.real() * z2.real() + z1.imag() * z2.imag();
}

/// One unit-speed agent. The heading is kept unwrapped; every consumer uses it
/// through exp(i heading) or heading differences.
struct AgentState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // metres
  double heading = 0.0;                                // radians
  double angular_velocity = 0.0;                       // rad/s

  bool operator==(const AgentState&) const = default;
};

/// Number of scalars per agent in the flattened layout (x, y, theta, omega).
inline constexpr int kAgentDim = 4;

struct SwarmState {
  std::vector<AgentState> agents;
  double time = 0.0;

  int size() const { return static_cast<int>(agents.size()); }

  Eigen::VectorXcd positions() const;
  Eigen::VectorXd headings() const;
  Eigen::VectorXd angular_velocities() const;

  /// Agent-major layout (x_1, y_1, theta_1, omega_1, ..., x_N, y_N, theta_N, omega_N).
  Eigen::VectorXd flatten() const;
  static SwarmState unflatten(const Eigen::VectorXd& flat, double time);

  /// Assembles a state from per-field arrays; headings in radians. Throws
  /// std::invalid_argument on length mismatch or N < 1.
  static SwarmState from_arrays(const std::vector<Eigen::Vector2d>& positions,
                                const Eigen::VectorXd& headings,
                                const Eigen::VectorXd& angular_velocities, double time = 0.0);

  bool operator==(const SwarmState&) const = default;
};

/// Right-hand side of the unit-speed, second-order rotational agent model.
struct SwarmDerivative {
  Eigen::Matrix2Xd d_position;  // column k = (cos theta_k, sin theta_k)
  Eigen::VectorXd d_heading;
  Eigen::VectorXd d_angular_velocity;

  Eigen::VectorXd flatten() const;
};

/// Throws std::invalid_argument if `controls` has the wrong length or the
/// state/controls contain non-finite values.
SwarmDerivative derivative(const SwarmState& s, const Eigen::Ref<const Eigen::VectorXd>& controls);

Eigen::Vector2d centroid(const SwarmState& s);

}  // namespace circmotion
