#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "circmotion/agent.hpp"
#include "circmotion/controllers.hpp"

namespace circmotion {

/// Raised when integration produces a non-finite state.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegrationSettings {
  double dt = 0.01;
  double t_end = 200.0;
  int record_every = 1;
  bool operator==(const IntegrationSettings&) const = default;
};

/// Convergence thresholds, checked on every sample of the trailing window.
struct Thresholds {
  double balance_order = 1e-2;   // |p| below this counts as balanced
  double sync_order = 0.99;      // |p| above this counts as synchronized
  double omega_error = 1e-3;     // rad/s
  double radius_error = 0.05;    // m
  double pattern_residual = 1e-2;
  double window_fraction = 0.1;
  bool operator==(const Thresholds&) const = default;
};

/// Relative tolerance for the composite potential's step-to-step increase.
inline constexpr double kLyapunovTolerance = 1e-7;

/// Headings beyond this magnitude keep only ~1e-4 rad of resolution; a step
/// that reaches it is treated like a non-finite state.
inline constexpr double kMaxHeadingMagnitude = 1e12;

using ControlFn = std::function<Eigen::VectorXd(const SwarmState&)>;

/// One classical RK4 step; controls are re-evaluated at every stage.
/// Throws SimulationError if the result is not finite or a heading exceeds
/// kMaxHeadingMagnitude.
SwarmState step(const SwarmState& s, const ControlFn& control, double dt);
SwarmState step(const SwarmState& s, const Controller& controller, double dt);

struct SampleMetrics {
  Eigen::VectorXd order_abs;       // |p_m|, m = 1..harmonics
  double omega_error_max = 0.0;
  double radius_error_max = 0.0;   // NaN without a target circle
  double circle_residual_max = 0.0;  // max |r_k - c + i rho e^{i theta_k}|, NaN likewise
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  double lyapunov = 0.0;           // NaN without a composite
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SwarmState> states;
  std::vector<Eigen::VectorXd> controls;
  std::vector<SampleMetrics> metrics;
  int harmonics = 1;
};

struct FinalMetrics {
  double order_abs = 0.0;
  double omega_error_max = 0.0;
  std::optional<double> radius_error_max;
  std::optional<double> circle_residual_max;
  std::optional<double> centroid_distance;
  Eigen::VectorXd pattern_residuals;
  Eigen::VectorXd block_order_abs;
};

struct ConvergenceReport {
  bool converged = false;
  std::optional<double> t_converged;
  FinalMetrics final;
  int lyapunov_violations = 0;
  std::vector<std::string> warnings;
};

struct LyapunovSeries {
  std::vector<double> values;
  int violations = 0;
};

/// Evaluates the controller's composite along `traj` and counts increases
/// larger than kLyapunovTolerance * (1 + |previous value|).
LyapunovSeries lyapunov_series(const Trajectory& traj, const Controller& controller);

/// residual_m = |m p_m| for m < M and 1 - |M p_M| for m = M.
Eigen::VectorXd pattern_residuals(const Eigen::VectorXd& theta, int M);

struct RunResult {
  Trajectory trajectory;
  ConvergenceReport report;
};

/// Integrates the closed loop from `initial` and evaluates convergence.
RunResult simulate(const SwarmState& initial, const Controller& controller,
                   const IntegrationSettings& settings, const Thresholds& thresholds = {});

SampleMetrics sample_metrics(const SwarmState& s, const Controller& controller, int harmonics);

}  // namespace circmotion
