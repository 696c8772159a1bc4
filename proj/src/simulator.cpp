#include "circmotion/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "circmotion/potentials.hpp"

namespace circmotion {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Eigen::VectorXd closed_loop_rhs(const Eigen::VectorXd& flat, double t, const ControlFn& control) {
  const SwarmState s = SwarmState::unflatten(flat, t);
  return derivative(s, control(s)).flatten();
}

Eigen::VectorXd block_orders(const SwarmState& s, const Partition& blocks) {
  const Eigen::VectorXd theta = s.headings();
  Eigen::VectorXd out(static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    out(static_cast<Eigen::Index>(b)) = std::abs(order_parameter(theta(blocks[b]).eval(), 1));
  }
  return out;
}

bool sample_converged(const SwarmState& s, const SampleMetrics& m, const Controller& c,
                      const Thresholds& th) {
  const Objective obj = c.objective();
  if (obj == Objective::None) return true;
  if (!(m.omega_error_max < th.omega_error)) return false;
  if (!std::isnan(m.radius_error_max) && !(m.radius_error_max < th.radius_error)) return false;
  switch (obj) {
    case Objective::Balance:
      return m.order_abs(0) < th.balance_order;
    case Objective::Sync:
      return m.order_abs(0) > th.sync_order;
    case Objective::Pattern:
      return (pattern_residuals(s.headings(), c.pattern_order()).array() <
              th.pattern_residual)
          .all();
    case Objective::BlockBalance:
      return (block_orders(s, c.blocks()).array() < th.balance_order).all();
    case Objective::BlockSync:
      return (block_orders(s, c.blocks()).array() > th.sync_order).all();
    case Objective::None:
      break;
  }
  return true;
}

}  // namespace

SwarmState step(const SwarmState& s, const ControlFn& control, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  const Eigen::VectorXd x = s.flatten();
  const double t = s.time;
  const Eigen::VectorXd k1 = closed_loop_rhs(x, t, control);
  const Eigen::VectorXd k2 = closed_loop_rhs(x + 0.5 * dt * k1, t + 0.5 * dt, control);
  const Eigen::VectorXd k3 = closed_loop_rhs(x + 0.5 * dt * k2, t + 0.5 * dt, control);
  const Eigen::VectorXd k4 = closed_loop_rhs(x + dt * k3, t + dt, control);
  const Eigen::VectorXd next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) {
    throw SimulationError("integration produced a non-finite state at t = " +
                          short_number(t + dt) + " s; reduce dt or the gains");
  }
  for (Eigen::Index k = 2; k < next.size(); k += kAgentDim) {
    if (std::abs(next(k)) > kMaxHeadingMagnitude) {
      throw SimulationError("integration diverged at t = " + short_number(t + dt) +
                            " s: heading magnitude exceeds " + short_number(kMaxHeadingMagnitude) +
                            " rad, where doubles no longer resolve angles; reduce dt or the gains");
    }
  }
  return SwarmState::unflatten(next, t + dt);
}

SwarmState step(const SwarmState& s, const Controller& controller, double dt) {
  return step(s, ControlFn([&controller](const SwarmState& x) { return controller.controls(x); }),
              dt);
}

Eigen::VectorXd pattern_residuals(const Eigen::VectorXd& theta, int M) {
  if (M < 1) throw std::invalid_argument("pattern order must be >= 1");
  Eigen::VectorXd res(M);
  for (int m = 1; m <= M; ++m) {
    const double scaled = m * std::abs(order_parameter(theta, m));
    res(m - 1) = m < M ? scaled : 1.0 - scaled;
  }
  return res;
}

SampleMetrics sample_metrics(const SwarmState& s, const Controller& controller, int harmonics) {
  SampleMetrics m;
  const Eigen::VectorXd theta = s.headings();
  m.order_abs.resize(harmonics);
  for (int h = 1; h <= harmonics; ++h) m.order_abs(h - 1) = std::abs(order_parameter(theta, h));

  m.omega_error_max = 0.0;
  m.radius_error_max = kNaN;
  m.circle_residual_max = kNaN;
  for (int k = 0; k < s.size(); ++k) {
    const auto& a = s.agents[k];
    const double omega_d = controller.desired_omega(k);
    if (!std::isnan(omega_d)) {
      m.omega_error_max = std::max(m.omega_error_max, std::abs(a.angular_velocity - omega_d));
    }
    if (const auto target = controller.target_circle(k)) {
      const auto& [center, rho] = *target;
      const double radius_err = std::abs((a.position - center).norm() - rho);
      const double circle_err =
          std::abs(to_complex(a.position) - to_complex(center) +
                   Complex(0.0, rho) * std::polar(1.0, a.heading));
      m.radius_error_max = std::isnan(m.radius_error_max)
                               ? radius_err
                               : std::max(m.radius_error_max, radius_err);
      m.circle_residual_max = std::isnan(m.circle_residual_max)
                                  ? circle_err
                                  : std::max(m.circle_residual_max, circle_err);
    }
  }
  m.centroid = centroid(s);
  m.lyapunov = controller.lyapunov(s);
  return m;
}

LyapunovSeries lyapunov_series(const Trajectory& traj, const Controller& controller) {
  LyapunovSeries out;
  out.values.reserve(traj.states.size());
  for (const auto& s : traj.states) out.values.push_back(controller.lyapunov(s));
  for (std::size_t i = 1; i < out.values.size(); ++i) {
    const double prev = out.values[i - 1];
    if (out.values[i] - prev > kLyapunovTolerance * (1.0 + std::abs(prev))) ++out.violations;
  }
  return out;
}

RunResult simulate(const SwarmState& initial, const Controller& controller,
                   const IntegrationSettings& settings, const Thresholds& thresholds) {
  if (!(settings.dt > 0)) throw std::invalid_argument("dt must be positive");
  if (!(settings.t_end >= 0)) throw std::invalid_argument("t_end must be non-negative");
  if (settings.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (initial.size() != controller.graph().size()) {
    throw std::invalid_argument("initial state size does not match the interaction graph");
  }

  RunResult result;
  Trajectory& traj = result.trajectory;
  traj.harmonics = std::max(controller.pattern_order(), 2);
  const auto n_steps = static_cast<long long>(std::llround(settings.t_end / settings.dt));

  const ControlFn control = [&controller](const SwarmState& x) { return controller.controls(x); };
  auto record = [&](const SwarmState& s) {
    traj.times.push_back(s.time);
    traj.states.push_back(s);
    traj.controls.push_back(controller.controls(s));
    traj.metrics.push_back(sample_metrics(s, controller, traj.harmonics));
  };

  SwarmState s = initial;
  s.time = 0.0;
  record(s);
  const bool monitor = controller.has_lyapunov();
  double v_prev = monitor ? controller.lyapunov(s) : 0.0;
  int violations = 0;
  for (long long i = 1; i <= n_steps; ++i) {
    s = step(s, control, settings.dt);
    // Index-based time keeps sample instants free of accumulated rounding.
    s.time = static_cast<double>(i) * settings.dt;
    if (monitor) {
      const double v = controller.lyapunov(s);
      if (v - v_prev > kLyapunovTolerance * (1.0 + std::abs(v_prev))) ++violations;
      v_prev = v;
    }
    if (i % settings.record_every == 0 || i == n_steps) record(s);
  }

  ConvergenceReport& rep = result.report;
  rep.lyapunov_violations = violations;
  rep.warnings = controller.warnings();

  const double t_final = traj.times.back();
  const double window_start = t_final * (1.0 - thresholds.window_fraction);
  std::optional<std::size_t> first_ok;
  for (std::size_t i = traj.states.size(); i-- > 0;) {
    if (!sample_converged(traj.states[i], traj.metrics[i], controller, thresholds)) break;
    first_ok = i;
  }
  if (first_ok) {
    rep.t_converged = traj.times[*first_ok];
    rep.converged = *rep.t_converged <= window_start;
  }

  const SwarmState& last = traj.states.back();
  const SampleMetrics& lm = traj.metrics.back();
  rep.final.order_abs = lm.order_abs(0);
  rep.final.omega_error_max = lm.omega_error_max;
  if (!std::isnan(lm.radius_error_max)) {
    rep.final.radius_error_max = lm.radius_error_max;
    rep.final.circle_residual_max = lm.circle_residual_max;
  }
  if (std::holds_alternative<CommonCircleLaw>(controller.config().law) ||
      std::holds_alternative<PatternLaw>(controller.config().law)) {
    rep.final.centroid_distance = (lm.centroid - controller.target_circle(0)->first).norm();
  }
  rep.final.pattern_residuals = pattern_residuals(last.headings(), controller.pattern_order());
  rep.final.block_order_abs = block_orders(last, controller.blocks());
  return result;
}

}  // namespace circmotion
