#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "circmotion/potentials.hpp"
#include "circmotion/simulator.hpp"
#include "test_support.hpp"

using namespace circmotion;
using circmotion::testing::example1_state;
using circmotion::testing::kPi;
using circmotion::testing::on_circle;
using circmotion::testing::pattern_phases;
using circmotion::testing::ring6;

namespace {

const ControlFn kZeroControl = [](const SwarmState& s) { return Eigen::VectorXd::Zero(s.size()); };

SwarmState single_agent(double heading, double omega) {
  const std::vector<Eigen::Vector2d> pos{{1.5, -2.0}};
  return SwarmState::from_arrays(pos, Eigen::VectorXd::Constant(1, heading),
                                 Eigen::VectorXd::Constant(1, omega));
}

// Exact open-loop position: r(t) = r0 + (e^{i(theta0 + omega t)} - e^{i theta0}) / (i omega).
Complex open_loop_position(const AgentState& a0, double t) {
  const Complex i(0, 1);
  return to_complex(a0.position) +
         (std::polar(1.0, a0.heading + a0.angular_velocity * t) - std::polar(1.0, a0.heading)) /
             (i * a0.angular_velocity);
}

SwarmState integrate(SwarmState s, const ControlFn& control, double dt, int steps) {
  for (int i = 0; i < steps; ++i) s = step(s, control, dt);
  return s;
}

Controller balance_controller() {
  return Controller({IndividualLaw{.mode = PhaseMode::Balance, .K = 1.0, .omega_d = 0.2}}, ring6());
}

}  // namespace

TEST(Step, OpenLoopAgentCompletesOnePeriod) {
  const double omega = 0.2;
  const double period = 2 * kPi / omega;
  const SwarmState s0 = single_agent(0.4, omega);
  const int whole = static_cast<int>(period / 0.01);
  SwarmState s = integrate(s0, kZeroControl, 0.01, whole);
  s = step(s, kZeroControl, period - whole * 0.01);
  EXPECT_NEAR(s.time, period, 1e-9);
  EXPECT_LE((s.agents[0].position - s0.agents[0].position).norm(), 1e-5);
  EXPECT_NEAR(s.agents[0].heading, 0.4 + 2 * kPi, 1e-9);
  EXPECT_EQ(s.agents[0].angular_velocity, omega);
}

TEST(Step, OpenLoopErrorShrinksWithFourthOrder) {
  const SwarmState s0 = single_agent(0.3, 0.7);
  const double t_end = 10.0;
  double prev_err = 0;
  for (int level = 0; level < 4; ++level) {
    const int steps = 20 << level;
    const SwarmState s = integrate(s0, kZeroControl, t_end / steps, steps);
    const double err = std::abs(to_complex(s.agents[0].position) -
                                open_loop_position(s0.agents[0], t_end));
    if (level > 0) {
      EXPECT_GE(std::log2(prev_err / err), 3.8) << "level " << level;
    }
    prev_err = err;
  }
}

TEST(Step, ClosedLoopSelfConvergenceIsFourthOrder) {
  // Richardson-style estimate on the nonlinear closed loop.
  const Controller c = balance_controller();
  const double t_end = 5.0;
  Eigen::VectorXd x[3];
  for (int level = 0; level < 3; ++level) {
    const int steps = 50 << level;
    SwarmState s = example1_state();
    for (int i = 0; i < steps; ++i) s = step(s, c, t_end / steps);
    x[level] = s.flatten();
  }
  const double order = std::log2((x[0] - x[1]).norm() / (x[1] - x[2]).norm());
  EXPECT_GE(order, 3.8);
}

TEST(Step, RejectsNonPositiveStep) {
  EXPECT_THROW(step(example1_state(), kZeroControl, 0.0), std::invalid_argument);
  EXPECT_THROW(step(example1_state(), kZeroControl, -0.01), std::invalid_argument);
}

TEST(Step, NonFiniteControlAborts) {
  const ControlFn nan_control = [](const SwarmState& s) {
    return Eigen::VectorXd::Constant(s.size(), std::numeric_limits<double>::quiet_NaN());
  };
  EXPECT_ANY_THROW(step(example1_state(), nan_control, 0.01));
}

TEST(Step, RunawayHeadingAborts) {
  const ControlFn huge = [](const SwarmState& s) { return Eigen::VectorXd::Constant(s.size(), 1e300); };
  SwarmState s = example1_state();
  EXPECT_THROW(
      {
        for (int i = 0; i < 10; ++i) s = step(s, huge, 0.01);
      },
      SimulationError);
}

TEST(Simulate, HugeStepDivergesWithSimulationError) {
  EXPECT_THROW(simulate(example1_state(), balance_controller(), {.dt = 10.0, .t_end = 2000.0}),
               SimulationError);
}

TEST(Simulate, OpenLoopAgentsStayOnTheirInitialCircles) {
  const SwarmState s0 = example1_state();
  const Controller open({OpenLoopLaw{}}, ring6());
  const RunResult r = simulate(s0, open, {.dt = 0.01, .t_end = 200.0, .record_every = 10});
  const Complex i(0, 1);
  for (const SwarmState& s : r.trajectory.states) {
    for (int k = 0; k < s.size(); ++k) {
      const AgentState& a0 = s0.agents[k];
      const Complex center = to_complex(a0.position) + i * std::polar(1.0, a0.heading) / a0.angular_velocity;
      const double radius = std::abs(to_complex(s.agents[k].position) - center);
      EXPECT_NEAR(radius, 1.0 / std::abs(a0.angular_velocity), 1e-4);
    }
  }
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.lyapunov_violations, 0);
}

TEST(Simulate, UnitSpeedIsPreserved) {
  const RunResult r =
      simulate(example1_state(), balance_controller(), {.dt = 0.01, .t_end = 20.0, .record_every = 1});
  const auto& states = r.trajectory.states;
  for (std::size_t j = 1; j < states.size(); ++j) {
    for (int k = 0; k < 6; ++k) {
      // A unit-speed path covers a chord no longer than its arc length dt.
      const double chord = (states[j].agents[k].position - states[j - 1].agents[k].position).norm();
      EXPECT_LE(chord, 0.01 * (1 + 1e-9));
      EXPECT_GE(chord, 0.01 * (1 - 1e-3));
    }
  }
}

TEST(Simulate, IsDeterministic) {
  const IntegrationSettings settings{.dt = 0.01, .t_end = 30.0, .record_every = 7};
  const RunResult a = simulate(example1_state(), balance_controller(), settings);
  const RunResult b = simulate(example1_state(), balance_controller(), settings);
  ASSERT_EQ(a.trajectory.states.size(), b.trajectory.states.size());
  for (std::size_t j = 0; j < a.trajectory.states.size(); ++j) {
    EXPECT_EQ(a.trajectory.states[j], b.trajectory.states[j]);
    EXPECT_EQ(a.trajectory.controls[j], b.trajectory.controls[j]);
  }
  EXPECT_EQ(a.report.t_converged, b.report.t_converged);
}

TEST(Simulate, ZeroDurationRecordsOnlyTheInitialState) {
  const RunResult r = simulate(example1_state(), balance_controller(), {.dt = 0.01, .t_end = 0.0});
  ASSERT_EQ(r.trajectory.states.size(), 1u);
  EXPECT_EQ(r.trajectory.states[0], example1_state());
  EXPECT_EQ(r.trajectory.times[0], 0.0);
  EXPECT_EQ(r.report.lyapunov_violations, 0);
}

TEST(Simulate, RecordsEveryNthStepAndTheLastOne) {
  const RunResult r =
      simulate(example1_state(), balance_controller(), {.dt = 0.01, .t_end = 1.05, .record_every = 10});
  // Steps 0, 10, ..., 100 and the final step 105.
  ASSERT_EQ(r.trajectory.times.size(), 12u);
  EXPECT_DOUBLE_EQ(r.trajectory.times[1], 0.1);
  EXPECT_DOUBLE_EQ(r.trajectory.times.back(), 1.05);
  EXPECT_EQ(r.trajectory.harmonics, 2);
}

TEST(Simulate, RejectsBadSettings) {
  const Controller c = balance_controller();
  EXPECT_THROW(simulate(example1_state(), c, {.dt = 0.0}), std::invalid_argument);
  EXPECT_THROW(simulate(example1_state(), c, {.dt = 0.01, .t_end = -1.0}), std::invalid_argument);
  EXPECT_THROW(simulate(example1_state(), c, {.dt = 0.01, .t_end = 1.0, .record_every = 0}),
               std::invalid_argument);
  const std::vector<Eigen::Vector2d> pos{{0, 0}};
  const SwarmState one = SwarmState::from_arrays(pos, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
  EXPECT_THROW(simulate(one, c, {.dt = 0.01, .t_end = 1.0}), std::invalid_argument);
}

TEST(Simulate, BalancingRingConvergesWithMonotoneComposite) {
  const RunResult r =
      simulate(example1_state(), balance_controller(), {.dt = 0.01, .t_end = 200.0, .record_every = 10});
  EXPECT_TRUE(r.report.converged);
  ASSERT_TRUE(r.report.t_converged.has_value());
  EXPECT_GT(*r.report.t_converged, 5.0);
  EXPECT_LT(*r.report.t_converged, 60.0);
  EXPECT_EQ(r.report.lyapunov_violations, 0);
  EXPECT_LT(r.report.final.order_abs, 1e-2);
  EXPECT_LT(r.report.final.omega_error_max, 1e-3);
  const LyapunovSeries series = lyapunov_series(r.trajectory, balance_controller());
  EXPECT_EQ(series.violations, 0);
  EXPECT_LT(series.values.back(), 1e-6 * series.values.front());
}

TEST(Simulate, WrongSignGainIsFlaggedByTheMonitor) {
  const Controller wrong({IndividualLaw{.mode = PhaseMode::Balance, .K = -1.0, .omega_d = 0.2}},
                         ring6(), false);
  const RunResult r = simulate(example1_state(), wrong, {.dt = 0.01, .t_end = 20.0, .record_every = 100});
  EXPECT_GT(r.report.lyapunov_violations, 0);
}

TEST(Simulate, CircleTargetAtEquilibriumStaysPut) {
  const Eigen::Vector2d center(20, 5);
  const Controller c({CommonCircleLaw{.K = -1.0, .kappa = 0.1, .omega_d = 0.2, .center = center}},
                     ring6());
  const SwarmState s0 = on_circle(Eigen::VectorXd::Constant(6, 0.7), 0.2, center);
  const RunResult r = simulate(s0, c, {.dt = 0.01, .t_end = 50.0, .record_every = 100});
  EXPECT_TRUE(r.report.converged);
  ASSERT_TRUE(r.report.final.circle_residual_max.has_value());
  EXPECT_LT(*r.report.final.circle_residual_max, 1e-8);
  // Synchronized agents share one point of the circle, one radius from its centre.
  ASSERT_TRUE(r.report.final.centroid_distance.has_value());
  EXPECT_NEAR(*r.report.final.centroid_distance, 5.0, 1e-8);

  const Controller bal({CommonCircleLaw{.K = 0.5, .kappa = 0.1, .omega_d = 0.2, .center = center}},
                       ring6());
  const Eigen::VectorXd alternating = (Eigen::VectorXd(6) << 0, kPi, 0, kPi, 0, kPi).finished();
  const RunResult rb = simulate(on_circle(alternating, 0.2, center), bal,
                                {.dt = 0.01, .t_end = 50.0, .record_every = 100});
  EXPECT_TRUE(rb.report.converged);
  ASSERT_TRUE(rb.report.final.centroid_distance.has_value());
  EXPECT_LT(*rb.report.final.centroid_distance, 1e-8);
}

TEST(PatternResiduals, SplayStateHasZeroResiduals) {
  const Eigen::VectorXd res = pattern_residuals(pattern_phases(6, 6), 6);
  ASSERT_EQ(res.size(), 6);
  EXPECT_LE(res.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PatternResiduals, SynchronizedStateIsTheOrderOnePattern) {
  const Eigen::VectorXd sync = Eigen::VectorXd::Constant(6, 1.1);
  EXPECT_NEAR(pattern_residuals(sync, 1)(0), 0.0, 1e-15);
  // As an order-two candidate the first harmonic is maximal, so it fails.
  const Eigen::VectorXd res2 = pattern_residuals(sync, 2);
  EXPECT_NEAR(res2(0), 1.0, 1e-15);
  EXPECT_NEAR(res2(1), 1.0 - 2.0 * 0.5, 1e-15);
}

TEST(PatternResiduals, TwoClusterPattern) {
  const Eigen::VectorXd res = pattern_residuals(pattern_phases(6, 2), 2);
  EXPECT_LE(res.cwiseAbs().maxCoeff(), 1e-12);
  // The same phases read as a splay candidate leave |2 p_2| = 1.
  const Eigen::VectorXd as_splay = pattern_residuals(pattern_phases(6, 2), 6);
  EXPECT_NEAR(as_splay(1), 1.0, 1e-12);
  EXPECT_THROW(pattern_residuals(pattern_phases(6, 2), 0), std::invalid_argument);
}
