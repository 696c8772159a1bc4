#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "circmotion/agent.hpp"
#include "test_support.hpp"

using namespace circmotion;
using circmotion::testing::example1_state;
using circmotion::testing::kPi;

TEST(Agent, InnerProductIsPlanarDot) {
  EXPECT_DOUBLE_EQ(inner(Complex(1, 2), Complex(3, -4)), 1 * 3 + 2 * -4);
  // <i e^{i t}, e^{i t}> = 0
  const Complex e = std::polar(1.0, 0.7);
  EXPECT_NEAR(inner(Complex(0, 1) * e, e), 0.0, 1e-15);
}

TEST(Agent, FlattenRoundTripIsExact) {
  const SwarmState s = example1_state();
  const Eigen::VectorXd flat = s.flatten();
  ASSERT_EQ(flat.size(), 6 * kAgentDim);
  EXPECT_EQ(flat(0), 1.0);
  EXPECT_EQ(flat(1), -1.0);
  EXPECT_DOUBLE_EQ(flat(2), 30 * kPi / 180);
  EXPECT_EQ(flat(3), 0.2);
  const SwarmState back = SwarmState::unflatten(flat, s.time);
  EXPECT_EQ(back, s);
}

TEST(Agent, UnflattenRejectsBadLength) {
  EXPECT_THROW(SwarmState::unflatten(Eigen::VectorXd::Zero(7), 0.0), std::invalid_argument);
}

TEST(Agent, FromArraysRejectsMismatchedLengths) {
  const std::vector<Eigen::Vector2d> pos{{0, 0}, {1, 1}};
  EXPECT_THROW(SwarmState::from_arrays(pos, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)),
               std::invalid_argument);
  EXPECT_THROW(SwarmState::from_arrays({}, Eigen::VectorXd(), Eigen::VectorXd()),
               std::invalid_argument);
}

TEST(Agent, DerivativeIsUnitSpeedRotation) {
  const SwarmState s = example1_state();
  Eigen::VectorXd u(6);
  u << 1, 2, 3, 4, 5, 6;
  const SwarmDerivative d = derivative(s, u);
  for (int k = 0; k < 6; ++k) {
    EXPECT_NEAR(d.d_position.col(k).norm(), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(d.d_position(0, k), std::cos(s.agents[k].heading));
    EXPECT_DOUBLE_EQ(d.d_position(1, k), std::sin(s.agents[k].heading));
    EXPECT_EQ(d.d_heading(k), s.agents[k].angular_velocity);
    EXPECT_EQ(d.d_angular_velocity(k), u(k));
  }
  const Eigen::VectorXd flat = d.flatten();
  EXPECT_EQ(flat(2), s.agents[0].angular_velocity);
  EXPECT_EQ(flat(3), 1.0);
}

TEST(Agent, DerivativeValidatesControls) {
  const SwarmState s = example1_state();
  EXPECT_THROW(derivative(s, Eigen::VectorXd::Zero(5)), std::invalid_argument);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(6);
  u(2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(derivative(s, u), std::invalid_argument);
}

TEST(Agent, CentroidOfExampleState) {
  // Mean of the six initial positions.
  const Eigen::Vector2d c = centroid(example1_state());
  EXPECT_NEAR(c.x(), 13.0 / 6.0, 1e-15);
  EXPECT_NEAR(c.y(), 13.0 / 6.0, 1e-15);
}

TEST(Agent, ComplexAccessorsMatchFields) {
  const SwarmState s = example1_state();
  const Eigen::VectorXcd z = s.positions();
  for (int k = 0; k < s.size(); ++k) {
    EXPECT_EQ(z(k), to_complex(s.agents[k].position));
    EXPECT_EQ(to_point(z(k)), s.agents[k].position);
    EXPECT_EQ(s.headings()(k), s.agents[k].heading);
    EXPECT_EQ(s.angular_velocities()(k), s.agents[k].angular_velocity);
  }
}
