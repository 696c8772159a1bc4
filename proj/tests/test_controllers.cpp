#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "circmotion/controllers.hpp"
#include "test_support.hpp"

using namespace circmotion;
using circmotion::testing::blocks12;
using circmotion::testing::example1_state;
using circmotion::testing::kPi;
using circmotion::testing::on_circle;
using circmotion::testing::pattern_phases;
using circmotion::testing::random_state;
using circmotion::testing::ring6;

namespace {

const Eigen::Vector2d kCenter(20, 5);

const Partition kBlocks{{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10, 11}};

Eigen::VectorXd alternating6() {
  return (Eigen::VectorXd(6) << 0, kPi, 0, kPi, 0, kPi).finished();
}

SwarmState rotate_about(const SwarmState& s, const Eigen::Vector2d& c, double angle) {
  const Eigen::Rotation2Dd rot(angle);
  SwarmState out = s;
  for (auto& a : out.agents) {
    a.position = c + rot * (a.position - c);
    a.heading += angle;
  }
  return out;
}

// Rate of change of the controller's composite along the closed-loop vector
// field, by central differences in the flow direction.
double composite_rate(const Controller& c, const SwarmState& s) {
  const Eigen::VectorXd x = s.flatten();
  const Eigen::VectorXd f = derivative(s, c.controls(s)).flatten();
  const double eps = 1e-6;
  const double up = c.lyapunov(SwarmState::unflatten(x + eps * f, 0.0));
  const double down = c.lyapunov(SwarmState::unflatten(x - eps * f, 0.0));
  return (up - down) / (2 * eps);
}

double omega_error_sq(const SwarmState& s, double omega_d) {
  return (s.angular_velocities().array() - omega_d).square().sum();
}

}  // namespace

TEST(IndividualLaw, EquilibriumAtBalancedAndSynchronizedStates) {
  const auto g = ring6();
  SwarmState balanced = on_circle(alternating6(), 0.2, kCenter);
  EXPECT_LE(u_individual(balanced, g, 1.0, 0.2, PhaseMode::Balance).cwiseAbs().maxCoeff(), 1e-12);
  SwarmState sync = on_circle(Eigen::VectorXd::Constant(6, 1.0), 0.2, kCenter);
  EXPECT_LE(u_individual(sync, g, -1.0, 0.2, PhaseMode::Sync).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IndividualLaw, TwoAgentLineBalancedPairGivesZeroControl) {
  const std::vector<Edge> e{{0, 1}};
  const auto g = InteractionGraph::from_edges(2, e);
  const std::vector<Eigen::Vector2d> pos{{0, 0}, {3, 1}};
  const SwarmState s = SwarmState::from_arrays(pos, (Eigen::VectorXd(2) << 0, kPi).finished(),
                                               Eigen::VectorXd::Constant(2, 0.2));
  EXPECT_LE(u_individual(s, g, 1.0, 0.2, PhaseMode::Balance).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(IndividualLaw, SixAgentInitialControlsMatchHandEvaluation) {
  // u_k = -K((omega_k - 0.2) - c_k) with c_k = -sum_{j in N_k} sin(theta_j - theta_k).
  const SwarmState s = example1_state();
  const Eigen::VectorXd u = u_individual(s, ring6(), 1.0, 0.2, PhaseMode::Balance);
  const Eigen::VectorXd th = s.headings();
  for (int k = 0; k < 6; ++k) {
    const int prev = (k + 5) % 6, next = (k + 1) % 6;
    const double c = -std::sin(th(prev) - th(k)) - std::sin(th(next) - th(k));
    EXPECT_NEAR(u(k), -((s.agents[k].angular_velocity - 0.2) - c), 1e-14);
  }
  // Agent 1: omega error 0, neighbours at 60 and 45 degrees from 30 degrees.
  EXPECT_NEAR(u(0), -std::sin(kPi / 6) - std::sin(kPi / 12), 1e-14);
}

TEST(IndividualLaw, RejectsWrongGainSigns) {
  const SwarmState s = example1_state();
  EXPECT_THROW(u_individual(s, ring6(), -1.0, 0.2, PhaseMode::Balance), std::invalid_argument);
  EXPECT_THROW(u_individual(s, ring6(), 1.0, 0.2, PhaseMode::Sync), std::invalid_argument);
  EXPECT_THROW(validate({IndividualLaw{.mode = PhaseMode::Sync, .K = 1.0}}, ring6()),
               std::invalid_argument);
  // Individual circles accept either sign of Omega_d.
  EXPECT_NO_THROW(u_individual(s, ring6(), 1.0, -0.2, PhaseMode::Balance));
}

TEST(CommonCircleLaw, EquilibriumOnCircle) {
  const auto g = ring6();
  const SwarmState balanced = on_circle(alternating6(), 0.2, kCenter);
  EXPECT_LE(u_common_circle(balanced, g, 0.5, 0.1, 0.2, kCenter).cwiseAbs().maxCoeff(), 1e-12);
  const SwarmState sync = on_circle(Eigen::VectorXd::Constant(6, -0.4), 0.2, kCenter);
  EXPECT_LE(u_common_circle(sync, g, -1.0, 0.1, 0.2, kCenter).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CommonCircleLaw, RejectsNonPositiveKappaAndOmega) {
  const SwarmState s = example1_state();
  EXPECT_THROW(u_common_circle(s, ring6(), 1.0, 0.0, 0.2, kCenter), std::invalid_argument);
  EXPECT_THROW(u_common_circle(s, ring6(), 1.0, 0.1, -0.2, kCenter), std::invalid_argument);
  EXPECT_THROW(u_common_circle(s, ring6(), 0.0, 0.1, 0.2, kCenter), std::invalid_argument);
}

TEST(PatternLaw, EquilibriumAtIdealPatterns) {
  const auto g = ring6();
  for (int M : {1, 2, 3, 6}) {
    std::vector<double> gains(M, 0.1);
    gains.back() = -0.5;
    const SwarmState s = on_circle(pattern_phases(6, M), 0.2, kCenter);
    for (auto w : {PatternWeighting::Coupling, PatternWeighting::Potential}) {
      EXPECT_LE(u_pattern(s, g, 1.0, 0.1, 0.2, kCenter, gains, w).cwiseAbs().maxCoeff(), 1e-12)
          << "M = " << M;
    }
  }
}

TEST(PatternLaw, RejectsNonDivisorOrderAndWrongSigns) {
  const SwarmState s = example1_state();
  const auto g = ring6();
  const std::vector<double> four{0.1, 0.1, 0.1, -0.5};
  const std::vector<double> positive_last{0.1, 0.5};
  const std::vector<double> negative_first{-0.1, -0.5};
  EXPECT_THROW(u_pattern(s, g, 1.0, 0.1, 0.2, kCenter, four), std::invalid_argument);
  EXPECT_THROW(u_pattern(s, g, 1.0, 0.1, 0.2, kCenter, positive_last), std::invalid_argument);
  EXPECT_THROW(u_pattern(s, g, 1.0, 0.1, 0.2, kCenter, negative_first), std::invalid_argument);
  const std::vector<double> ok{0.1, -0.5};
  EXPECT_THROW(u_pattern(s, g, -1.0, 0.1, 0.2, kCenter, ok), std::invalid_argument);
}

TEST(PatternLaw, OrderOneReducesToCommonCircleSync) {
  std::mt19937_64 gen(41);
  const auto g = ring6();
  const double K = 1.0, K1 = -0.5;
  const std::vector<double> gains{K1};
  for (int trial = 0; trial < 100; ++trial) {
    const SwarmState s = random_state(gen, 6);
    const Eigen::VectorXd a = u_pattern(s, g, K, 0.1, 0.2, kCenter, gains);
    const Eigen::VectorXd b = u_common_circle(s, g, K * K1, 0.1, 0.2, kCenter);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(SubgroupLaw, SingleBlockMatchesCommonCircle) {
  std::mt19937_64 gen(43);
  const auto g = ring6();
  const Partition one{{0, 1, 2, 3, 4, 5}};
  const std::vector<double> omega{0.2};
  const std::vector<Eigen::Vector2d> centers{kCenter};
  for (int trial = 0; trial < 100; ++trial) {
    const SwarmState s = random_state(gen, 6);
    const Eigen::VectorXd a = u_subgroup(s, g, one, -1.0, 0.5, omega, centers);
    const Eigen::VectorXd b = u_common_circle(s, g, -1.0, 0.5, 0.2, kCenter);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(SubgroupLaw, EachBlockAtItsOwnEquilibrium) {
  const auto g = blocks12();
  const std::vector<double> omega{1.0 / 3, 0.25, 0.2};
  const std::vector<Eigen::Vector2d> centers{{-15, 0}, {0, 15}, {15, 0}};
  SwarmState s;
  for (int b = 0; b < 3; ++b) {
    const SwarmState part = on_circle(Eigen::VectorXd::Constant(4, 0.3 * b), omega[b], centers[b]);
    s.agents.insert(s.agents.end(), part.agents.begin(), part.agents.end());
  }
  EXPECT_LE(u_subgroup(s, g, kBlocks, -1.0, 0.5, omega, centers).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SubgroupLaw, RejectsBadPartitions) {
  const auto g = blocks12();
  const SwarmState s = on_circle(Eigen::VectorXd::Zero(12), 0.2, kCenter);
  const std::vector<double> omega{0.2, 0.2, 0.2};
  const std::vector<Eigen::Vector2d> centers(3, kCenter);
  const Partition overlapping{{0, 1, 2, 3}, {3, 4, 5, 6, 7}, {8, 9, 10, 11}};
  const Partition missing{{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10}};
  const Partition crossing{{0, 1, 2, 4}, {3, 5, 6, 7}, {8, 9, 10, 11}};
  EXPECT_THROW(u_subgroup(s, g, overlapping, -1, 0.5, omega, centers), std::invalid_argument);
  EXPECT_THROW(u_subgroup(s, g, missing, -1, 0.5, omega, centers), std::invalid_argument);
  EXPECT_THROW(u_subgroup(s, g, crossing, -1, 0.5, omega, centers), std::invalid_argument);
  const std::vector<double> two{0.2, 0.2};
  EXPECT_THROW(u_subgroup(s, g, kBlocks, -1, 0.5, two, centers), std::invalid_argument);
}

TEST(MultiLevelLaw, EdgelessIntraGraphReducesToSubgroup) {
  std::mt19937_64 gen(47);
  const auto g = blocks12();
  const auto empty = InteractionGraph::from_edges(12, {});
  const std::vector<Eigen::Vector2d> centers{{-15, 0}, {0, 15}, {15, 0}};
  const std::vector<double> omega(3, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    const SwarmState s = random_state(gen, 12);
    const Eigen::VectorXd a = u_multilevel(s, g, empty, kBlocks, -1.0, 0.5, 0.2, centers);
    const Eigen::VectorXd b = u_subgroup(s, g, kBlocks, -1.0, 0.5, omega, centers);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(MultiLevelLaw, CombinedCouplingIsSumOfSeparateCouplings) {
  std::mt19937_64 gen(53);
  const auto g = blocks12();
  const auto all = InteractionGraph::complete(12);
  const auto empty = InteractionGraph::from_edges(12, {});
  const std::vector<Eigen::Vector2d> centers{{-15, 0}, {0, 15}, {15, 0}};
  const double K = -1.0, omega = 0.2;
  for (int trial = 0; trial < 50; ++trial) {
    const SwarmState s = random_state(gen, 12);
    const Eigen::VectorXd both = u_multilevel(s, g, all, kBlocks, K, 0.5, omega, centers);
    const Eigen::VectorXd inter_only = u_multilevel(s, g, empty, kBlocks, K, 0.5, omega, centers);
    const Eigen::VectorXd intra_term = omega * omega * K * phase_coupling(s.headings(), all, 1);
    EXPECT_LE((both - inter_only - intra_term).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(MultiLevelLaw, RejectsDifferentRadii) {
  const ControllerConfig cfg{MultiLevelLaw{.K = -1,
                                           .kappa = 0.5,
                                           .omega_d = {0.2, 0.25, 0.2},
                                           .centers = {{0, 0}, {0, 0}, {0, 0}},
                                           .blocks = kBlocks}};
  EXPECT_THROW(validate(cfg, blocks12()), std::invalid_argument);
}

TEST(ControllerProperty, RotationInvariance) {
  std::mt19937_64 gen(59);
  const auto g = ring6();
  const std::vector<double> gains{0.1, 0.1, -0.5};
  const std::vector<ControllerConfig> configs{
      {IndividualLaw{.mode = PhaseMode::Balance, .K = 1.0, .omega_d = 0.2}},
      {IndividualLaw{.mode = PhaseMode::Sync, .K = -1.0, .omega_d = 0.2}},
      {CommonCircleLaw{.K = 0.5, .kappa = 0.1, .omega_d = 0.2, .center = kCenter}},
      {CommonCircleLaw{.K = -1.0, .kappa = 0.1, .omega_d = 0.2, .center = kCenter}},
      {PatternLaw{.K = 1.0, .kappa = 0.1, .omega_d = 0.2, .center = kCenter, .gains = gains}}};
  for (const auto& cfg : configs) {
    const Controller c(cfg, g);
    for (int trial = 0; trial < 50; ++trial) {
      const SwarmState s = random_state(gen, 6);
      const SwarmState r = rotate_about(s, kCenter, 0.1 + trial * 0.37);
      EXPECT_LE((c.controls(s) - c.controls(r)).cwiseAbs().maxCoeff(), 1e-10)
          << law_name(cfg.law);
    }
  }
}

TEST(ControllerProperty, HeadingShiftByTwoPiLeavesControlsUnchanged) {
  std::mt19937_64 gen(61);
  const Controller c({CommonCircleLaw{.K = 0.5, .kappa = 0.1, .omega_d = 0.2, .center = kCenter}},
                     ring6());
  for (int trial = 0; trial < 50; ++trial) {
    const SwarmState s = random_state(gen, 6);
    SwarmState shifted = s;
    shifted.agents[trial % 6].heading += 2 * kPi * (1 + trial % 3);
    EXPECT_LE((c.controls(s) - c.controls(shifted)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Controller, AgreesWithFreeFunctions) {
  std::mt19937_64 gen(67);
  const auto g = ring6();
  const std::vector<double> gains{0.1, -0.5};
  const Controller bal({IndividualLaw{.mode = PhaseMode::Balance, .K = 1.0, .omega_d = 0.2}}, g);
  const Controller cc({CommonCircleLaw{.K = -1.0, .kappa = 0.1, .omega_d = 0.2, .center = kCenter}},
                      g);
  const Controller pat(
      {PatternLaw{.K = 1.0, .kappa = 0.1, .omega_d = 0.2, .center = kCenter, .gains = gains}}, g);
  const std::vector<Eigen::Vector2d> centers{{-15, 0}, {0, 15}, {15, 0}};
  const Controller ml({MultiLevelLaw{.K = -1,
                                     .kappa = 0.5,
                                     .omega_d = {0.2},
                                     .centers = centers,
                                     .blocks = kBlocks}},
                      blocks12());
  for (int trial = 0; trial < 20; ++trial) {
    const SwarmState s = random_state(gen, 6);
    EXPECT_EQ(bal.controls(s), u_individual(s, g, 1.0, 0.2, PhaseMode::Balance));
    EXPECT_EQ(cc.controls(s), u_common_circle(s, g, -1.0, 0.1, 0.2, kCenter));
    EXPECT_EQ(pat.controls(s), u_pattern(s, g, 1.0, 0.1, 0.2, kCenter, gains));
    const SwarmState s12 = random_state(gen, 12);
    EXPECT_LE((ml.controls(s12) - u_multilevel(s12, blocks12(), InteractionGraph::complete(12),
                                               kBlocks, -1, 0.5, 0.2, centers))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-13);
  }
}

TEST(Controller, SaturationClampsSymmetrically) {
  const SwarmState s = example1_state();
  ControllerConfig cfg{IndividualLaw{.mode = PhaseMode::Balance, .K = 1.0, .omega_d = 0.2}};
  const Eigen::VectorXd raw = Controller(cfg, ring6()).controls(s);
  cfg.saturation = 0.1;
  const Eigen::VectorXd clamped = Controller(cfg, ring6()).controls(s);
  for (int k = 0; k < 6; ++k) {
    EXPECT_LE(std::abs(clamped(k)), 0.1);
    if (std::abs(raw(k)) <= 0.1) EXPECT_EQ(clamped(k), raw(k));
  }
  cfg.saturation = 0.0;
  EXPECT_THROW(Controller(cfg, ring6()), std::invalid_argument);
}

TEST(Controller, WarnsForNonCirculantBalancingGraphs) {
  const std::vector<Edge> path{{0, 1}, {1, 2}, {2, 3}};
  const auto g = InteractionGraph::from_edges(4, path);
  const Controller bal({IndividualLaw{.mode = PhaseMode::Balance, .K = 1.0, .omega_d = 0.2}}, g);
  EXPECT_FALSE(bal.warnings().empty());
  const Controller sync({IndividualLaw{.mode = PhaseMode::Sync, .K = -1.0, .omega_d = 0.2}}, g);
  EXPECT_TRUE(sync.warnings().empty());
  const std::vector<double> triangles{2, 0, -1, 0, -1, 0};
  const Controller split({IndividualLaw{.mode = PhaseMode::Sync, .K = -1.0, .omega_d = 0.2}},
                         InteractionGraph::from_circulant_row(triangles));
  EXPECT_FALSE(split.warnings().empty());
}

TEST(ControllerProperty, MatchedCompositeDescendsAtTheDerivedRate) {
  // Individual laws: dV/dt = -|K| sum (omega - Omega)^2.
  // Circle laws: dV/dt = -kappa rho^4 sum (omega - Omega)^2.
  std::mt19937_64 gen(71);
  const auto g = ring6();
  const double rho4 = std::pow(5.0, 4);
  struct Case {
    ControllerConfig cfg;
    double rate_gain;
  };
  const std::vector<double> gains3{0.1, 0.1, -0.5};
  const std::vector<double> gains6{0.1, 0.1, 0.1, 0.1, 0.1, -0.5};
  const std::vector<Case> cases{
      {{IndividualLaw{.mode = PhaseMode::Balance, .K = 1.0, .omega_d = 0.2}}, 1.0},
      {{IndividualLaw{.mode = PhaseMode::Sync, .K = -2.0, .omega_d = 0.2}}, 2.0},
      {{CommonCircleLaw{.K = 0.5, .kappa = 0.1, .omega_d = 0.2, .center = kCenter}}, 0.1 * rho4},
      {{CommonCircleLaw{.K = -1.0, .kappa = 0.1, .omega_d = 0.2, .center = kCenter}}, 0.1 * rho4},
      {{PatternLaw{.K = 1.0, .kappa = 0.1, .omega_d = 0.2, .center = kCenter, .gains = gains3}},
       0.1 * rho4},
      {{PatternLaw{.K = 1.0,
                   .kappa = 0.1,
                   .omega_d = 0.2,
                   .center = kCenter,
                   .gains = gains6,
                   .weighting = PatternWeighting::Potential}},
       0.1 * rho4}};
  for (const auto& [cfg, rate_gain] : cases) {
    const Controller c(cfg, g);
    for (int trial = 0; trial < 50; ++trial) {
      const SwarmState s = random_state(gen, 6);
      const double expected = -rate_gain * omega_error_sq(s, 0.2);
      EXPECT_NEAR(composite_rate(c, s), expected, 1e-5 * (1 + std::abs(expected)))
          << law_name(cfg.law);
    }
  }
}

TEST(ControllerProperty, SubgroupAndMultiLevelCompositesDescend) {
  std::mt19937_64 gen(73);
  const auto g = blocks12();
  const std::vector<double> omega{1.0 / 3, 0.25, 0.2};
  const std::vector<Eigen::Vector2d> centers{{-15, 0}, {0, 15}, {15, 0}};
  const Controller sub({SubgroupLaw{.K = -1.0,
                                    .kappa = 0.5,
                                    .omega_d = omega,
                                    .centers = centers,
                                    .blocks = kBlocks}},
                       g);
  const Controller ml({MultiLevelLaw{.K = -1.0,
                                     .kappa = 0.5,
                                     .omega_d = {0.2},
                                     .centers = centers,
                                     .blocks = kBlocks}},
                      g);
  const Controller ml_bal({MultiLevelLaw{.K = 1.0,
                                         .kappa = 0.5,
                                         .omega_d = {0.2},
                                         .centers = centers,
                                         .blocks = kBlocks}},
                          g);
  for (int trial = 0; trial < 50; ++trial) {
    const SwarmState s = random_state(gen, 12);
    double expected_sub = 0.0;
    for (int b = 0; b < 3; ++b) {
      for (int k : kBlocks[b]) {
        const double e = s.agents[k].angular_velocity - omega[b];
        expected_sub -= 0.5 * std::pow(1.0 / omega[b], 4) * e * e;
      }
    }
    EXPECT_NEAR(composite_rate(sub, s), expected_sub, 1e-5 * (1 + std::abs(expected_sub)));
    const double expected_ml = -0.5 * std::pow(5.0, 4) * omega_error_sq(s, 0.2);
    EXPECT_NEAR(composite_rate(ml, s), expected_ml, 1e-5 * (1 + std::abs(expected_ml)));
    EXPECT_NEAR(composite_rate(ml_bal, s), expected_ml, 1e-5 * (1 + std::abs(expected_ml)));
  }
}

TEST(Controller, ObjectivesAndTargets) {
  const auto g = ring6();
  const Controller bal({IndividualLaw{.mode = PhaseMode::Balance, .K = 1.0, .omega_d = 0.2}}, g);
  EXPECT_EQ(bal.objective(), Objective::Balance);
  EXPECT_FALSE(bal.target_circle(0).has_value());
  const Controller cc({CommonCircleLaw{.K = -1.0, .kappa = 0.1, .omega_d = 0.2, .center = kCenter}},
                      g);
  EXPECT_EQ(cc.objective(), Objective::Sync);
  ASSERT_TRUE(cc.target_circle(3).has_value());
  EXPECT_EQ(cc.target_circle(3)->first, kCenter);
  EXPECT_DOUBLE_EQ(cc.target_circle(3)->second, 5.0);
  const Controller open({OpenLoopLaw{}}, g);
  EXPECT_EQ(open.objective(), Objective::None);
  EXPECT_FALSE(open.has_lyapunov());
  EXPECT_TRUE(std::isnan(open.lyapunov(example1_state())));
  EXPECT_EQ(law_name(PatternLaw{}), "pattern");
}
