#include <gtest/gtest.h>

#include <cmath>

#include "pointspeak/bridge/simulator.hpp"

using namespace pointspeak;
using namespace pointspeak::bridge;

namespace {

// Ticks until Arrived; returns elapsed simulated time or -1 on timeout.
double time_to_arrival(RobotSimulator& sim, double limit = 60.0) {
  double t = 0.0;
  while (t < limit) {
    sim.tick();
    t += sim.config().tick;
    if (sim.state().status == NavStatus::Arrived) return t;
  }
  return -1.0;
}

// Time spent in one status until it changes.
double phase_duration(RobotSimulator& sim, NavStatus phase) {
  double t = 0.0;
  while (sim.state().status == phase || sim.state().status == NavStatus::Idle) {
    sim.tick();
    t += sim.config().tick;
    if (t > 60) break;
  }
  return t;
}

}  // namespace

TEST(Simulator, GoalAtCurrentPoseArrivesInOneTick) {
  RobotSimulator sim;
  sim.submit({make_pose({0, 0, 0}, 0), "g#1"});
  sim.tick();
  EXPECT_EQ(sim.state().status, NavStatus::Arrived);
  EXPECT_EQ(sim.state().pose.position, (Vec3{0, 0, 0}));
}

TEST(Simulator, StraightLineClosedForm) {
  RobotSimulator sim;
  sim.submit({make_pose({1, 0, 0}, 0), "g#1"});
  const double expected = 1.0 / 0.5;
  const double t = time_to_arrival(sim);
  EXPECT_NEAR(t, expected, sim.config().tick + 1e-9);
  EXPECT_TRUE(within_tolerance(sim.state().pose, make_pose({1, 0, 0}, 0), sim.config()));
}

TEST(Simulator, RandomStraightLinesWithinOneTick) {
  for (int i = 1; i <= 20; ++i) {
    const double d = 0.37 * i;
    const double yaw = -3.0 + 0.3 * i;
    RobotSimulator sim(SimConfig{}, RobotState{make_pose({0, 0, 0}, yaw), 0, 0, NavStatus::Idle});
    const Vec3 goal{d * std::cos(yaw), d * std::sin(yaw), 0};
    sim.submit({make_pose(goal, yaw), "g"});
    const double t = time_to_arrival(sim);
    EXPECT_NEAR(t, d / 0.5, 0.05 + 1e-9) << d;
    EXPECT_LE(planar_distance(sim.state().pose.position, goal), 0.02);
    EXPECT_LE(std::abs(wrap_angle(quat_to_yaw(sim.state().pose.rotation) - yaw)), kPi / 180);
  }
}

TEST(Simulator, GoalBehindRotatesFirst) {
  RobotSimulator sim;
  sim.submit({make_pose({-1, 0, 0}, kPi), "g#1"});
  const double rot = phase_duration(sim, NavStatus::Rotating);
  EXPECT_NEAR(rot, kPi / 1.5, sim.config().tick + 1e-9);
  const double total = rot + time_to_arrival(sim);
  EXPECT_NEAR(total, kPi / 1.5 + 2.0, 2 * sim.config().tick);
}

TEST(Simulator, SpeedLimitsHold) {
  RobotSimulator sim;
  sim.submit({make_pose({3, -2, 0}, 1.0), "g#1"});
  for (int i = 0; i < 400; ++i) {
    sim.tick();
    ASSERT_LE(sim.state().linear_speed, 0.5 + 1e-9);
    ASSERT_LE(sim.state().angular_speed, 1.5 + 1e-9);
  }
  EXPECT_TRUE(within_tolerance(sim.state().pose, make_pose({3, -2, 0}, 1.0), sim.config()));
}

TEST(Simulator, DuplicateGoalIdIgnored) {
  RobotSimulator sim;
  const NavGoal g{make_pose({1, 0, 0}, 0), "b#1"};
  EXPECT_TRUE(sim.submit(g));
  EXPECT_FALSE(sim.submit(g));
  time_to_arrival(sim);
  sim.tick();
  EXPECT_FALSE(sim.submit(g));
  EXPECT_EQ(sim.goals_started(), 1);
  EXPECT_TRUE(sim.submit({make_pose({0, 0, 0}, 0), "b#2"}));
  EXPECT_EQ(sim.goals_started(), 2);
}

TEST(Simulator, NewGoalPreempts) {
  RobotSimulator sim;
  sim.submit({make_pose({5, 0, 0}, 0), "a"});
  for (int i = 0; i < 10; ++i) sim.tick();
  sim.submit({make_pose({0, 0, 0}, 0), "b"});
  EXPECT_GT(time_to_arrival(sim), 0.0);
  EXPECT_EQ(sim.status_goal_id(), "b");
  EXPECT_LE(planar_distance(sim.state().pose.position, {0, 0, 0}), 0.02);
}

TEST(Simulator, BadTickRejected) {
  EXPECT_THROW(sim_tick(RobotState{}, std::nullopt, 0.0, SimConfig{}), std::invalid_argument);
  SimConfig bad;
  bad.max_linear = 0;
  EXPECT_THROW(RobotSimulator{bad}, std::invalid_argument);
}
