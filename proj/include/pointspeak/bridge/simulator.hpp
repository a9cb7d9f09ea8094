#pragma once

#include <optional>

#include "pointspeak/bridge/messages.hpp"

namespace pointspeak::bridge {

struct SimConfig {
  double max_linear = 0.5;   // m/s
  double max_angular = 1.5;  // rad/s
  double tick = 0.05;        // s
  double position_tolerance = 0.02;          // m
  double yaw_tolerance = kPi / 180.0;        // rad

  void validate() const;
};

struct RobotState {
  Pose pose;  // Map frame
  double linear_speed = 0.0;   // average over the last tick
  double angular_speed = 0.0;  // average over the last tick
  NavStatus status = NavStatus::Idle;
};

// One controller step of a rotate / drive straight / rotate maneuver. Phases
// that finish inside the tick hand their leftover time to the next phase.
// Without a goal the robot stops and settles to Idle.
RobotState sim_tick(const RobotState& state, const std::optional<NavGoal>& goal, double dt,
                    const SimConfig& cfg);

bool within_tolerance(const Pose& a, const Pose& b, const SimConfig& cfg);

// Owns the active goal: preempts on a new goal, ignores re-delivery of the
// one already being executed (or just completed at the same pose).
class RobotSimulator {
 public:
  explicit RobotSimulator(SimConfig cfg = {}, RobotState initial = {});

  // Returns false when the goal was a duplicate and ignored.
  bool submit(const NavGoal& goal);
  void tick() { tick(cfg_.tick); }
  void tick(double dt);

  const RobotState& state() const { return state_; }
  const std::optional<NavGoal>& active_goal() const { return active_; }
  const SimConfig& config() const { return cfg_; }
  int goals_started() const { return goals_started_; }
  // Id of the goal most recently reported with the current status.
  const std::string& status_goal_id() const { return status_goal_id_; }

 private:
  SimConfig cfg_;
  RobotState state_;
  std::optional<NavGoal> active_;
  std::optional<NavGoal> completed_;
  std::string status_goal_id_;
  int goals_started_ = 0;
};

}  // namespace pointspeak::bridge
