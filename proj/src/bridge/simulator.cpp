#include "pointspeak/bridge/simulator.hpp"

#include <cmath>
#include <stdexcept>

namespace pointspeak::bridge {

void SimConfig::validate() const {
  if (!(max_linear > 0.0) || !(max_angular > 0.0)) {
    throw std::invalid_argument("simulator speed limits must be > 0");
  }
  if (!(tick > 0.0)) throw std::invalid_argument("simulator tick must be > 0");
  if (!(position_tolerance > 0.0) || !(yaw_tolerance > 0.0)) {
    throw std::invalid_argument("simulator tolerances must be > 0");
  }
}

bool within_tolerance(const Pose& a, const Pose& b, const SimConfig& cfg) {
  return planar_distance(a.position, b.position) <= cfg.position_tolerance &&
         std::abs(wrap_angle(quat_to_yaw(a.rotation) - quat_to_yaw(b.rotation))) <=
             cfg.yaw_tolerance;
}

RobotState sim_tick(const RobotState& state, const std::optional<NavGoal>& goal, double dt,
                    const SimConfig& cfg) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");

  RobotState next = state;
  next.linear_speed = 0.0;
  next.angular_speed = 0.0;
  // Arrived is sticky until a new goal resets the status.
  if (state.status == NavStatus::Arrived) return next;
  if (!goal) {
    next.status = NavStatus::Idle;
    return next;
  }

  NavStatus status = state.status == NavStatus::Idle ? NavStatus::Rotating : state.status;
  Vec3 pos = state.pose.position;
  double yaw = quat_to_yaw(state.pose.rotation);
  const Vec3 target = goal->pose.position;
  const double target_yaw = quat_to_yaw(goal->pose.rotation);

  double remaining = dt;
  double rotated = 0.0;
  double travelled = 0.0;

  // Turns toward `heading` with the leftover time; true when it got there.
  auto turn_to = [&](double heading) {
    const double err = wrap_angle(heading - yaw);
    const double need = std::abs(err) / cfg.max_angular;
    if (need <= remaining) {
      yaw = heading;
      rotated += std::abs(err);
      remaining -= need;
      return true;
    }
    const double step = cfg.max_angular * remaining;
    yaw = wrap_angle(yaw + std::copysign(step, err));
    rotated += step;
    remaining = 0.0;
    return false;
  };

  bool progressing = true;
  while (progressing && status != NavStatus::Arrived) {
    switch (status) {
      case NavStatus::Rotating: {
        if (planar_distance(pos, target) <= cfg.position_tolerance) {
          status = NavStatus::FinalRotating;
          break;
        }
        if (turn_to(std::atan2(target.y - pos.y, target.x - pos.x))) {
          status = NavStatus::Translating;
        } else {
          progressing = false;
        }
        break;
      }
      case NavStatus::Translating: {
        const double d = planar_distance(pos, target);
        const double need = d / cfg.max_linear;
        if (need <= remaining) {
          pos.x = target.x;
          pos.y = target.y;
          travelled += d;
          remaining -= need;
          status = NavStatus::FinalRotating;
        } else {
          const double step = cfg.max_linear * remaining;
          pos.x += (target.x - pos.x) * (step / d);
          pos.y += (target.y - pos.y) * (step / d);
          travelled += step;
          remaining = 0.0;
          progressing = false;
        }
        break;
      }
      case NavStatus::FinalRotating: {
        if (turn_to(target_yaw)) {
          status = NavStatus::Arrived;
        } else {
          progressing = false;
        }
        break;
      }
      default:
        progressing = false;
    }
  }

  next.pose = make_pose(pos, yaw);
  next.status = status;
  next.linear_speed = travelled / dt;
  next.angular_speed = rotated / dt;
  return next;
}

RobotSimulator::RobotSimulator(SimConfig cfg, RobotState initial)
    : cfg_(cfg), state_(std::move(initial)) {
  cfg_.validate();
}

bool RobotSimulator::submit(const NavGoal& goal) {
  if (active_ && active_->goal_id == goal.goal_id) {
    return false;
  }
  if (!active_ && completed_ && *completed_ == goal) {
    return false;
  }
  active_ = goal;
  state_.status = NavStatus::Idle;
  status_goal_id_ = goal.goal_id;
  ++goals_started_;
  return true;
}

void RobotSimulator::tick(double dt) {
  state_ = sim_tick(state_, active_, dt, cfg_);
  if (state_.status == NavStatus::Arrived && active_) {
    completed_ = active_;
    active_.reset();
  }
}

}  // namespace pointspeak::bridge
