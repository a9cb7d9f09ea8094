#pragma once

#include <string>

#include "pointspeak/bridge/frame.hpp"
#include "pointspeak/geometry.hpp"

namespace pointspeak::bridge {

inline constexpr const char* kTopicTf = "tf";
inline constexpr const char* kTopicGoal = "goal_pose";
inline constexpr const char* kTopicStatus = "nav_status";
inline constexpr int kDefaultBridgePort = 10000;

struct NavGoal {
  Pose pose;  // Map frame, yaw-only
  std::string goal_id;

  friend bool operator==(const NavGoal&, const NavGoal&) = default;
};

enum class NavStatus { Idle, Rotating, Translating, FinalRotating, Arrived };

const char* to_string(NavStatus s);
NavStatus parse_nav_status(const std::string& s);

// Robot pose sample published on "tf".
struct TfSample {
  Pose pose;  // Map frame
  double t = 0.0;
};

// Published on "nav_status" whenever the navigation status changes.
struct StatusUpdate {
  NavStatus status = NavStatus::Idle;
  std::string goal_id;
};

// {"goal_id", "position": [x,y,z], "rotation": [x,y,z,w]}
BridgeFrame goal_frame(const NavGoal& goal);
NavGoal parse_goal(const BridgeFrame& f);

// {"position": [...], "rotation": [...], "t": seconds}
BridgeFrame tf_frame(const TfSample& tf);
TfSample parse_tf(const BridgeFrame& f);

// {"status", "goal_id"}
BridgeFrame status_frame(const StatusUpdate& s);
StatusUpdate parse_status(const BridgeFrame& f);

}  // namespace pointspeak::bridge
