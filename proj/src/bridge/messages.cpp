#include "pointspeak/bridge/messages.hpp"

#include "pointspeak/json_io.hpp"

namespace pointspeak::bridge {
namespace {

Json parse_payload(const BridgeFrame& f, const char* topic) {
  if (f.topic != topic) {
    throw ProtocolError("expected topic '" + std::string(topic) + "', got '" + f.topic + "'");
  }
  Json j = Json::parse(f.payload, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProtocolError("payload must be a JSON object");
  return j;
}

template <typename Fn>
auto as_protocol(Fn&& fn) {
  try {
    return fn();
  } catch (const JsonFieldError& e) {
    throw ProtocolError(e.what());
  } catch (const FrameMisuseError& e) {
    throw ProtocolError(e.what());
  }
}

}  // namespace

const char* to_string(NavStatus s) {
  switch (s) {
    case NavStatus::Idle: return "Idle";
    case NavStatus::Rotating: return "Rotating";
    case NavStatus::Translating: return "Translating";
    case NavStatus::FinalRotating: return "FinalRotating";
    case NavStatus::Arrived: return "Arrived";
  }
  return "?";
}

NavStatus parse_nav_status(const std::string& s) {
  for (NavStatus n : {NavStatus::Idle, NavStatus::Rotating, NavStatus::Translating,
                      NavStatus::FinalRotating, NavStatus::Arrived}) {
    if (s == to_string(n)) return n;
  }
  throw ProtocolError("unknown navigation status '" + s + "'");
}

BridgeFrame goal_frame(const NavGoal& goal) {
  return {kTopicGoal, dump_json(Json{{"goal_id", goal.goal_id},
                                     {"position", to_json(goal.pose.position)},
                                     {"rotation", to_json(goal.pose.rotation)}})};
}

NavGoal parse_goal(const BridgeFrame& f) {
  const Json j = parse_payload(f, kTopicGoal);
  return as_protocol([&] {
    NavGoal g{{vec3_from_json(j.value("position", Json()), "position"),
               quat_from_json(j.value("rotation", Json()), "rotation")},
              string_field(j, "goal_id")};
    if (!g.pose.rotation.is_yaw_only()) throw FrameMisuseError("goal rotation must be yaw-only");
    return g;
  });
}

BridgeFrame tf_frame(const TfSample& tf) {
  return {kTopicTf, dump_json(Json{{"position", to_json(tf.pose.position)},
                                   {"rotation", to_json(tf.pose.rotation)},
                                   {"t", tf.t}})};
}

TfSample parse_tf(const BridgeFrame& f) {
  const Json j = parse_payload(f, kTopicTf);
  return as_protocol([&] {
    return TfSample{{vec3_from_json(j.value("position", Json()), "position"),
                     quat_from_json(j.value("rotation", Json()), "rotation")},
                    number_field(j, "t")};
  });
}

BridgeFrame status_frame(const StatusUpdate& s) {
  return {kTopicStatus, dump_json(Json{{"status", to_string(s.status)}, {"goal_id", s.goal_id}})};
}

StatusUpdate parse_status(const BridgeFrame& f) {
  const Json j = parse_payload(f, kTopicStatus);
  return as_protocol([&] {
    return StatusUpdate{parse_nav_status(string_field(j, "status")), string_field(j, "goal_id")};
  });
}

}  // namespace pointspeak::bridge
