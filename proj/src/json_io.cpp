#include "pointspeak/json_io.hpp"

#include <cmath>

#include <fmt/format.h>

namespace pointspeak {
namespace {

void write_value(const Json& v, std::string& out, bool time_keys_fixed, bool as_time) {
  switch (v.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        out += Json(it.key()).dump();
        out.push_back(':');
        write_value(it.value(), out, time_keys_fixed, time_keys_fixed && it.key() == "t");
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& e : v) {
        if (!first) out.push_back(',');
        first = false;
        write_value(e, out, time_keys_fixed, false);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      if (!std::isfinite(d)) throw std::invalid_argument("cannot serialize a non-finite number");
      out += as_time ? fmt::format("{:.9f}", d) : format_real(d);
      break;
    }
    default:
      out += v.dump(-1, ' ', false, Json::error_handler_t::strict);
  }
}

}  // namespace

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::string dump_json(const Json& value, bool time_keys_fixed) {
  std::string out;
  write_value(value, out, time_keys_fixed, false);
  return out;
}

Json to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Json to_json(const Quat& q) { return Json::array({q.x(), q.y(), q.z(), q.w()}); }

Vec3 vec3_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw JsonFieldError(std::string(what) + " must be an array of 3 numbers");
  }
  for (const auto& e : j) {
    if (!e.is_number()) throw JsonFieldError(std::string(what) + " must contain numbers");
  }
  Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  if (!is_finite(v)) throw JsonFieldError(std::string(what) + " must be finite");
  return v;
}

Quat quat_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 4) {
    throw JsonFieldError(std::string(what) + " must be an array of 4 numbers");
  }
  for (const auto& e : j) {
    if (!e.is_number()) throw JsonFieldError(std::string(what) + " must contain numbers");
  }
  try {
    return Quat::from_components(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                                 j[3].get<double>());
  } catch (const std::invalid_argument& e) {
    throw JsonFieldError(std::string(what) + ": " + e.what());
  }
}

double number_field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number()) {
    throw JsonFieldError(std::string("field '") + key + "' must be a number");
  }
  return obj[key].get<double>();
}

std::string string_field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
    throw JsonFieldError(std::string("field '") + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

}  // namespace pointspeak
