#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pointspeak/geometry.hpp"

namespace pointspeak {

using Json = nlohmann::json;

// Serialization used for every file and wire format in the project: compact
// JSON, floating-point numbers written with 17 significant digits so that
// parsing them back yields the identical double. When `time_keys_fixed` is
// set, members named "t" are instead written in fixed notation with nine
// decimals (session logs).
std::string dump_json(const Json& value, bool time_keys_fixed = false);

std::string format_real(double v);

class JsonFieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const Vec3& v);
Json to_json(const Quat& q);

// Throw JsonFieldError with the member name on a missing or mistyped field.
Vec3 vec3_from_json(const Json& j, const char* what);
Quat quat_from_json(const Json& j, const char* what);
double number_field(const Json& obj, const char* key);
std::string string_field(const Json& obj, const char* key);

}  // namespace pointspeak
