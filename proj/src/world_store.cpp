#include "pointspeak/world_store.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "pointspeak/json_io.hpp"
#include "pointspeak/text.hpp"

namespace pointspeak {
namespace {

std::string format_guid(std::uint64_t hi, std::uint64_t lo) {
  hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;  // version 4
  lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  return fmt::format("{:08x}-{:04x}-{:04x}-{:04x}-{:012x}", hi >> 32, (hi >> 16) & 0xFFFF,
                     hi & 0xFFFF, lo >> 48, lo & 0xFFFFFFFFFFFFULL);
}

IdGenerator generator_from(std::shared_ptr<std::mt19937_64> rng) {
  return [rng] {
    const std::uint64_t hi = (*rng)();
    const std::uint64_t lo = (*rng)();
    return format_guid(hi, lo);
  };
}

void require_yaw_only(const Quat& q) {
  if (!q.is_yaw_only()) {
    throw FrameMisuseError("beacon rotations must be yaw-only");
  }
}

std::string header_line(const char* kind, std::size_t count, std::uint64_t revision) {
  return dump_json(Json{{"schema_version", kStoreSchemaVersion},
                        {"kind", kind},
                        {"count", count},
                        {"revision", revision}});
}

struct ParsedFile {
  std::vector<Json> records;
  std::uint64_t revision = 0;
};

ParsedFile parse_jsonl(const std::filesystem::path& path, const char* kind) {
  ParsedFile parsed;
  std::ifstream in(path);
  if (!in) {
    return parsed;
  }
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> expected;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      throw SchemaError(path, line_no, "empty line");
    }
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw SchemaError(path, line_no, "not a JSON object");
    }
    if (line_no == 1) {
      if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
        throw SchemaError(path, line_no, "missing schema_version header");
      }
      const int version = j["schema_version"].get<int>();
      if (version != kStoreSchemaVersion) {
        throw MigrationError(fmt::format("{}: schema_version {} is not supported (expected {})",
                                         path.string(), version, kStoreSchemaVersion));
      }
      if (!j.contains("kind") || j["kind"] != kind) {
        throw SchemaError(path, line_no, fmt::format("expected a '{}' file", kind));
      }
      if (!j.contains("count") || !j["count"].is_number_unsigned()) {
        throw SchemaError(path, line_no, "missing record count");
      }
      expected = j["count"].get<std::size_t>();
      if (j.contains("revision") && j["revision"].is_number_unsigned()) {
        parsed.revision = j["revision"].get<std::uint64_t>();
      }
      continue;
    }
    parsed.records.push_back(std::move(j));
  }
  if (line_no == 0) {
    throw SchemaError(path, 1, "file is empty");
  }
  if (!in.eof()) {
    throw SchemaError(path, line_no, "read error");
  }
  if (parsed.records.size() != *expected) {
    throw SchemaError(path, line_no + 1,
                      fmt::format("expected {} records, found {} (truncated file?)", *expected,
                                  parsed.records.size()));
  }
  return parsed;
}

}  // namespace

SchemaError::SchemaError(const std::filesystem::path& file, std::size_t line,
                         const std::string& what)
    : std::runtime_error(fmt::format("{}:{}: {}", file.string(), line, what)), line_(line) {}

IdGenerator random_guid_generator() {
  std::random_device rd;
  std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
  return generator_from(std::make_shared<std::mt19937_64>(seq));
}

IdGenerator seeded_guid_generator(std::uint64_t seed) {
  return generator_from(std::make_shared<std::mt19937_64>(seed));
}

WorldStore::WorldStore(IdGenerator ids) : ids_(std::move(ids)) {}

std::string WorldStore::mint_id() const {
  for (;;) {
    std::string id = ids_();
    const bool taken =
        std::any_of(labels_.begin(), labels_.end(), [&](const auto& l) { return l.id == id; }) ||
        std::any_of(beacons_.begin(), beacons_.end(), [&](const auto& b) { return b.id == id; });
    if (!taken) return id;
  }
}

std::vector<MRLabel>::iterator WorldStore::find_label(const std::string& canonical) {
  return std::find_if(labels_.begin(), labels_.end(),
                      [&](const MRLabel& l) { return canonical_name(l.name) == canonical; });
}

std::vector<MRLabel>::const_iterator WorldStore::find_label(const std::string& canonical) const {
  return std::find_if(labels_.begin(), labels_.end(),
                      [&](const MRLabel& l) { return canonical_name(l.name) == canonical; });
}

MRLabel WorldStore::upsert_label(const std::string& name, const Vec3& location, bool overwrite) {
  const std::string canon = canonical_name(name);
  if (canon.empty()) throw std::invalid_argument("label name must not be empty");
  if (!is_finite(location)) throw std::invalid_argument("label location must be finite");

  if (auto it = find_label(canon); it != labels_.end()) {
    if (it->location == location) {
      return *it;
    }
    if (!overwrite) {
      throw ConflictError("label '" + name + "' already exists at a different location");
    }
    it->location = location;
    bump();
    return *it;
  }
  MRLabel label{mint_id(), name, location};
  labels_.push_back(label);
  bump();
  return label;
}

MRLabel WorldStore::rename_label(const std::string& name, const std::string& new_name) {
  auto it = find_label(canonical_name(name));
  if (it == labels_.end()) throw NotFoundError("no label named '" + name + "'");
  const std::string target = canonical_name(new_name);
  if (target.empty()) throw std::invalid_argument("label name must not be empty");
  if (auto other = find_label(target); other != labels_.end() && other != it) {
    throw ConflictError("label '" + new_name + "' already exists");
  }
  it->name = new_name;
  bump();
  return *it;
}

MRLabel WorldStore::remove_label(const std::string& name) {
  auto it = find_label(canonical_name(name));
  if (it == labels_.end()) throw NotFoundError("no label named '" + name + "'");
  MRLabel removed = *it;
  labels_.erase(it);
  bump();
  return removed;
}

MRLabel WorldStore::lookup_label(const std::string& name) const {
  auto it = find_label(canonical_name(name));
  if (it == labels_.end()) throw NotFoundError("no label named '" + name + "'");
  return *it;
}

MRBeacon WorldStore::add_beacon(const Pose& pose) {
  if (!is_finite(pose.position)) throw std::invalid_argument("beacon location must be finite");
  require_yaw_only(pose.rotation);
  MRBeacon beacon{mint_id(), pose.position, pose.rotation};
  beacons_.push_back(beacon);
  bump();
  return beacon;
}

MRBeacon WorldStore::update_beacon(const std::string& id, const Pose& pose) {
  auto it = std::find_if(beacons_.begin(), beacons_.end(),
                         [&](const MRBeacon& b) { return b.id == id; });
  if (it == beacons_.end()) throw NotFoundError("no beacon with id " + id);
  if (!is_finite(pose.position)) throw std::invalid_argument("beacon location must be finite");
  require_yaw_only(pose.rotation);
  it->location = pose.position;
  it->rotation = pose.rotation;
  bump();
  return *it;
}

MRBeacon WorldStore::remove_beacon(const std::string& id) {
  auto it = std::find_if(beacons_.begin(), beacons_.end(),
                         [&](const MRBeacon& b) { return b.id == id; });
  if (it == beacons_.end()) throw NotFoundError("no beacon with id " + id);
  MRBeacon removed = *it;
  beacons_.erase(it);
  bump();
  return removed;
}

std::optional<MRBeacon> WorldStore::find_beacon(const std::string& id) const {
  auto it = std::find_if(beacons_.begin(), beacons_.end(),
                         [&](const MRBeacon& b) { return b.id == id; });
  if (it == beacons_.end()) return std::nullopt;
  return *it;
}

std::optional<MRBeacon> WorldStore::hit_test(const Vec3& point, double r_hit) const {
  if (!(r_hit > 0.0)) throw std::invalid_argument("r_hit must be > 0");
  const MRBeacon* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const MRBeacon& b : beacons_) {
    const double d = planar_distance(point, b.location);
    if (d <= r_hit && d < best_d) {
      best = &b;
      best_d = d;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::vector<std::string> WorldStore::label_names() const {
  std::vector<std::string> names;
  names.reserve(labels_.size());
  for (const auto& l : labels_) names.push_back(l.name);
  return names;
}

StoreSnapshot WorldStore::snapshot() const {
  return {labels_, beacons_, kStoreSchemaVersion, revision_};
}

void WorldStore::restore(const StoreSnapshot& snap) {
  std::set<std::string> ids;
  std::set<std::string> names;
  for (const auto& l : snap.labels) {
    if (!ids.insert(l.id).second) throw ConflictError("duplicate id " + l.id);
    if (!names.insert(canonical_name(l.name)).second) {
      throw ConflictError("duplicate label name " + l.name);
    }
  }
  for (const auto& b : snap.beacons) {
    if (!ids.insert(b.id).second) throw ConflictError("duplicate id " + b.id);
    require_yaw_only(b.rotation);
  }
  labels_ = snap.labels;
  beacons_ = snap.beacons;
  revision_ = snap.revision;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void WorldStore::save(const std::filesystem::path& labels_path,
                      const std::filesystem::path& beacons_path) const {
  std::string labels = header_line("labels", labels_.size(), revision_) + "\n";
  for (const auto& l : labels_) {
    labels += dump_json(Json{{"id", l.id}, {"name", l.name}, {"location", to_json(l.location)}});
    labels += "\n";
  }
  std::string beacons = header_line("beacons", beacons_.size(), revision_) + "\n";
  for (const auto& b : beacons_) {
    beacons += dump_json(Json{{"id", b.id},
                              {"location", to_json(b.location)},
                              {"rotation", to_json(b.rotation)}});
    beacons += "\n";
  }
  write_file_atomic(labels_path, labels);
  write_file_atomic(beacons_path, beacons);
}

std::vector<MRBeacon> read_beacons_file(const std::filesystem::path& path,
                                        std::uint64_t* revision) {
  ParsedFile parsed = parse_jsonl(path, "beacons");
  if (revision) *revision = parsed.revision;
  std::vector<MRBeacon> beacons;
  for (std::size_t i = 0; i < parsed.records.size(); ++i) {
    const Json& r = parsed.records[i];
    try {
      MRBeacon b{string_field(r, "id"), vec3_from_json(r.value("location", Json()), "location"),
                 quat_from_json(r.value("rotation", Json()), "rotation")};
      require_yaw_only(b.rotation);
      beacons.push_back(std::move(b));
    } catch (const std::exception& e) {
      throw SchemaError(path, i + 2, e.what());
    }
  }
  return beacons;
}

StoreSnapshot read_store_files(const std::filesystem::path& labels_path,
                               const std::filesystem::path& beacons_path) {
  StoreSnapshot snap;
  ParsedFile labels = parse_jsonl(labels_path, "labels");
  for (std::size_t i = 0; i < labels.records.size(); ++i) {
    const Json& r = labels.records[i];
    try {
      snap.labels.push_back(MRLabel{string_field(r, "id"), string_field(r, "name"),
                                    vec3_from_json(r.value("location", Json()), "location")});
    } catch (const JsonFieldError& e) {
      throw SchemaError(labels_path, i + 2, e.what());
    }
  }
  std::uint64_t beacon_revision = 0;
  snap.beacons = read_beacons_file(beacons_path, &beacon_revision);
  snap.revision = std::max(labels.revision, beacon_revision);
  return snap;
}

void WorldStore::load(const std::filesystem::path& labels_path,
                      const std::filesystem::path& beacons_path) {
  const StoreSnapshot snap = read_store_files(labels_path, beacons_path);
  restore(snap);
}

}  // namespace pointspeak
