#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointspeak/geometry.hpp"

namespace pointspeak {

// Named landmark. Only ever used as an orientation target for beacon yaw.
struct MRLabel {
  std::string id;
  std::string name;
  Vec3 location;  // World frame

  friend bool operator==(const MRLabel&, const MRLabel&) = default;
};

// Persistent navigation goal marker.
struct MRBeacon {
  std::string id;
  Vec3 location;  // World frame
  Quat rotation;  // yaw-only

  Pose pose() const { return {location, rotation}; }
  friend bool operator==(const MRBeacon&, const MRBeacon&) = default;
};

inline constexpr int kStoreSchemaVersion = 1;

struct StoreSnapshot {
  std::vector<MRLabel> labels;
  std::vector<MRBeacon> beacons;
  int schema_version = kStoreSchemaVersion;
  std::uint64_t revision = 0;

  friend bool operator==(const StoreSnapshot&, const StoreSnapshot&) = default;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConflictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::filesystem::path& file, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MigrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using IdGenerator = std::function<std::string()>;

// Random version-4 GUID generator seeded from std::random_device.
IdGenerator random_guid_generator();
// Reproducible generator for replays and tests.
IdGenerator seeded_guid_generator(std::uint64_t seed);

inline constexpr double kDefaultHitRadius = 0.15;

// MR-label and MR-beacon databases. Not internally synchronized: one owner
// mutates, readers take snapshots.
class WorldStore {
 public:
  explicit WorldStore(IdGenerator ids = random_guid_generator());

  // Creates a label, or returns the existing one when the canonical name and
  // location already match. A different location for an existing name is a
  // ConflictError unless `overwrite` is set.
  MRLabel upsert_label(const std::string& name, const Vec3& location, bool overwrite = false);
  MRLabel rename_label(const std::string& name, const std::string& new_name);
  MRLabel remove_label(const std::string& name);
  MRLabel lookup_label(const std::string& name) const;

  MRBeacon add_beacon(const Pose& pose);
  MRBeacon update_beacon(const std::string& id, const Pose& pose);
  MRBeacon remove_beacon(const std::string& id);
  std::optional<MRBeacon> find_beacon(const std::string& id) const;

  // Planar nearest beacon within r_hit of `point`, if any.
  std::optional<MRBeacon> hit_test(const Vec3& point, double r_hit = kDefaultHitRadius) const;

  const std::vector<MRLabel>& labels() const { return labels_; }
  const std::vector<MRBeacon>& beacons() const { return beacons_; }
  std::vector<std::string> label_names() const;
  std::uint64_t revision() const { return revision_; }
  StoreSnapshot snapshot() const;

  // Replaces all content with the snapshot. Ids are kept verbatim.
  void restore(const StoreSnapshot& snap);

  // JSON Lines, one header line then one entity per line; each file is
  // written to a temporary sibling and renamed into place.
  void save(const std::filesystem::path& labels_path,
            const std::filesystem::path& beacons_path) const;
  // On any error the store is left unmodified. Missing files load as empty.
  void load(const std::filesystem::path& labels_path, const std::filesystem::path& beacons_path);

 private:
  std::string mint_id() const;
  std::vector<MRLabel>::iterator find_label(const std::string& canonical);
  std::vector<MRLabel>::const_iterator find_label(const std::string& canonical) const;
  void bump() { ++revision_; }

  IdGenerator ids_;
  std::vector<MRLabel> labels_;
  std::vector<MRBeacon> beacons_;
  std::uint64_t revision_ = 0;
};

StoreSnapshot read_store_files(const std::filesystem::path& labels_path,
                               const std::filesystem::path& beacons_path);
// Also used for ground-truth beacon sets, which share the beacons schema.
std::vector<MRBeacon> read_beacons_file(const std::filesystem::path& path,
                                        std::uint64_t* revision = nullptr);

// Writes a whole file atomically (temporary sibling + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace pointspeak
