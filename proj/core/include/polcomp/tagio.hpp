#pragma once

// PTAG1 binary tag streams with a JSON sidecar.  Layout, all little-endian:
//   "PTAG1"            5-byte magic
//   uint64 count       number of records
//   count x { uint8 detector, uint64 t_ps }
// The sidecar holds duration_ps, the detector names and the seed.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "polcomp/photostream.hpp"

namespace polcomp {

inline constexpr char kPtagMagic[] = "PTAG1";

struct TagSidecar {
  std::int64_t duration_ps = 0;
  std::vector<std::string> detectors;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static TagSidecar from_json(const nlohmann::json& j);
};

void write_ptag(std::ostream& os, const TagStream& s);

/// Reads records and fills in duration and detector names from `meta`.
/// Throws Error on a bad magic, truncated data or an invalid stream.
TagStream read_ptag(std::istream& is, const TagSidecar& meta);

/// Writes `path` and `path` + ".json".
void save_stream(const std::filesystem::path& path, const TagStream& s,
                 std::uint64_t seed);
TagStream load_stream(const std::filesystem::path& path);

}  // namespace polcomp
