#include "polcomp/tagio.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "polcomp/error.hpp"

namespace polcomp {

namespace {

constexpr std::size_t kMagicLen = sizeof(kPtagMagic) - 1;

void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffU);
  os.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8))
    throw Error("PTAG1: truncated stream");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::filesystem::path sidecar_path(const std::filesystem::path& p) {
  return std::filesystem::path(p.string() + ".json");
}

}  // namespace

nlohmann::json TagSidecar::to_json() const {
  nlohmann::json names = nlohmann::json::object();
  for (std::size_t i = 0; i < detectors.size(); ++i)
    names[std::to_string(i)] = detectors[i];
  return {{"format", "PTAG1"},
          {"duration_ps", duration_ps},
          {"detectors", names},
          {"seed", seed}};
}

TagSidecar TagSidecar::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "PTAG1")
      throw Error("PTAG1 sidecar: unexpected format");
    TagSidecar m;
    m.duration_ps = j.at("duration_ps").get<std::int64_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& names = j.at("detectors");
    m.detectors.resize(names.size());
    for (const auto& [key, value] : names.items()) {
      const std::size_t idx = std::stoul(key);
      if (idx >= m.detectors.size())
        throw Error("PTAG1 sidecar: detector indices are not contiguous");
      m.detectors[idx] = value.get<std::string>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("PTAG1 sidecar: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error("PTAG1 sidecar: detector keys must be integers");
  }
}

void write_ptag(std::ostream& os, const TagStream& s) {
  os.write(kPtagMagic, kMagicLen);
  put_u64(os, s.tags.size());
  for (const TimeTag& t : s.tags) {
    os.put(static_cast<char>(t.detector));
    put_u64(os, static_cast<std::uint64_t>(t.t_ps));
  }
  if (!os) throw Error("PTAG1: write failed");
}

TagStream read_ptag(std::istream& is, const TagSidecar& meta) {
  char magic[kMagicLen];
  if (!is.read(magic, kMagicLen) || std::memcmp(magic, kPtagMagic, kMagicLen) != 0)
    throw Error("PTAG1: bad magic");
  const std::uint64_t n = get_u64(is);

  TagStream s;
  s.duration_ps = meta.duration_ps;
  s.detectors = meta.detectors;
  s.tags.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1U << 24)));
  for (std::uint64_t i = 0; i < n; ++i) {
    const int d = is.get();
    if (d == std::char_traits<char>::eof()) throw Error("PTAG1: truncated stream");
    const std::uint64_t t = get_u64(is);
    if (t > static_cast<std::uint64_t>(INT64_MAX))
      throw Error("PTAG1: timestamp out of range");
    s.tags.push_back({static_cast<std::int64_t>(t), static_cast<std::uint8_t>(d)});
  }
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw Error(std::string("PTAG1: ") + e.what());
  }
  return s;
}

void save_stream(const std::filesystem::path& path, const TagStream& s,
                 std::uint64_t seed) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw Error("cannot open " + path.string() + " for writing");
  write_ptag(bin, s);
  std::ofstream side(sidecar_path(path));
  if (!side) throw Error("cannot open sidecar for " + path.string());
  side << TagSidecar{s.duration_ps, s.detectors, seed}.to_json().dump(2) << '\n';
}

TagStream load_stream(const std::filesystem::path& path) {
  std::ifstream side(sidecar_path(path));
  if (!side) throw Error("missing sidecar for " + path.string());
  nlohmann::json j;
  try {
    side >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("PTAG1 sidecar: ") + e.what());
  }
  const TagSidecar meta = TagSidecar::from_json(j);
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw Error("cannot open " + path.string());
  return read_ptag(bin, meta);
}

}  // namespace polcomp
