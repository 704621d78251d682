#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "xray/core/error.hpp"
#include "xray/core/geometry.hpp"

namespace xray::io::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint32_t get_u32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

inline void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }
inline float get_f32(const char* p) { return std::bit_cast<float>(get_u32(p)); }

json parse_json(const std::string& text, const std::string& doc);

/// Field access with "<doc>: <path>: <problem>" error messages (Error::Format).
class FieldReader {
 public:
  explicit FieldReader(std::string doc) : doc_(std::move(doc)) {}

  [[noreturn]] void malformed(const std::string& where, const std::string& what) const;

  const json& at(const json& obj, const char* key, const std::string& where) const;
  const json* find(const json& obj, const char* key, const std::string& where) const;
  double number(const json& v, const std::string& where) const;
  std::int64_t integer(const json& v, const std::string& where) const;
  std::uint64_t unsigned_integer(const json& v, const std::string& where) const;
  bool boolean(const json& v, const std::string& where) const;
  std::string string(const json& v, const std::string& where) const;
  const json& array(const json& v, const std::string& where) const;
  Vec3 vec3(const json& v, const std::string& where) const;

 private:
  std::string doc_;
};

ordered_json box_to_json(const BoundingBox3D& box);
BoundingBox3D box_from_json(const FieldReader& r, const json& v, const std::string& where);

}  // namespace xray::io::detail
