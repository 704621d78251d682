#include "detail.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

namespace xray::io::detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::Io, "error reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) fail(ErrorCode::Io, "error writing " + path.string());
}

json parse_json(const std::string& text, const std::string& doc) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Format, doc + ": invalid JSON: " + e.what());
  }
}

void FieldReader::malformed(const std::string& where, const std::string& what) const {
  fail(ErrorCode::Format, doc_ + ": " + where + ": " + what);
}

const json* FieldReader::find(const json& obj, const char* key, const std::string& where) const {
  if (!obj.is_object()) malformed(where, "expected an object");
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const json& FieldReader::at(const json& obj, const char* key, const std::string& where) const {
  const json* v = find(obj, key, where);
  if (!v) malformed(where + "." + key, "missing field");
  return *v;
}

double FieldReader::number(const json& v, const std::string& where) const {
  if (!v.is_number()) malformed(where, "expected a number");
  return v.get<double>();
}

std::int64_t FieldReader::integer(const json& v, const std::string& where) const {
  if (!v.is_number_integer()) malformed(where, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t FieldReader::unsigned_integer(const json& v, const std::string& where) const {
  if (!v.is_number_unsigned()) malformed(where, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

bool FieldReader::boolean(const json& v, const std::string& where) const {
  if (!v.is_boolean()) malformed(where, "expected true or false");
  return v.get<bool>();
}

std::string FieldReader::string(const json& v, const std::string& where) const {
  if (!v.is_string()) malformed(where, "expected a string");
  return v.get<std::string>();
}

const json& FieldReader::array(const json& v, const std::string& where) const {
  if (!v.is_array()) malformed(where, "expected an array");
  return v;
}

Vec3 FieldReader::vec3(const json& v, const std::string& where) const {
  if (!v.is_array() || v.size() != 3) malformed(where, "expected an array of 3 numbers");
  return {number(v[0], where + "[0]"), number(v[1], where + "[1]"), number(v[2], where + "[2]")};
}

ordered_json box_to_json(const BoundingBox3D& box) {
  ordered_json j;
  j["cx"] = box.center().x();
  j["cy"] = box.center().y();
  j["cz"] = box.center().z();
  j["l"] = box.size().length;
  j["w"] = box.size().width;
  j["h"] = box.size().height;
  j["yaw"] = box.yaw();
  return j;
}

BoundingBox3D box_from_json(const FieldReader& r, const json& v, const std::string& where) {
  auto num = [&](const char* k) { return r.number(r.at(v, k, where), where + "." + k); };
  const Vec3 c(num("cx"), num("cy"), num("cz"));
  const BoxSize s{num("l"), num("w"), num("h")};
  const double yaw = num("yaw");
  try {
    return {c, s, yaw};
  } catch (const Error& e) {
    r.malformed(where, e.what());
  }
}

}  // namespace xray::io::detail
