#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "xray/core/geometry.hpp"

namespace testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "xray-test-XXXXXX").string();
    path_ = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline xray::PointCloud cloud_of(std::initializer_list<xray::Vec3> pts) {
  xray::PointCloud pc;
  for (const auto& p : pts) pc.points.push_back(xray::Point3::at(p));
  return pc;
}

inline xray::PointCloud random_cloud(std::mt19937_64& gen, std::size_t n, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent), i01(0.0, 1.0);
  xray::PointCloud pc;
  for (std::size_t k = 0; k < n; ++k) pc.points.push_back({u(gen), u(gen), u(gen), i01(gen)});
  return pc;
}

}  // namespace testing
