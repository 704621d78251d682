#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "xray/sequence.hpp"
#include "xray/simulate/scene.hpp"

namespace xray::io {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kGroundTruthName = "ground_truth.json";

/// Point blobs: little-endian float32 (x, y, z, intensity), 16 bytes per point.
PointCloud read_point_blob(const std::filesystem::path& path);
void write_point_blob(const std::filesystem::path& path, const PointCloud& cloud);

/// Sequence directory: manifest.json plus one point blob per frame.
Sequence read_sequence(const std::filesystem::path& dir);
void write_sequence(const Sequence& seq, const std::filesystem::path& dir);

std::vector<Track> read_tracks(const std::filesystem::path& file);
void write_tracks(const std::filesystem::path& file, std::span<const Track> tracks);

/// Ground truth lives next to a simulated sequence: ground_truth.json plus one
/// blob per object surface.
GroundTruth read_ground_truth(const std::filesystem::path& dir);
void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& dir);

/// JSON scene description. Trajectories may be explicit per-frame lists or
/// the parametric forms {"static": ...}, {"linear": ...} and (ego only) {"orbit": ...}.
SceneConfig read_scene_config(const std::filesystem::path& file);
SceneConfig parse_scene_config(const std::string& json_text);

}  // namespace xray::io
