#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "xray/completion/fusion.hpp"
#include "xray/distill/tensor.hpp"
#include "xray/eval/metrics.hpp"

namespace xray::io {

/// "XRTN" magic, u32 LE rank, rank x u32 LE dims, row-major float32 LE payload.
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor& tensor);

struct Rgb {
  std::uint8_t r = 200;
  std::uint8_t g = 200;
  std::uint8_t b = 200;
};

/// ASCII PLY with float x,y,z and uchar red,green,blue. Points at index >=
/// highlight_from (when set) get `highlight` instead of `color`.
void export_ply(const PointCloud& pc, const std::filesystem::path& path, Rgb color,
                std::optional<std::size_t> highlight_from = std::nullopt, Rgb highlight = {230, 40, 40});

std::string to_json(const EvalReport& report);
std::string to_json(const FusionReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace xray::io
