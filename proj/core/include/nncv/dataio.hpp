#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nncv/image.hpp"
#include "nncv/multiphase.hpp"

namespace nncv {

/// One disk stamped into a synthetic image. Centers live in the unit square;
/// disks may be clipped by the image border.
struct CircleSpec {
  Vec2 center;
  double radius = 0.2;
  double fg = 0.85;  // intensity inside
};

struct GeneratedImage {
  GrayImage image;
  LabelMask truth;  // 0 background, i+1 for the i-th circle (later wins)
  double bg = 0.15;
  std::vector<CircleSpec> circles;
};

struct DatasetSpec {
  int count = 1;
  int width = 50;
  int height = 50;
  std::uint64_t seed = 0;
  int min_circles = 1;
  int max_circles = 3;
  double min_radius = 0.15;
  double max_radius = 0.3;
  double fg_lo = 0.8;
  double fg_hi = 0.95;
  double bg_lo = 0.05;
  double bg_hi = 0.2;
};

/// Deterministic synthetic dataset: each image stamps its circles in order
/// onto a constant background, with the ground-truth labels alongside.
/// Foreground and background intensities always differ by at least 0.2.
std::vector<GeneratedImage> generate_dataset(const DatasetSpec& spec);

/// Binary PGM (P5) with maxval 255 or 65535 (16-bit samples big-endian).
/// Intensities map linearly to [0,1] on read; writes use the 16-bit depth,
/// so one round trip changes a value by at most 1/131070.
GrayImage read_image(const std::filesystem::path& path);
void write_image(const GrayImage& img, const std::filesystem::path& path);

/// Label masks ride in 8-bit PGM files holding raw label values.
LabelMask read_mask(const std::filesystem::path& path);
void write_mask(const LabelMask& mask, const std::filesystem::path& path);

/// Versioned JSON checkpoint of a full model. Numbers are written as
/// shortest round-trip decimals, so load(save(x)) is bit-exact.
void save_checkpoint(const MultiphaseModel& model, const std::filesystem::path& path);
MultiphaseModel load_checkpoint(const std::filesystem::path& path);

/// Overlap score 2|A.B|/(|A|+|B|) for one label; 1 when both selections are
/// empty.
double dice(const LabelMask& a, const LabelMask& b, std::uint16_t label);

/// Writes content to a sibling temp file and renames it into place, so an
/// interrupted run never leaves a partial file behind.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// c_in/c_out indicator rasterization helper shared by the generator and
/// tests: 1 where (x-c)^2 <= r^2 at the pixel center.
bool inside_circle(const CircleSpec& c, Vec2 x);

}  // namespace nncv
