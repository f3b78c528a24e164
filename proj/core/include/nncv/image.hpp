#pragma once

#include <cstdint>
#include <vector>

#include "nncv/errors.hpp"
#include "nncv/vec.hpp"

namespace nncv {

/// Grayscale image over the unit square. Pixel (i,j) covers the cell around
/// center ((i+0.5)/width, (j+0.5)/height); intensities live in [0,1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major, index j*width + i

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0);

  double& at(int i, int j) { return pixels[static_cast<std::size_t>(j) * width + i]; }
  double at(int i, int j) const { return pixels[static_cast<std::size_t>(j) * width + i]; }
  std::size_t pixel_count() const { return pixels.size(); }

  Vec2 center(int i, int j) const {
    return {(i + 0.5) / width, (j + 0.5) / height};
  }
  Vec2 center(std::size_t flat) const {
    const int j = static_cast<int>(flat) / width;
    const int i = static_cast<int>(flat) % width;
    return center(i, j);
  }

  /// Throws InvalidDims on empty dimensions or intensities outside [0,1].
  void validate() const;
};

/// Per-pixel region labels (sign-pattern indices or ground-truth ids).
struct LabelMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> labels;  // row-major, same layout as GrayImage

  LabelMask() = default;
  LabelMask(int w, int h, std::uint16_t fill = 0)
      : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint16_t& at(int i, int j) { return labels[static_cast<std::size_t>(j) * width + i]; }
  std::uint16_t at(int i, int j) const { return labels[static_cast<std::size_t>(j) * width + i]; }
};

}  // namespace nncv
