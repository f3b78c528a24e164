#include "nncv/image.hpp"

namespace nncv {

GrayImage::GrayImage(int w, int h, double fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w > 0 ? w : 0) * (h > 0 ? h : 0), fill) {
  if (w <= 0 || h <= 0) throw InvalidDims("image dimensions must be positive");
}

void GrayImage::validate() const {
  if (width <= 0 || height <= 0) throw InvalidDims("image dimensions must be positive");
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw InvalidDims("pixel buffer size does not match dimensions");
  }
  for (double v : pixels) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidDims("pixel intensities must lie in [0,1]");
  }
}

}  // namespace nncv
