#pragma once

#include <cstddef>
#include <vector>

namespace cmfd {

/// Single-channel image with real-valued intensities on the [0, 255] scale,
/// stored row-major. The universal pixel carrier for the whole pipeline.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  GrayImage() = default;
  GrayImage(int w, int h, double fill = 0.0);

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  // Replicate-border lookup: coordinates outside the image clamp to the edge.
  double at_clamped(int x, int y) const;

  // Bilinear sample at a real position, clamped to the image rectangle.
  // Exact on the integer lattice and on constant regions.
  double sample(double x, double y) const;

  std::size_t size() const { return data.size(); }
  bool same_size(const GrayImage& other) const {
    return width == other.width && height == other.height;
  }
};

// Axis-aligned pixel rectangle, inclusive origin, w x h pixels.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

double mean_intensity(const GrayImage& img);
double max_abs_diff(const GrayImage& a, const GrayImage& b);

// True when every stored intensity is finite.
bool all_finite(const GrayImage& img);

}  // namespace cmfd
