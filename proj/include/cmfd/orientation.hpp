#pragma once

#include <array>
#include <cmath>
#include <utility>

#include "cmfd/gray_image.hpp"
#include "cmfd/harris.hpp"

namespace cmfd {

inline constexpr int kPatchSize = 4;
using PatchMatrix = std::array<std::array<double, kPatchSize>, kPatchSize>;

// Ten-bin gradient histogram over [0, 2*pi).
struct OrientationHistogram {
  static constexpr int kBins = 10;
  static constexpr double bin_width = 2.0 * M_PI / kBins;

  std::array<double, kBins> bins{};

  static int bin_of(double theta);
  void accumulate(double theta, double magnitude) { bins[bin_of(theta)] += magnitude; }
  double mass() const;
  // index of the maximal bin, ties toward the lowest index
  int argmax() const;
  static double bin_center(int bin) { return (bin + 0.5) * bin_width; }
};

// Gradient magnitude and full-quadrant angle remapped to [0, 2*pi).
// Zero gradient yields angle 0.
std::pair<GrayImage, GrayImage> gradient_polar(const GrayImage& level);

// Magnitude-weighted histogram over the (2*radius+1)^2 window; the keypoint
// orientation is the center angle of the winning bin.
Keypoint assign_orientation(const Keypoint& kp, const GrayImage& magnitude,
                            const GrayImage& angle, int radius = 4);

// 4x4 neighborhood on the unit-spacing grid rotated by the keypoint
// orientation, sampled bilinearly. Row index follows the y offset.
PatchMatrix sample_oriented_patch(const GrayImage& level, const Keypoint& kp);

}  // namespace cmfd
