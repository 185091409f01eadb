#pragma once

#include <utility>
#include <vector>

#include "cmfd/gray_image.hpp"
#include "cmfd/scale_space.hpp"

namespace cmfd {

struct HarrisConfig {
  double k = 0.05;               // corner response weight
  double t_cr_fraction = 0.02;   // threshold = fraction * max(CR) per level
  double window_sigma = 1.0;     // second moment window
  int nms_radius = 1;
  int border_margin = 8;         // descriptor support margin

  void validate() const;
};

struct Keypoint {
  double x = 0.0;  // coordinates in its own pyramid level
  double y = 0.0;
  int octave = 1;    // 1-based
  int interval = 1;  // 1-based
  double response = 0.0;
  double orientation = 0.0;  // radians in [0, 2*pi), assigned later
};

// Central differences (I(x+1) - I(x-1)) / 2 with replicate borders.
std::pair<GrayImage, GrayImage> gradients(const GrayImage& img);

// Corner response det(M) - k*tr(M)^2, where M's entries are Gaussian-window
// weighted local sums of the gradient products.
GrayImage harris_response(const GrayImage& img, const HarrisConfig& cfg);

// Per level: threshold at t_cr_fraction * max(CR), keep local maxima inside
// the border margin. Output sorted by (octave, interval, y, x).
std::vector<Keypoint> extract_keypoints(const Pyramid& pyr, const HarrisConfig& cfg);

// Single-level worker used by extract_keypoints; exposed for tests.
std::vector<Keypoint> extract_keypoints_level(const GrayImage& level, int octave, int interval,
                                              const HarrisConfig& cfg);

}  // namespace cmfd
