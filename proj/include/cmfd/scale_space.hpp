#pragma once

#include <vector>

#include "cmfd/gray_image.hpp"

namespace cmfd {

struct PyramidConfig {
  int octaves = 4;
  int intervals = 4;
  double beta = 1.25;       // sampling factor between octaves
  double base_sigma = 1.0;  // sigma of the first interval
  double sigma_step = 0.0;  // 0 means 2^(1/intervals), one doubling per octave

  double sigma_for_interval(int interval) const;  // interval is 1-based
  void validate() const;
};

// Levels indexed [octave][interval], both 0-based internally. All intervals
// within an octave share dimensions; octave dimensions strictly decrease.
struct Pyramid {
  std::vector<std::vector<GrayImage>> levels;
  std::vector<double> sigmas;  // per interval

  int octaves() const { return static_cast<int>(levels.size()); }
  int intervals() const { return levels.empty() ? 0 : static_cast<int>(levels[0].size()); }
  const GrayImage& level(int octave, int interval) const {  // 1-based, matching Keypoint tags
    return levels[octave - 1][interval - 1];
  }
};

// Normalized 1D Gaussian samples at offsets -radius..radius.
std::vector<double> gaussian_kernel(double sigma, int radius);

// Separable Gaussian convolution with an explicit window radius,
// replicate borders.
GrayImage gaussian_blur_window(const GrayImage& img, double sigma, int radius);

// Truncation radius ceil(3*sigma).
GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Bilinear resampling to round(w/beta) x round(h/beta). Throws when the
// output would fall below 16x16.
GrayImage downsample(const GrayImage& img, double beta);

// Octave 1 intervals blur the input with the sigma schedule; each further
// octave is seeded by downsampling the previous octave's first interval.
Pyramid build_pyramid(const GrayImage& img, const PyramidConfig& cfg);

}  // namespace cmfd
