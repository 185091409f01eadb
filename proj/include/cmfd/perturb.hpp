#pragma once

#include <cstdint>
#include <string>

#include "cmfd/gray_image.hpp"

namespace cmfd {

// Post-processing operator: windowed Gaussian blur, additive Gaussian noise
// (variance on the [0, 255] intensity scale) or a baseline JPEG round-trip.
struct Perturbation {
  enum class Kind { blur, noise, jpeg };

  Kind kind = Kind::blur;
  int window = 3;       // blur: odd window size
  double sigma = 0.5;   // blur
  double mean = 0.0;    // noise
  double variance = 0;  // noise, gray-levels^2
  int quality = 80;     // jpeg

  static Perturbation gaussian_blur(int window, double sigma);
  static Perturbation gaussian_noise(double mean, double variance);
  static Perturbation jpeg_recompress(int quality);

  std::string label() const;   // e.g. "blur", "noise", "jpeg"
  double parameter() const;    // the swept parameter of the robustness grid
};

// Deterministic for a fixed seed. Noise output is clamped to [0, 255].
GrayImage perturb(const GrayImage& img, const Perturbation& op, std::uint64_t seed);

}  // namespace cmfd
