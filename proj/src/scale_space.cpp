#include "cmfd/scale_space.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cmfd {

namespace {
constexpr int kMinLevelSize = 16;
}

double PyramidConfig::sigma_for_interval(int interval) const {
  const double s = sigma_step > 0.0 ? sigma_step : std::pow(2.0, 1.0 / intervals);
  return base_sigma * std::pow(s, interval - 1);
}

void PyramidConfig::validate() const {
  if (octaves < 1) throw std::invalid_argument("PyramidConfig: octaves must be >= 1");
  if (intervals < 1) throw std::invalid_argument("PyramidConfig: intervals must be >= 1");
  if (beta <= 1.0) throw std::invalid_argument("PyramidConfig: beta must be > 1");
  if (base_sigma <= 0.0) throw std::invalid_argument("PyramidConfig: base_sigma must be > 0");
  if (sigma_step != 0.0 && sigma_step <= 1.0)
    throw std::invalid_argument("PyramidConfig: sigma_step must be > 1");
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[i + radius] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

GrayImage gaussian_blur_window(const GrayImage& img, double sigma, int radius) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_blur: sigma must be > 0");
  if (radius < 0) throw std::invalid_argument("gaussian_blur: negative radius");
  const std::vector<double> k = gaussian_kernel(sigma, radius);
  const int w = img.width, h = img.height;

  GrayImage tmp(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * img.at_clamped(x + i, y);
      tmp.at(x, y) = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp.at_clamped(x, y + i);
      out.at(x, y) = acc;
    }
  }
  return out;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  return gaussian_blur_window(img, sigma, static_cast<int>(std::ceil(3.0 * sigma)));
}

GrayImage downsample(const GrayImage& img, double beta) {
  if (beta <= 1.0) throw std::invalid_argument("downsample: beta must be > 1");
  const int dw = static_cast<int>(std::llround(img.width / beta));
  const int dh = static_cast<int>(std::llround(img.height / beta));
  if (dw < kMinLevelSize || dh < kMinLevelSize)
    throw std::invalid_argument("downsample: output " + std::to_string(dw) + "x" +
                                std::to_string(dh) + " below minimum " +
                                std::to_string(kMinLevelSize));
  const double sx = static_cast<double>(img.width) / dw;
  const double sy = static_cast<double>(img.height) / dh;
  GrayImage out(dw, dh);
  for (int y = 0; y < dh; ++y) {
    for (int x = 0; x < dw; ++x) {
      // pixel-center alignment
      out.at(x, y) = img.sample((x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
    }
  }
  return out;
}

Pyramid build_pyramid(const GrayImage& img, const PyramidConfig& cfg) {
  cfg.validate();
  if (img.width < kMinLevelSize || img.height < kMinLevelSize)
    throw std::invalid_argument("build_pyramid: image below minimum entry size");

  Pyramid pyr;
  pyr.sigmas.resize(cfg.intervals);
  for (int i = 1; i <= cfg.intervals; ++i) pyr.sigmas[i - 1] = cfg.sigma_for_interval(i);

  GrayImage seed;
  for (int o = 1; o <= cfg.octaves; ++o) {
    if (o > 1) seed = downsample(pyr.levels[o - 2][0], cfg.beta);
    std::vector<GrayImage> octave;
    octave.reserve(cfg.intervals);
    for (int i = 1; i <= cfg.intervals; ++i)
      octave.push_back(gaussian_blur(o == 1 ? img : seed, pyr.sigmas[i - 1]));
    pyr.levels.push_back(std::move(octave));
  }
  return pyr;
}

}  // namespace cmfd
