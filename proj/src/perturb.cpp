#include "cmfd/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cmfd/image_io.hpp"
#include "cmfd/rng.hpp"
#include "cmfd/scale_space.hpp"

namespace cmfd {

Perturbation Perturbation::gaussian_blur(int window, double sigma) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("perturb: blur window must be odd and positive");
  if (sigma <= 0.0) throw std::invalid_argument("perturb: blur sigma must be > 0");
  Perturbation p;
  p.kind = Kind::blur;
  p.window = window;
  p.sigma = sigma;
  return p;
}

Perturbation Perturbation::gaussian_noise(double mean, double variance) {
  if (variance < 0.0) throw std::invalid_argument("perturb: noise variance must be >= 0");
  Perturbation p;
  p.kind = Kind::noise;
  p.mean = mean;
  p.variance = variance;
  return p;
}

Perturbation Perturbation::jpeg_recompress(int quality) {
  if (quality < 1 || quality > 100)
    throw std::invalid_argument("perturb: jpeg quality must be in [1, 100]");
  Perturbation p;
  p.kind = Kind::jpeg;
  p.quality = quality;
  return p;
}

std::string Perturbation::label() const {
  switch (kind) {
    case Kind::blur: return "blur";
    case Kind::noise: return "noise";
    case Kind::jpeg: return "jpeg";
  }
  return "?";
}

double Perturbation::parameter() const {
  switch (kind) {
    case Kind::blur: return sigma;
    case Kind::noise: return variance;
    case Kind::jpeg: return quality;
  }
  return 0.0;
}

GrayImage perturb(const GrayImage& img, const Perturbation& op, std::uint64_t seed) {
  switch (op.kind) {
    case Perturbation::Kind::blur:
      return gaussian_blur_window(img, op.sigma, (op.window - 1) / 2);
    case Perturbation::Kind::noise: {
      GrayImage out = img;
      if (op.variance == 0.0 && op.mean == 0.0) return out;
      Rng rng(derive_seed(seed, 0x6e6f697365ull));
      const double stddev = std::sqrt(op.variance);
      for (double& v : out.data)
        v = std::clamp(v + op.mean + stddev * rng.gaussian(), 0.0, 255.0);
      return out;
    }
    case Perturbation::Kind::jpeg:
      return jpeg_roundtrip(img, op.quality);
  }
  throw std::logic_error("perturb: unknown kind");
}

}  // namespace cmfd
