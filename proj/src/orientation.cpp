#include "cmfd/orientation.hpp"

#include <algorithm>
#include <stdexcept>

namespace cmfd {

int OrientationHistogram::bin_of(double theta) {
  int bin = static_cast<int>(std::floor(theta / bin_width));
  bin %= kBins;
  if (bin < 0) bin += kBins;
  return bin;
}

double OrientationHistogram::mass() const {
  double m = 0.0;
  for (double b : bins) m += b;
  return m;
}

int OrientationHistogram::argmax() const {
  int best = 0;
  for (int i = 1; i < kBins; ++i)
    if (bins[i] > bins[best]) best = i;
  return best;
}

std::pair<GrayImage, GrayImage> gradient_polar(const GrayImage& level) {
  if (level.width < 3 || level.height < 3)
    throw std::invalid_argument("gradient_polar: image must be at least 3x3");
  auto [ix, iy] = gradients(level);
  GrayImage mag(level.width, level.height);
  GrayImage ang(level.width, level.height);
  for (std::size_t i = 0; i < mag.data.size(); ++i) {
    const double gx = ix.data[i];
    const double gy = iy.data[i];
    mag.data[i] = std::sqrt(gx * gx + gy * gy);
    if (gx == 0.0 && gy == 0.0) {
      ang.data[i] = 0.0;
    } else {
      double t = std::atan2(gy, gx);
      if (t < 0.0) t += 2.0 * M_PI;
      if (t >= 2.0 * M_PI) t = 0.0;
      ang.data[i] = t;
    }
  }
  return {std::move(mag), std::move(ang)};
}

Keypoint assign_orientation(const Keypoint& kp, const GrayImage& magnitude,
                            const GrayImage& angle, int radius) {
  const int cx = static_cast<int>(std::lround(kp.x));
  const int cy = static_cast<int>(std::lround(kp.y));
  OrientationHistogram hist;
  double total = 0.0;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const int x = std::clamp(cx + dx, 0, magnitude.width - 1);
      const int y = std::clamp(cy + dy, 0, magnitude.height - 1);
      const double m = magnitude.at(x, y);
      hist.accumulate(angle.at(x, y), m);
      total += m;
    }
  }
  Keypoint out = kp;
  if (total <= 0.0) {
    out.orientation = 0.0;
    return out;
  }

  // The histogram picks the dominant direction; the orientation itself is
  // the angle of the strongest gradient sample near that mode. A bin-center
  // orientation would quantize to 36 degrees, which mis-aligns the sampling
  // frames of corresponding points by up to half a bin and breaks matching
  // under rotation.
  const int best = hist.argmax();
  double best_mag = -1.0;
  double theta = 0.0;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const int x = std::clamp(cx + dx, 0, magnitude.width - 1);
      const int y = std::clamp(cy + dy, 0, magnitude.height - 1);
      const double m = magnitude.at(x, y);
      if (m <= best_mag) continue;
      const int bin = OrientationHistogram::bin_of(angle.at(x, y));
      const int dist = std::abs(bin - best);
      if (std::min(dist, OrientationHistogram::kBins - dist) > 1) continue;
      best_mag = m;
      theta = angle.at(x, y);
    }
  }
  out.orientation = best_mag > 0.0 ? theta : 0.0;
  return out;
}

PatchMatrix sample_oriented_patch(const GrayImage& level, const Keypoint& kp) {
  const double c = std::cos(kp.orientation);
  const double s = std::sin(kp.orientation);
  PatchMatrix patch;
  for (int r = 0; r < kPatchSize; ++r) {
    const double v = r - (kPatchSize - 1) / 2.0;
    for (int col = 0; col < kPatchSize; ++col) {
      const double u = col - (kPatchSize - 1) / 2.0;
      const double ru = c * u - s * v;
      const double rv = s * u + c * v;
      patch[r][col] = level.sample(kp.x + ru, kp.y + rv);
    }
  }
  return patch;
}

}  // namespace cmfd
