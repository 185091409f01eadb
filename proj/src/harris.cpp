#include "cmfd/harris.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmfd {

void HarrisConfig::validate() const {
  if (k <= 0.0) throw std::invalid_argument("HarrisConfig: k must be > 0");
  if (t_cr_fraction <= 0.0 || t_cr_fraction > 1.0)
    throw std::invalid_argument("HarrisConfig: t_cr_fraction must be in (0, 1]");
  if (window_sigma <= 0.0) throw std::invalid_argument("HarrisConfig: window_sigma must be > 0");
  if (nms_radius < 1) throw std::invalid_argument("HarrisConfig: nms_radius must be >= 1");
  if (border_margin < 0) throw std::invalid_argument("HarrisConfig: negative border margin");
}

std::pair<GrayImage, GrayImage> gradients(const GrayImage& img) {
  if (img.width < 3 || img.height < 3)
    throw std::invalid_argument("gradients: image must be at least 3x3");
  GrayImage ix(img.width, img.height);
  GrayImage iy(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      ix.at(x, y) = (img.at_clamped(x + 1, y) - img.at_clamped(x - 1, y)) / 2.0;
      iy.at(x, y) = (img.at_clamped(x, y + 1) - img.at_clamped(x, y - 1)) / 2.0;
    }
  }
  return {std::move(ix), std::move(iy)};
}

GrayImage harris_response(const GrayImage& img, const HarrisConfig& cfg) {
  cfg.validate();
  if (img.width < 5 || img.height < 5)
    throw std::invalid_argument("harris_response: image must be at least 5x5");
  auto [ix, iy] = gradients(img);

  GrayImage ixx(img.width, img.height);
  GrayImage iyy(img.width, img.height);
  GrayImage ixy(img.width, img.height);
  for (std::size_t i = 0; i < ix.data.size(); ++i) {
    ixx.data[i] = ix.data[i] * ix.data[i];
    iyy.data[i] = iy.data[i] * iy.data[i];
    ixy.data[i] = ix.data[i] * iy.data[i];
  }
  const int radius = static_cast<int>(std::ceil(3.0 * cfg.window_sigma));
  const GrayImage a = gaussian_blur_window(ixx, cfg.window_sigma, radius);
  const GrayImage b = gaussian_blur_window(iyy, cfg.window_sigma, radius);
  const GrayImage c = gaussian_blur_window(ixy, cfg.window_sigma, radius);

  GrayImage cr(img.width, img.height);
  for (std::size_t i = 0; i < cr.data.size(); ++i) {
    const double det = a.data[i] * b.data[i] - c.data[i] * c.data[i];
    const double tr = a.data[i] + b.data[i];
    cr.data[i] = det - cfg.k * tr * tr;
  }
  return cr;
}

std::vector<Keypoint> extract_keypoints_level(const GrayImage& level, int octave, int interval,
                                              const HarrisConfig& cfg) {
  std::vector<Keypoint> out;
  if (level.width < 5 || level.height < 5) return out;
  const GrayImage cr = harris_response(level, cfg);

  double max_cr = 0.0;
  for (double v : cr.data) max_cr = std::max(max_cr, v);
  if (max_cr <= 0.0) return out;
  const double threshold = cfg.t_cr_fraction * max_cr;

  const int m = cfg.border_margin;
  const int r = cfg.nms_radius;
  for (int y = m; y < level.height - m; ++y) {
    for (int x = m; x < level.width - m; ++x) {
      const double v = cr.at(x, y);
      if (v < threshold) continue;
      // local maximum; plateau ties resolve to the first point in scan order
      bool is_max = true;
      for (int dy = -r; dy <= r && is_max; ++dy) {
        for (int dx = -r; dx <= r && is_max; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const double nv = cr.at_clamped(x + dx, y + dy);
          if (nv > v || (nv == v && (dy < 0 || (dy == 0 && dx < 0)))) is_max = false;
        }
      }
      if (is_max)
        out.push_back({static_cast<double>(x), static_cast<double>(y), octave, interval, v, 0.0});
    }
  }
  return out;
}

std::vector<Keypoint> extract_keypoints(const Pyramid& pyr, const HarrisConfig& cfg) {
  cfg.validate();
  std::vector<Keypoint> all;
  for (int o = 1; o <= pyr.octaves(); ++o) {
    for (int i = 1; i <= pyr.intervals(); ++i) {
      std::vector<Keypoint> pts = extract_keypoints_level(pyr.level(o, i), o, i, cfg);
      all.insert(all.end(), pts.begin(), pts.end());
    }
  }
  std::sort(all.begin(), all.end(), [](const Keypoint& a, const Keypoint& b) {
    if (a.octave != b.octave) return a.octave < b.octave;
    if (a.interval != b.interval) return a.interval < b.interval;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  return all;
}

}  // namespace cmfd
