#include "cmfd/gray_image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmfd {

GrayImage::GrayImage(int w, int h, double fill) : width(w), height(h) {
  if (w < 0 || h < 0) throw std::invalid_argument("GrayImage: negative dimensions");
  data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

double GrayImage::at_clamped(int x, int y) const {
  x = std::clamp(x, 0, width - 1);
  y = std::clamp(y, 0, height - 1);
  return at(x, y);
}

double GrayImage::sample(double x, double y) const {
  x = std::clamp(x, 0.0, static_cast<double>(width - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height - 1));
  int x0 = std::min(static_cast<int>(x), width - 2);
  int y0 = std::min(static_cast<int>(y), height - 2);
  if (width == 1) x0 = 0;
  if (height == 1) y0 = 0;
  const double fx = x - x0;
  const double fy = y - y0;
  const int x1 = std::min(x0 + 1, width - 1);
  const int y1 = std::min(y0 + 1, height - 1);
  // Two-stage lerp keeps constants exact: a + f*(b-a) == a when a == b.
  const double top = at(x0, y0) + fx * (at(x1, y0) - at(x0, y0));
  const double bot = at(x0, y1) + fx * (at(x1, y1) - at(x0, y1));
  return top + fy * (bot - top);
}

double mean_intensity(const GrayImage& img) {
  if (img.data.empty()) return 0.0;
  double sum = 0.0;
  for (double v : img.data) sum += v;
  return sum / static_cast<double>(img.data.size());
}

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
  if (!a.same_size(b)) throw std::invalid_argument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

bool all_finite(const GrayImage& img) {
  for (double v : img.data)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace cmfd
