#include "cmfd/overlay.hpp"

#include <algorithm>
#include <cmath>

namespace cmfd {

namespace {

struct Color {
  std::uint8_t r, g, b;
};

constexpr Color kLine{220, 40, 40};
constexpr Color kEndpointA{40, 200, 40};
constexpr Color kEndpointB{40, 80, 220};

void put(RgbImage& img, int x, int y, Color c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  std::uint8_t* p = &img.data[3 * (static_cast<std::size_t>(y) * img.width + x)];
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
}

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Color c) {
  const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put(img, x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_dot(RgbImage& img, int x, int y, Color c) {
  for (int dy = -2; dy <= 2; ++dy)
    for (int dx = -2; dx <= 2; ++dx)
      if (dx * dx + dy * dy <= 4) put(img, x + dx, y + dy, c);
}

}  // namespace

RgbImage render_match_overlay(const GrayImage& img, const std::vector<MatchPair>& pairs) {
  RgbImage out;
  out.width = img.width;
  out.height = img.height;
  out.data.resize(3 * img.size());
  const std::vector<std::uint8_t> gray = to_bytes(img);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    out.data[3 * i] = gray[i];
    out.data[3 * i + 1] = gray[i];
    out.data[3 * i + 2] = gray[i];
  }
  for (const MatchPair& p : pairs) {
    draw_line(out, static_cast<int>(std::lround(p.ax)), static_cast<int>(std::lround(p.ay)),
              static_cast<int>(std::lround(p.bx)), static_cast<int>(std::lround(p.by)), kLine);
  }
  for (const MatchPair& p : pairs) {
    draw_dot(out, static_cast<int>(std::lround(p.ax)), static_cast<int>(std::lround(p.ay)),
             kEndpointA);
    draw_dot(out, static_cast<int>(std::lround(p.bx)), static_cast<int>(std::lround(p.by)),
             kEndpointB);
  }
  return out;
}

void write_match_overlay(const GrayImage& img, const std::vector<MatchPair>& pairs,
                         const std::string& path) {
  save_png_rgb(render_match_overlay(img, pairs), path);
}

}  // namespace cmfd
