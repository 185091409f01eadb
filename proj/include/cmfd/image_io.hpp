#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cmfd/gray_image.hpp"

namespace cmfd {

// ITU-R BT.601 luminance from 8-bit RGB.
inline double luminance(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

// Decodes PNG, JPEG or PGM (magic-sniffed). Color inputs are converted to
// BT.601 luminance. Throws std::runtime_error on unreadable files,
// unsupported formats or zero-dimension images.
GrayImage load_image(const std::string& path);

// Encodes 8-bit grayscale PNG or PGM, selected by file extension.
// Intensities are rounded and clamped to [0, 255].
void save_image(const GrayImage& img, const std::string& path);

void save_pgm(const GrayImage& img, const std::string& path);
void save_png(const GrayImage& img, const std::string& path);

// Interleaved 8-bit RGB buffer, used for match overlays.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 bytes per pixel, row-major
};

void save_png_rgb(const RgbImage& img, const std::string& path);

// Baseline JFIF encode at the given quality factor followed by decode,
// entirely in memory. quality in [1, 100].
GrayImage jpeg_roundtrip(const GrayImage& img, int quality);

// Rounds and clamps intensities to 8-bit, the quantization applied by every
// encoder above.
std::vector<std::uint8_t> to_bytes(const GrayImage& img);

}  // namespace cmfd
