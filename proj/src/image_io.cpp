#include "cmfd/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace cmfd {

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_image: cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.empty()) throw std::runtime_error("load_image: empty file '" + path + "'");
  return bytes;
}

bool has_png_magic(const std::vector<std::uint8_t>& b) {
  static const std::uint8_t magic[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  return b.size() >= 8 && std::memcmp(b.data(), magic, 8) == 0;
}

bool has_jpeg_magic(const std::vector<std::uint8_t>& b) {
  return b.size() >= 2 && b[0] == 0xff && b[1] == 0xd8;
}

bool has_pgm_magic(const std::vector<std::uint8_t>& b) {
  return b.size() >= 2 && b[0] == 'P' && (b[1] == '5' || b[1] == '2');
}

GrayImage gray_from_rgb8(int w, int h, const std::uint8_t* rgb) {
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t* p = rgb + 3 * (static_cast<std::size_t>(y) * w + x);
      // achromatic pixels decode exactly; the weights sum to 1 only in
      // decimal
      out.at(x, y) = (p[0] == p[1] && p[1] == p[2]) ? static_cast<double>(p[0])
                                                    : luminance(p[0], p[1], p[2]);
    }
  }
  return out;
}

GrayImage decode_png(const std::string& path) {
  png_image im;
  std::memset(&im, 0, sizeof(im));
  im.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&im, path.c_str()))
    throw std::runtime_error("load_image: PNG read failed: " + std::string(im.message));
  im.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(im));
  if (!png_image_finish_read(&im, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = im.message;
    png_image_free(&im);
    throw std::runtime_error("load_image: PNG decode failed: " + msg);
  }
  const int w = static_cast<int>(im.width);
  const int h = static_cast<int>(im.height);
  if (w <= 0 || h <= 0) throw std::runtime_error("load_image: zero-dimension PNG");
  return gray_from_rgb8(w, h, buf.data());
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

GrayImage decode_jpeg_bytes(const std::uint8_t* bytes, std::size_t len) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error(std::string("load_image: JPEG decode failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, const_cast<unsigned char*>(bytes), static_cast<unsigned long>(len));
  jpeg_read_header(&cinfo, TRUE);
  const bool color = cinfo.num_components > 1;
  cinfo.out_color_space = color ? JCS_RGB : JCS_GRAYSCALE;
  jpeg_start_decompress(&cinfo);
  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  if (w <= 0 || h <= 0) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("load_image: zero-dimension JPEG");
  }
  const int nc = cinfo.output_components;
  std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * nc);
  GrayImage out(w, h);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    JSAMPROW rp = row.data();
    jpeg_read_scanlines(&cinfo, &rp, 1);
    for (int x = 0; x < w; ++x) {
      if (nc == 3) {
        const std::uint8_t r = row[3 * x], g = row[3 * x + 1], b = row[3 * x + 2];
        out.at(x, y) = (r == g && g == b) ? static_cast<double>(r) : luminance(r, g, b);
      } else {
        out.at(x, y) = row[x];
      }
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

int pgm_next_int(const std::vector<std::uint8_t>& b, std::size_t& pos) {
  // skip whitespace and '#' comment lines
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size() || !std::isdigit(b[pos]))
    throw std::runtime_error("load_image: malformed PGM header");
  int v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + (b[pos] - '0');
    ++pos;
  }
  return v;
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  const bool binary = bytes[1] == '5';
  std::size_t pos = 2;
  const int w = pgm_next_int(bytes, pos);
  const int h = pgm_next_int(bytes, pos);
  const int maxval = pgm_next_int(bytes, pos);
  if (w <= 0 || h <= 0) throw std::runtime_error("load_image: zero-dimension PGM");
  if (maxval <= 0 || maxval > 255)
    throw std::runtime_error("load_image: unsupported PGM maxval " + std::to_string(maxval));
  GrayImage out(w, h);
  if (binary) {
    ++pos;  // single whitespace after maxval
    if (bytes.size() - pos < static_cast<std::size_t>(w) * h)
      throw std::runtime_error("load_image: truncated PGM data");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(x, y) = bytes[pos++];
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(x, y) = pgm_next_int(bytes, pos);
  }
  return out;
}

}  // namespace

GrayImage load_image(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  GrayImage img;
  if (has_png_magic(bytes))
    img = decode_png(path);
  else if (has_jpeg_magic(bytes))
    img = decode_jpeg_bytes(bytes.data(), bytes.size());
  else if (has_pgm_magic(bytes))
    img = decode_pgm(bytes);
  else
    throw std::runtime_error("load_image: unsupported format '" + path + "'");
  if (!all_finite(img)) throw std::runtime_error("load_image: non-finite intensities");
  return img;
}

std::vector<std::uint8_t> to_bytes(const GrayImage& img) {
  std::vector<std::uint8_t> bytes(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = std::clamp(img.data[i], 0.0, 255.0);
    bytes[i] = static_cast<std::uint8_t>(std::llround(v));
  }
  return bytes;
}

void save_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_image: cannot open '" + path + "'");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  const std::vector<std::uint8_t> bytes = to_bytes(img);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("save_image: write failed '" + path + "'");
}

void save_png(const GrayImage& img, const std::string& path) {
  const std::vector<std::uint8_t> bytes = to_bytes(img);
  png_image im;
  std::memset(&im, 0, sizeof(im));
  im.version = PNG_IMAGE_VERSION;
  im.width = static_cast<png_uint_32>(img.width);
  im.height = static_cast<png_uint_32>(img.height);
  im.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&im, path.c_str(), 0, bytes.data(), 0, nullptr))
    throw std::runtime_error("save_image: PNG write failed: " + std::string(im.message));
}

void save_png_rgb(const RgbImage& img, const std::string& path) {
  png_image im;
  std::memset(&im, 0, sizeof(im));
  im.version = PNG_IMAGE_VERSION;
  im.width = static_cast<png_uint_32>(img.width);
  im.height = static_cast<png_uint_32>(img.height);
  im.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&im, path.c_str(), 0, img.data.data(), 0, nullptr))
    throw std::runtime_error("save_png_rgb: PNG write failed: " + std::string(im.message));
}

void save_image(const GrayImage& img, const std::string& path) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == "png")
    save_png(img, path);
  else if (ext == "pgm")
    save_pgm(img, path);
  else
    throw std::runtime_error("save_image: unsupported extension '" + ext + "'");
}

GrayImage jpeg_roundtrip(const GrayImage& img, int quality) {
  if (quality < 1 || quality > 100)
    throw std::invalid_argument("jpeg_roundtrip: quality must be in [1, 100]");
  const std::vector<std::uint8_t> gray = to_bytes(img);

  jpeg_compress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  unsigned char* out_buf = nullptr;
  unsigned long out_len = 0;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    if (out_buf) std::free(out_buf);
    throw std::runtime_error(std::string("jpeg_roundtrip: encode failed: ") + err.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_mem_dest(&cinfo, &out_buf, &out_len);
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = 1;
  cinfo.in_color_space = JCS_GRAYSCALE;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(gray.data() +
                                        static_cast<std::size_t>(cinfo.next_scanline) * img.width);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);

  std::unique_ptr<unsigned char, decltype(&std::free)> guard(out_buf, &std::free);
  return decode_jpeg_bytes(out_buf, out_len);
}

}  // namespace cmfd
