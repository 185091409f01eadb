#include "cmfd/forgery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "cmfd/rng.hpp"
#include "cmfd/scale_space.hpp"

namespace cmfd {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

std::string to_string(TamperFactor f) {
  switch (f) {
    case TamperFactor::naive: return "naive";
    case TamperFactor::rotation: return "rotation";
    case TamperFactor::scaling: return "scaling";
    case TamperFactor::illumination: return "illumination";
    case TamperFactor::freeform: return "freeform";
    case TamperFactor::combined: return "combined";
    case TamperFactor::none: return "none";
  }
  return "?";
}

TamperFactor tamper_factor_from_string(const std::string& s) {
  if (s == "naive") return TamperFactor::naive;
  if (s == "rotation") return TamperFactor::rotation;
  if (s == "scaling") return TamperFactor::scaling;
  if (s == "illumination") return TamperFactor::illumination;
  if (s == "freeform") return TamperFactor::freeform;
  if (s == "combined") return TamperFactor::combined;
  if (s == "none") return TamperFactor::none;
  throw std::invalid_argument("unknown tamper factor '" + s + "'");
}

std::string ground_truth_to_json(const ForgeryGroundTruth& gt) {
  nlohmann::json j;
  j["source_rect"] = {{"x", gt.source_rect.x},
                      {"y", gt.source_rect.y},
                      {"w", gt.source_rect.w},
                      {"h", gt.source_rect.h}};
  j["dest_center"] = {gt.dest_cx, gt.dest_cy};
  j["rotation"] = gt.rotation;
  j["scale"] = gt.scale;
  j["translation"] = {gt.tx, gt.ty};
  return j.dump(2);
}

ForgeryGroundTruth ground_truth_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ForgeryGroundTruth gt;
  gt.source_rect.x = j.at("source_rect").at("x").get<int>();
  gt.source_rect.y = j.at("source_rect").at("y").get<int>();
  gt.source_rect.w = j.at("source_rect").at("w").get<int>();
  gt.source_rect.h = j.at("source_rect").at("h").get<int>();
  gt.dest_cx = j.at("dest_center").at(0).get<double>();
  gt.dest_cy = j.at("dest_center").at(1).get<double>();
  gt.rotation = j.at("rotation").get<double>();
  gt.scale = j.at("scale").get<double>();
  gt.tx = j.at("translation").at(0).get<double>();
  gt.ty = j.at("translation").at(1).get<double>();
  return gt;
}

std::pair<GrayImage, ForgeryGroundTruth> synth_forgery(const GrayImage& img,
                                                       const ForgeryGroundTruth& request,
                                                       std::uint64_t /*seed*/) {
  const Rect& r = request.source_rect;
  if (r.w <= 0 || r.h <= 0) throw std::invalid_argument("synth_forgery: empty source rect");
  if (r.x < 0 || r.y < 0 || r.x + r.w > img.width || r.y + r.h > img.height)
    throw std::invalid_argument("synth_forgery: source rect outside image");
  if (request.scale < 0.5 || request.scale > 2.0)
    throw std::invalid_argument("synth_forgery: scale must be in [0.5, 2]");
  if (request.rotation < 0.0 || request.rotation >= kTwoPi)
    throw std::invalid_argument("synth_forgery: rotation must be in [0, 2*pi)");

  ForgeryGroundTruth gt = request;
  const double cx = gt.source_cx();
  const double cy = gt.source_cy();
  gt.dest_cx = cx + gt.tx;
  gt.dest_cy = cy + gt.ty;

  const double cosr = std::cos(gt.rotation);
  const double sinr = std::sin(gt.rotation);

  // bounding box of the transformed source corners at the destination
  double minx = 1e30, miny = 1e30, maxx = -1e30, maxy = -1e30;
  const double xs[2] = {static_cast<double>(r.x), static_cast<double>(r.x + r.w - 1)};
  const double ys[2] = {static_cast<double>(r.y), static_cast<double>(r.y + r.h - 1)};
  for (double sx : xs) {
    for (double sy : ys) {
      const double dx = gt.scale * (cosr * (sx - cx) - sinr * (sy - cy)) + gt.dest_cx;
      const double dy = gt.scale * (sinr * (sx - cx) + cosr * (sy - cy)) + gt.dest_cy;
      minx = std::min(minx, dx);
      miny = std::min(miny, dy);
      maxx = std::max(maxx, dx);
      maxy = std::max(maxy, dy);
    }
  }
  if (minx < 0.0 || miny < 0.0 || maxx > img.width - 1.0 || maxy > img.height - 1.0)
    throw std::invalid_argument("synth_forgery: pasted region out of bounds");

  GrayImage out = img;
  const int x0 = static_cast<int>(std::ceil(minx));
  const int x1 = static_cast<int>(std::floor(maxx));
  const int y0 = static_cast<int>(std::ceil(miny));
  const int y1 = static_cast<int>(std::floor(maxy));
  const double inv_scale = 1.0 / gt.scale;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      // inverse map into the source frame
      const double rx = (x - gt.dest_cx) * inv_scale;
      const double ry = (y - gt.dest_cy) * inv_scale;
      const double sx = cosr * rx + sinr * ry + cx;
      const double sy = -sinr * rx + cosr * ry + cy;
      if (sx < xs[0] || sx > xs[1] || sy < ys[0] || sy > ys[1]) continue;
      out.at(x, y) = img.sample(sx, sy);
    }
  }
  return {std::move(out), gt};
}

namespace {

// C1 value-noise layer: random lattice values, smoothstep-interpolated.
// Parametric shapes are deliberately avoided; repeated primitives act like
// similar genuine objects and poison the false-positive rate.
void add_noise_layer(GrayImage& img, Rng& rng, int cell, double amplitude) {
  const int gw = img.width / cell + 2;
  const int gh = img.height / cell + 2;
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (double& v : grid) v = rng.uniform(-amplitude, amplitude);

  for (int y = 0; y < img.height; ++y) {
    const double gy = static_cast<double>(y) / cell;
    const int iy = static_cast<int>(gy);
    const double ty = gy - iy;
    const double fy = ty * ty * (3.0 - 2.0 * ty);
    for (int x = 0; x < img.width; ++x) {
      const double gx = static_cast<double>(x) / cell;
      const int ix = static_cast<int>(gx);
      const double tx = gx - ix;
      const double fx = tx * tx * (3.0 - 2.0 * tx);
      const double a = grid[iy * gw + ix];
      const double b = grid[iy * gw + ix + 1];
      const double c = grid[(iy + 1) * gw + ix];
      const double d = grid[(iy + 1) * gw + ix + 1];
      const double top = a + fx * (b - a);
      const double bot = c + fx * (d - c);
      img.at(x, y) += top + fy * (bot - top);
    }
  }
}

}  // namespace

GrayImage make_textured_image(int width, int height, std::uint64_t seed) {
  if (width < 16 || height < 16)
    throw std::invalid_argument("make_textured_image: too small");
  Rng rng(derive_seed(seed, 0x7465787475726530ull));

  constexpr double fine_amp = 80.0;   // varies 4x4 patch means
  constexpr double spk_amp = 22.0;    // per-location uniqueness
  constexpr double spk_blur = 1.4;    // keeps speckle resample-tolerant
  constexpr double strong_frac = 0.12;
  constexpr double env_ramp = 0.10;

  // coarse luminance structure, unique at every pyramid scale
  GrayImage img(width, height, 127.0);
  add_noise_layer(img, rng, 64, 50.0);
  add_noise_layer(img, rng, 32, 34.0);
  add_noise_layer(img, rng, 16, 30.0);
  add_noise_layer(img, rng, 12, 26.0);

  // detail field: a fine layer that varies 4x4 patch means plus band-limited
  // speckle that makes every neighborhood unique
  GrayImage detail(width, height, 0.0);
  add_noise_layer(detail, rng, 6, fine_amp);
  GrayImage speckle(width, height);
  for (double& v : speckle.data) v = rng.gaussian() * spk_amp;
  if (spk_blur > 0) speckle = gaussian_blur_window(speckle, spk_blur, 3);
  for (std::size_t i = 0; i < detail.data.size(); ++i) detail.data[i] += speckle.data[i];

  // contrast envelope with large dead zones, like the flat regions of a
  // natural photo; the relative corner threshold then prunes them. The
  // cutoff is a per-image quantile so the strong fraction, and with it the
  // keypoint and candidate load, stays stable across seeds.
  GrayImage env(width, height, 0.0);
  add_noise_layer(env, rng, 80, 1.0);
  for (double& v : env.data) v = std::abs(v);
  std::vector<double> sorted;
  sorted.reserve(env.data.size() / 4 + 1);
  for (std::size_t i = 0; i < env.data.size(); i += 4) sorted.push_back(env.data[i]);
  std::sort(sorted.begin(), sorted.end());
  const double cut =
      sorted[static_cast<std::size_t>((sorted.size() - 1) * (1.0 - strong_frac))];
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const double t = std::clamp((env.data[i] - cut) / env_ramp, 0.0, 1.0);
    const double gain = 0.06 + 1.1 * (t * t * (3.0 - 2.0 * t));
    img.data[i] = std::clamp(img.data[i] + gain * detail.data[i], 2.0, 253.0);
  }
  return img;
}

namespace {

// bounding box of the transformed source corners stays inside the image
bool paste_in_bounds(const GrayImage& img, const ForgeryGroundTruth& request) {
  const Rect& r = request.source_rect;
  const double cx = request.source_cx();
  const double cy = request.source_cy();
  const double cosr = std::cos(request.rotation);
  const double sinr = std::sin(request.rotation);
  const double xs[2] = {static_cast<double>(r.x), static_cast<double>(r.x + r.w - 1)};
  const double ys[2] = {static_cast<double>(r.y), static_cast<double>(r.y + r.h - 1)};
  for (double sx : xs) {
    for (double sy : ys) {
      const double dx = request.scale * (cosr * (sx - cx) - sinr * (sy - cy)) + cx + request.tx;
      const double dy = request.scale * (sinr * (sx - cx) + cosr * (sy - cy)) + cy + request.ty;
      if (dx < 0.0 || dy < 0.0 || dx > img.width - 1.0 || dy > img.height - 1.0) return false;
    }
  }
  return true;
}

// mean squared central-difference gradient over the rect
double rect_gradient_energy(const GrayImage& img, const Rect& r) {
  double sum = 0.0;
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      const double gx = (img.at_clamped(x + 1, y) - img.at_clamped(x - 1, y)) / 2.0;
      const double gy = (img.at_clamped(x, y + 1) - img.at_clamped(x, y - 1)) / 2.0;
      sum += gx * gx + gy * gy;
    }
  }
  return sum / (static_cast<double>(r.w) * r.h);
}

}  // namespace

std::vector<CorpusEntry> generate_corpus(int n, TamperFactor factor, std::uint64_t seed,
                                         int image_size, int patch_size,
                                         double min_translation) {
  if (n < 1) throw std::invalid_argument("generate_corpus: n must be >= 1");
  if (factor != TamperFactor::naive && factor != TamperFactor::rotation &&
      factor != TamperFactor::scaling)
    throw std::invalid_argument("generate_corpus: unsupported tamper factor " +
                                to_string(factor));

  std::vector<CorpusEntry> corpus;
  corpus.reserve(2 * n);
  const int margin = 12;

  for (int i = 0; i < n; ++i) {
    const std::uint64_t img_seed = derive_seed(seed, 2 * static_cast<std::uint64_t>(i));
    Rng rng(derive_seed(img_seed, 0x706c616365ull));
    GrayImage base = make_textured_image(image_size, image_size, img_seed);

    ForgeryGroundTruth request;
    request.source_rect.w = patch_size;
    request.source_rect.h = patch_size;
    if (factor == TamperFactor::rotation) {
      const double rots[3] = {M_PI / 6.0, M_PI / 2.0, M_PI};
      request.rotation = rots[rng.below(3)];
    } else if (factor == TamperFactor::scaling) {
      const double scales[2] = {0.9, 1.1};
      request.scale = scales[rng.below(2)];
    }

    // place the copy on textured area, the way a forger copies an object
    // rather than empty background: among feasible placements keep the one
    // whose source rect has the highest gradient energy
    bool placed = false;
    double best_energy = -1.0;
    ForgeryGroundTruth best_spec;
    for (int attempt = 0; attempt < 240; ++attempt) {
      request.source_rect.x = rng.uniform_int(margin, image_size - patch_size - margin);
      request.source_rect.y = rng.uniform_int(margin, image_size - patch_size - margin);
      const double dir = rng.uniform(0.0, 2.0 * M_PI);
      const double mag = rng.uniform(min_translation, 2.5 * min_translation);
      request.tx = std::round(mag * std::cos(dir));
      request.ty = std::round(mag * std::sin(dir));
      if (std::hypot(request.tx, request.ty) < min_translation) continue;
      if (!paste_in_bounds(base, request)) continue;
      const double energy = rect_gradient_energy(base, request.source_rect);
      if (energy > best_energy) {
        best_energy = energy;
        best_spec = request;
        placed = true;
      }
    }
    if (!placed) throw std::runtime_error("generate_corpus: could not place forgery");
    auto [tampered, gt] = synth_forgery(base, best_spec, img_seed);
    corpus.push_back({"forged_" + std::to_string(i), std::move(tampered), true, factor, gt});

    const std::uint64_t gen_seed = derive_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1);
    corpus.push_back({"genuine_" + std::to_string(i),
                      make_textured_image(image_size, image_size, gen_seed), false,
                      TamperFactor::none, std::nullopt});
  }
  return corpus;
}

}  // namespace cmfd
