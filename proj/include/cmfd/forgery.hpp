#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmfd/gray_image.hpp"

namespace cmfd {

enum class TamperFactor { naive, rotation, scaling, illumination, freeform, combined, none };

std::string to_string(TamperFactor f);
TamperFactor tamper_factor_from_string(const std::string& s);

// Exact transform applied to the copied region. dest_center is always
// source center + translation; synth_forgery fills it in.
struct ForgeryGroundTruth {
  Rect source_rect;
  double dest_cx = 0.0;
  double dest_cy = 0.0;
  double rotation = 0.0;  // radians in [0, 2*pi)
  double scale = 1.0;     // in [0.5, 2]
  double tx = 0.0;        // translation, pixels
  double ty = 0.0;

  double source_cx() const { return source_rect.x + (source_rect.w - 1) / 2.0; }
  double source_cy() const { return source_rect.y + (source_rect.h - 1) / 2.0; }
};

std::string ground_truth_to_json(const ForgeryGroundTruth& gt);
ForgeryGroundTruth ground_truth_from_json(const std::string& text);

// Copies source_rect, rotates/scales it about its own center with bilinear
// interpolation and pastes it at source center + translation. Pure
// translation reproduces source pixels bit-exactly. Throws when the pasted
// region leaves the image. Returns the tampered image and the completed
// ground truth.
std::pair<GrayImage, ForgeryGroundTruth> synth_forgery(const GrayImage& img,
                                                       const ForgeryGroundTruth& request,
                                                       std::uint64_t seed);

// Seeded synthetic test image: smooth aperiodic background plus scattered
// anti-aliased shapes, giving dense distinctive corners.
GrayImage make_textured_image(int width, int height, std::uint64_t seed);

struct CorpusEntry {
  std::string name;
  GrayImage image;
  bool forged = false;
  TamperFactor factor = TamperFactor::none;
  std::optional<ForgeryGroundTruth> gt;
};

// n forged plus n genuine textured images. Forged entries copy a patch_size
// square by at least min_translation pixels; rotation entries draw from
// {pi/6, pi/2, pi}, scaling entries from {0.9, 1.1}.
std::vector<CorpusEntry> generate_corpus(int n, TamperFactor factor, std::uint64_t seed,
                                         int image_size = 512, int patch_size = 64,
                                         double min_translation = 50.0);

}  // namespace cmfd
