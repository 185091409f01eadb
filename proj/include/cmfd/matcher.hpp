#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmfd/descriptor.hpp"
#include "cmfd/gray_image.hpp"
#include "cmfd/harris.hpp"

namespace cmfd {

struct RunConfig;

// Maps level coordinates of octave oc back to the original frame,
// multiplying by beta^(oc-1).
std::pair<double, double> map_to_original(const Keypoint& kp, double beta);

enum class TransformKind { translation, similarity, affine };

std::string to_string(TransformKind k);
TransformKind transform_kind_from_string(const std::string& s);

struct TransformModel {
  TransformKind kind = TransformKind::translation;
  // translation: [tx, ty]
  // similarity:  [a, b, tx, ty] for x' = a*x - b*y + tx, y' = b*x + a*y + ty
  // affine:      [a, b, c, d, tx, ty] for x' = a*x + b*y + tx, y' = c*x + d*y + ty
  std::vector<double> parameters;
  double inlier_tolerance = 3.0;

  std::pair<double, double> apply(double x, double y) const;
};

struct MatchPair {
  double ax = 0.0, ay = 0.0;  // original-image pixels, a lexicographically <= b
  double bx = 0.0, by = 0.0;
  std::array<double, 4> block_distances{};

  double combined_distance() const;
  double spatial_distance() const;
};

struct MatcherConfig {
  double epsilon = 0.3;  // shared per-block threshold
  std::optional<std::array<double, 4>> block_epsilon;  // overrides epsilon per block
  double d_min = 10.0;   // minimum spatial separation, original pixels
  TransformKind model = TransformKind::similarity;
  int iterations = 2048;
  double tolerance = 3.0;  // RANSAC inlier tolerance, pixels
  std::size_t tau_match = 4;  // verdict threshold on inlier count

  std::array<double, 4> effective_epsilon() const;
  void validate() const;
};

// Pair (i, j) is a candidate iff all four block distances stay under their
// thresholds and the endpoints are at least d_min apart. Sorted by combined
// distance ascending.
std::vector<MatchPair> match_features(const std::vector<Descriptor>& descs,
                                      const MatcherConfig& cfg);
std::vector<MatchPair> match_features(const std::vector<Descriptor>& descs, double epsilon,
                                      double d_min);

struct RansacResult {
  std::optional<TransformModel> model;
  std::vector<MatchPair> inliers;
};

// Seeded RANSAC over a -> b, least-squares refit on the winning consensus.
// Fewer pairs than the minimal sample yields an empty no-model result.
RansacResult ransac_filter(const std::vector<MatchPair>& pairs, TransformKind kind,
                           int iterations, double tolerance, std::uint64_t seed);

struct DetectionReport {
  bool forged = false;
  std::size_t num_keypoints = 0;
  std::size_t candidates = 0;
  std::vector<MatchPair> inliers;
  std::optional<TransformModel> model;
  std::uint64_t seed = 0;
};

// Full pipeline: pyramid, Harris points, orientations, descriptors,
// matching, RANSAC. Verdict is forged iff the inlier count reaches
// tau_match.
DetectionReport detect(const GrayImage& img, const RunConfig& cfg, std::uint64_t seed);

// Pipeline front end shared by detect and the CLI dump commands.
std::vector<Keypoint> oriented_keypoints(const Pyramid& pyr, const HarrisConfig& cfg,
                                         int orientation_radius);
std::vector<Descriptor> describe(const Pyramid& pyr, const std::vector<Keypoint>& kps,
                                 const DescriptorConfig& cfg, double beta);

std::string report_to_json(const DetectionReport& report, const RunConfig& cfg);

}  // namespace cmfd
