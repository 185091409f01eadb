#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cmfd/gray_image.hpp"
#include "cmfd/harris.hpp"
#include "cmfd/orientation.hpp"

namespace cmfd {

struct DescriptorConfig {
  // v1 is LBP(8, 1) with the uniform-pattern mapping; fixed by construction.
  int lbp2_p = 12;         // riu2 neighbor count, 12 or 16
  double lbp1_radius = 1.0;
  double lbp2_radius = 2.0;
  bool normalize_blocks = true;

  void validate() const;
};

// Composite feature vector: uniform-LBP histogram, rotation-invariant
// uniform-LBP histogram, DCT coefficients and singular values of the
// oriented 4x4 neighborhood. 59 + 14 + 16 + 4 = 93 dims at defaults.
struct Descriptor {
  std::vector<double> v1;  // 59 bins
  std::vector<double> v2;  // lbp2_p + 2 bins
  std::vector<double> v3;  // 16 DCT coefficients
  std::vector<double> v4;  // 4 singular values, non-increasing
  double x = 0.0;          // keypoint in original-image coordinates
  double y = 0.0;

  std::size_t size() const { return v1.size() + v2.size() + v3.size() + v4.size(); }
};

// LBP code with neighbors on a radius-R circle, sampled bilinearly in the
// frame rotated by theta. Bit p is set iff the neighbor at angle
// theta + 2*pi*p/P is >= the center value.
std::uint32_t lbp_code(const GrayImage& level, double cx, double cy, int p, double radius,
                       double theta);

// Number of circular 0/1 transitions in the P-bit code.
int lbp_transitions(std::uint32_t code, int p);

// Uniform-pattern bin for P=8: the 58 codes with at most two transitions map
// to bins 0..57 in code order, everything else to bin 58.
int u2_bin(std::uint32_t code, int p = 8);

// Rotation-invariant uniform bin: uniform codes map to their popcount,
// non-uniform codes to bin P+1.
int riu2_bin(std::uint32_t code, int p);

// Orthonormal 2D DCT-II coefficients of the 4x4 patch, row-major.
std::array<double, 16> dct_features(const PatchMatrix& patch);

// Singular values of the 4x4 patch in non-increasing order.
std::array<double, 4> svd_features(const PatchMatrix& patch);

// Assembles the four blocks for one oriented keypoint. beta is the pyramid
// sampling factor, needed to place the keypoint in original-image
// coordinates.
Descriptor build_descriptor(const GrayImage& level, const Keypoint& kp,
                            const DescriptorConfig& cfg, double beta);

}  // namespace cmfd
