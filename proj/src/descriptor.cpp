#include "cmfd/descriptor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "cmfd/matcher.hpp"

namespace cmfd {

void DescriptorConfig::validate() const {
  if (lbp2_p != 12 && lbp2_p != 16)
    throw std::invalid_argument("DescriptorConfig: lbp2_p must be 12 or 16");
  if (lbp1_radius <= 0.0 || lbp2_radius <= 0.0)
    throw std::invalid_argument("DescriptorConfig: radii must be > 0");
}

std::uint32_t lbp_code(const GrayImage& level, double cx, double cy, int p, double radius,
                       double theta) {
  if (p < 2 || p > 24) throw std::invalid_argument("lbp_code: p out of range");
  const double center = level.sample(cx, cy);
  std::uint32_t code = 0;
  for (int i = 0; i < p; ++i) {
    const double ang = theta + 2.0 * M_PI * i / p;
    const double nx = cx + radius * std::cos(ang);
    const double ny = cy + radius * std::sin(ang);
    if (level.sample(nx, ny) >= center) code |= 1u << i;
  }
  return code;
}

int lbp_transitions(std::uint32_t code, int p) {
  int transitions = 0;
  for (int i = 0; i < p; ++i) {
    const unsigned a = (code >> i) & 1u;
    const unsigned b = (code >> ((i + 1) % p)) & 1u;
    if (a != b) ++transitions;
  }
  return transitions;
}

int u2_bin(std::uint32_t code, int p) {
  if (p != 8) throw std::invalid_argument("u2_bin: only p=8 is supported");
  if (code > 255) throw std::invalid_argument("u2_bin: code out of range");
  static const std::array<int, 256> lut = [] {
    std::array<int, 256> t{};
    int next = 0;
    for (std::uint32_t c = 0; c < 256; ++c)
      t[c] = lbp_transitions(c, 8) <= 2 ? next++ : -1;
    for (std::uint32_t c = 0; c < 256; ++c)
      if (t[c] < 0) t[c] = next;  // pooled non-uniform bin, == 58
    return t;
  }();
  return lut[code];
}

int riu2_bin(std::uint32_t code, int p) {
  if (p < 2 || p > 24) throw std::invalid_argument("riu2_bin: p out of range");
  if (code >> p) throw std::invalid_argument("riu2_bin: code out of range");
  if (lbp_transitions(code, p) <= 2) return std::popcount(code);
  return p + 1;
}

namespace {

const std::array<std::array<double, kPatchSize>, kPatchSize>& dct_basis() {
  static const auto basis = [] {
    std::array<std::array<double, kPatchSize>, kPatchSize> t{};
    const double n = kPatchSize;
    for (int k = 0; k < kPatchSize; ++k)
      for (int j = 0; j < kPatchSize; ++j)
        t[k][j] = std::sqrt((k == 0 ? 1.0 : 2.0) / n) *
                  std::cos((2.0 * j + 1.0) * k * M_PI / (2.0 * n));
    return t;
  }();
  return basis;
}

}  // namespace

std::array<double, 16> dct_features(const PatchMatrix& patch) {
  const auto& t = dct_basis();
  std::array<double, 16> out{};
  for (int u = 0; u < kPatchSize; ++u) {
    for (int v = 0; v < kPatchSize; ++v) {
      double acc = 0.0;
      for (int r = 0; r < kPatchSize; ++r)
        for (int c = 0; c < kPatchSize; ++c) acc += t[u][r] * patch[r][c] * t[v][c];
      out[u * kPatchSize + v] = acc;
    }
  }
  return out;
}

std::array<double, 4> svd_features(const PatchMatrix& patch) {
  // one-sided Jacobi: rotate column pairs until they are orthogonal
  constexpr int n = kPatchSize;
  double a[n][n];
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a[r][c] = patch[r][c];

  for (int sweep = 0; sweep < 64; ++sweep) {
    bool converged = true;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < n; ++i) {
          app += a[i][p] * a[i][p];
          aqq += a[i][q] * a[i][q];
          apq += a[i][p] * a[i][q];
        }
        if (std::abs(apq) <= 1e-15 * std::sqrt(app * aqq)) continue;
        converged = false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < n; ++i) {
          const double tmp = a[i][p];
          a[i][p] = c * tmp - s * a[i][q];
          a[i][q] = s * tmp + c * a[i][q];
        }
      }
    }
    if (converged) break;
  }

  std::array<double, 4> sv{};
  for (int c = 0; c < n; ++c) {
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) norm2 += a[i][c] * a[i][c];
    sv[c] = std::sqrt(norm2);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

namespace {

void normalize_block(std::vector<double>& v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  if (norm2 <= 0.0) return;
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
}

}  // namespace

Descriptor build_descriptor(const GrayImage& level, const Keypoint& kp,
                            const DescriptorConfig& cfg, double beta) {
  cfg.validate();
  const PatchMatrix patch = sample_oriented_patch(level, kp);

  Descriptor d;
  d.v1.assign(59, 0.0);
  d.v2.assign(cfg.lbp2_p + 2, 0.0);

  // LBP codes at each oriented grid position, neighbors read from the full
  // level image (a 4x4 patch cannot supply radius-2 neighborhoods)
  const double c = std::cos(kp.orientation);
  const double s = std::sin(kp.orientation);
  for (int r = 0; r < kPatchSize; ++r) {
    const double v = r - (kPatchSize - 1) / 2.0;
    for (int col = 0; col < kPatchSize; ++col) {
      const double u = col - (kPatchSize - 1) / 2.0;
      const double gx = kp.x + c * u - s * v;
      const double gy = kp.y + s * u + c * v;
      d.v1[u2_bin(lbp_code(level, gx, gy, 8, cfg.lbp1_radius, kp.orientation))] += 1.0;
      d.v2[riu2_bin(lbp_code(level, gx, gy, cfg.lbp2_p, cfg.lbp2_radius, kp.orientation),
                    cfg.lbp2_p)] += 1.0;
    }
  }

  const std::array<double, 16> dct = dct_features(patch);
  d.v3.assign(dct.begin(), dct.end());
  const std::array<double, 4> sv = svd_features(patch);
  d.v4.assign(sv.begin(), sv.end());

  if (cfg.normalize_blocks) {
    normalize_block(d.v1);
    normalize_block(d.v2);
    normalize_block(d.v3);
    normalize_block(d.v4);
  }

  const auto [ox, oy] = map_to_original(kp, beta);
  d.x = ox;
  d.y = oy;
  return d;
}

}  // namespace cmfd
