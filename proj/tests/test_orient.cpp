#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cmfd/forgery.hpp"
#include "cmfd/matcher.hpp"
#include "cmfd/orientation.hpp"
#include "cmfd/scale_space.hpp"
#include "oracles.hpp"

using namespace cmfd;

namespace {

GrayImage ramp(int w, int h, double gx, double gy) {
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = gx * x + gy * y + 120.0;
  return img;
}

Keypoint keypoint_at(double x, double y, double theta = 0.0) {
  Keypoint kp;
  kp.x = x;
  kp.y = y;
  kp.orientation = theta;
  return kp;
}

GrayImage rotate180(const GrayImage& img) {
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      out.at(img.width - 1 - x, img.height - 1 - y) = img.at(x, y);
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("orient");

TEST_CASE("polar gradients of ramps") {
  auto [mx, ax] = gradient_polar(ramp(12, 12, 1.0, 0.0));
  for (int y = 1; y < 11; ++y)
    for (int x = 1; x < 11; ++x) {
      CHECK(mx.at(x, y) == doctest::Approx(1.0));
      CHECK(ax.at(x, y) == doctest::Approx(0.0));
    }
  auto [my, ay] = gradient_polar(ramp(12, 12, 0.0, 1.0));
  for (int y = 1; y < 11; ++y)
    for (int x = 1; x < 11; ++x) {
      CHECK(my.at(x, y) == doctest::Approx(1.0));
      CHECK(ay.at(x, y) == doctest::Approx(M_PI / 2));
    }
  // the sign case a half-range arctangent would miss
  auto [mn, an] = gradient_polar(ramp(12, 12, -1.0, 0.0));
  for (int y = 1; y < 11; ++y)
    for (int x = 1; x < 11; ++x) CHECK(an.at(x, y) == doctest::Approx(M_PI));
}

TEST_CASE("zero gradient yields angle zero") {
  auto [m, a] = gradient_polar(GrayImage(8, 8, 7.0));
  for (double v : m.data) CHECK(v == 0.0);
  for (double v : a.data) CHECK(v == 0.0);
}

TEST_CASE("histogram bin mapping and mass") {
  OrientationHistogram h;
  CHECK(OrientationHistogram::bin_of(0.0) == 0);
  CHECK(OrientationHistogram::bin_of(0.627) == 0);
  CHECK(OrientationHistogram::bin_of(0.629) == 1);
  CHECK(OrientationHistogram::bin_of(2.0 * M_PI - 1e-9) == 9);
  h.accumulate(0.1, 2.0);
  h.accumulate(0.7, 3.0);
  h.accumulate(6.2, 4.0);
  CHECK(h.mass() == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(h.argmax() == 9);
}

TEST_CASE("argmax ties break toward the lowest bin") {
  OrientationHistogram h;
  h.bins[2] = 5.0;
  h.bins[7] = 5.0;
  CHECK(h.argmax() == 2);
}

TEST_CASE("uniform diagonal gradient orients to the diagonal") {
  // I = (x + y)/sqrt(2) has gradient direction pi/4 everywhere
  const GrayImage img = ramp(16, 16, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
  auto [m, a] = gradient_polar(img);
  const Keypoint kp = assign_orientation(keypoint_at(8, 8), m, a);
  CHECK(kp.orientation == doctest::Approx(M_PI / 4).epsilon(1e-9));
  const int bin = OrientationHistogram::bin_of(kp.orientation);
  CHECK(bin == 1);  // [0.628, 1.257)
}

TEST_CASE("constant window keeps orientation zero") {
  const GrayImage img(16, 16, 99.0);
  auto [m, a] = gradient_polar(img);
  const Keypoint kp = assign_orientation(keypoint_at(8, 8), m, a);
  CHECK(kp.orientation == 0.0);
}

TEST_CASE("half-turn of a textured patch flips the orientation by pi") {
  const GrayImage img = make_textured_image(64, 64, 51);
  const GrayImage rot = rotate180(img);
  auto [m1, a1] = gradient_polar(img);
  auto [m2, a2] = gradient_polar(rot);
  const Keypoint kp1 = assign_orientation(keypoint_at(30, 27), m1, a1);
  const Keypoint kp2 = assign_orientation(keypoint_at(63 - 30, 63 - 27), m2, a2);
  double diff = std::fmod(std::abs(kp2.orientation - kp1.orientation), 2.0 * M_PI);
  diff = std::min(diff, 2.0 * M_PI - diff);
  CHECK(std::abs(diff - M_PI) < OrientationHistogram::bin_width);
}

TEST_CASE("unrotated patch equals direct grid samples") {
  const GrayImage img = make_textured_image(32, 32, 52);
  const PatchMatrix patch = sample_oriented_patch(img, keypoint_at(15.0, 14.0, 0.0));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(patch[r][c] == img.sample(15.0 + (c - 1.5), 14.0 + (r - 1.5)));
}

TEST_CASE("quarter-turn sampling permutes the patch matrix") {
  const GrayImage img = make_textured_image(32, 32, 53);
  const PatchMatrix p0 = sample_oriented_patch(img, keypoint_at(16.0, 16.0, 0.0));
  const PatchMatrix p90 = sample_oriented_patch(img, keypoint_at(16.0, 16.0, M_PI / 2));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK(p90[r][c] == doctest::Approx(p0[c][3 - r]).epsilon(1e-9));
}

TEST_CASE("quarter-turn relation holds at any base orientation") {
  const GrayImage img = gaussian_blur(make_textured_image(40, 40, 54), 1.5);
  for (double theta : {0.3, 1.1, 2.7}) {
    const PatchMatrix pa = sample_oriented_patch(img, keypoint_at(20.0, 20.0, theta));
    const PatchMatrix pb = sample_oriented_patch(img, keypoint_at(20.0, 20.0, theta + M_PI / 2));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) CHECK(pb[r][c] == doctest::Approx(pa[c][3 - r]).epsilon(1e-6));
  }
}

TEST_CASE("constant image gives a constant patch") {
  const GrayImage img(20, 20, 42.0);
  const PatchMatrix patch = sample_oriented_patch(img, keypoint_at(10.0, 10.0, 0.77));
  for (const auto& row : patch)
    for (double v : row) CHECK(v == 42.0);
}

TEST_CASE("assigned orientations land in [0, 2pi)") {
  const GrayImage img = make_textured_image(128, 128, 55);
  PyramidConfig pcfg;
  pcfg.octaves = 2;
  const Pyramid pyr = build_pyramid(img, pcfg);
  const auto kps = oriented_keypoints(pyr, HarrisConfig{}, 4);
  REQUIRE(!kps.empty());
  for (const Keypoint& kp : kps) {
    CHECK(kp.orientation >= 0.0);
    CHECK(kp.orientation < 2.0 * M_PI);
  }
}

TEST_CASE("histogram mass equals the window magnitude sum") {
  const GrayImage img = make_textured_image(32, 32, 56);
  auto [m, a] = gradient_polar(img);
  OrientationHistogram h;
  double direct = 0.0;
  for (int dy = -4; dy <= 4; ++dy)
    for (int dx = -4; dx <= 4; ++dx) {
      h.accumulate(a.at(16 + dx, 16 + dy), m.at(16 + dx, 16 + dy));
      direct += m.at(16 + dx, 16 + dy);
    }
  CHECK(h.mass() == doctest::Approx(direct).epsilon(1e-12));
}

TEST_SUITE_END();
