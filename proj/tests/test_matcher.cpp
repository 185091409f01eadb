#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <random>
#include <set>

#include "cmfd/forgery.hpp"
#include "cmfd/matcher.hpp"
#include "cmfd/run_config.hpp"
#include "cmfd/rng.hpp"
#include "cmfd/scale_space.hpp"
#include "oracles.hpp"

using namespace cmfd;

namespace {

Descriptor stub_descriptor(double x, double y, std::uint32_t seed) {
  std::mt19937 gen(seed);
  auto fill = [&](std::vector<double>& v, std::size_t n) {
    v.resize(n);
    double norm = 0.0;
    for (double& e : v) {
      e = static_cast<double>(gen()) / 4294967296.0;
      norm += e * e;
    }
    norm = std::sqrt(norm);
    for (double& e : v) e /= norm;
  };
  Descriptor d;
  fill(d.v1, 59);
  fill(d.v2, 14);
  fill(d.v3, 16);
  fill(d.v4, 4);
  d.x = x;
  d.y = y;
  return d;
}

MatchPair pair_at(double ax, double ay, double bx, double by) {
  MatchPair p;
  p.ax = ax;
  p.ay = ay;
  p.bx = bx;
  p.by = by;
  return p;
}

std::set<std::array<long, 4>> pair_keys(const std::vector<MatchPair>& pairs) {
  std::set<std::array<long, 4>> keys;
  for (const MatchPair& p : pairs)
    keys.insert({std::lround(p.ax * 8), std::lround(p.ay * 8), std::lround(p.bx * 8),
                 std::lround(p.by * 8)});
  return keys;
}

}  // namespace

TEST_SUITE_BEGIN("matcher");

TEST_CASE("level coordinates map back by powers of the sampling factor") {
  Keypoint kp;
  kp.x = 10.0;
  kp.y = 4.0;
  kp.octave = 1;
  auto [x1, y1] = map_to_original(kp, 1.25);
  CHECK(x1 == 10.0);
  CHECK(y1 == 4.0);
  kp.octave = 3;
  auto [x3, y3] = map_to_original(kp, 1.25);
  CHECK(x3 == doctest::Approx(15.625).epsilon(1e-12));
  CHECK(y3 == doctest::Approx(6.25).epsilon(1e-12));
}

TEST_CASE("one physical corner maps consistently across octaves") {
  GrayImage img(256, 256, 0.0);
  for (int y = 96; y < 160; ++y)
    for (int x = 96; x < 160; ++x) img.at(x, y) = 255.0;
  PyramidConfig pcfg;
  const Pyramid pyr = build_pyramid(img, pcfg);
  const auto kps = extract_keypoints(pyr, HarrisConfig{});
  std::vector<std::pair<double, double>> oct1, oct2;
  for (const Keypoint& kp : kps) {
    if (kp.interval != 1) continue;
    const auto mapped = map_to_original(kp, pcfg.beta);
    if (kp.octave == 1) oct1.push_back(mapped);
    if (kp.octave == 2) oct2.push_back(mapped);
  }
  REQUIRE(oct1.size() == 4);
  REQUIRE(!oct2.empty());
  for (const auto& [x2, y2] : oct2) {
    double best = 1e9;
    for (const auto& [x1, y1] : oct1) best = std::min(best, std::hypot(x1 - x2, y1 - y2));
    CHECK(best <= 2.0);
  }
}

TEST_CASE("identical descriptors match when far apart, not when close") {
  Descriptor a = stub_descriptor(0, 0, 1);
  Descriptor b = a;
  a.x = 10;
  a.y = 10;
  b.x = 110;
  b.y = 10;
  MatcherConfig cfg;
  auto pairs = match_features({a, b}, cfg);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].block_distances[0] == 0.0);
  CHECK(pairs[0].spatial_distance() == doctest::Approx(100.0));

  b.x = 15;  // 5 px apart, below the spatial gate
  pairs = match_features({a, b}, cfg);
  CHECK(pairs.empty());
}

TEST_CASE("candidate set ignores descriptor list order") {
  std::vector<Descriptor> descs;
  for (int i = 0; i < 12; ++i)
    descs.push_back(stub_descriptor(20.0 * i, 15.0 * ((i * 7) % 5), i % 4 + 1));
  MatcherConfig cfg;
  cfg.epsilon = 1.2;  // loose enough to admit many pairs
  const auto base = match_features(descs, cfg);
  std::mt19937 gen(5);
  std::vector<Descriptor> shuffled = descs;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  const auto perm = match_features(shuffled, cfg);
  CHECK(pair_keys(base) == pair_keys(perm));
}

TEST_CASE("pairs come out sorted by combined distance with canonical endpoints") {
  std::vector<Descriptor> descs;
  for (int i = 0; i < 10; ++i) descs.push_back(stub_descriptor(13.0 * i, 40.0, i % 3 + 10));
  MatcherConfig cfg;
  cfg.epsilon = 1.5;
  const auto pairs = match_features(descs, cfg);
  REQUIRE(pairs.size() > 2);
  for (std::size_t i = 1; i < pairs.size(); ++i)
    CHECK(pairs[i - 1].combined_distance() <= pairs[i].combined_distance());
  for (const MatchPair& p : pairs)
    CHECK(std::tie(p.ax, p.ay) <= std::tie(p.bx, p.by));
}

TEST_CASE("per-block thresholds override the shared one") {
  Descriptor a = stub_descriptor(0, 0, 9);
  Descriptor b = a;
  a.x = 10;
  a.y = 10;
  b.x = 150;
  b.y = 10;
  b.v3[0] += 0.05;  // small v3 difference only
  MatcherConfig cfg;
  CHECK(match_features({a, b}, cfg).size() == 1);
  cfg.block_epsilon = {{0.3, 0.3, 1e-6, 0.3}};
  CHECK(match_features({a, b}, cfg).empty());
}

TEST_CASE("raising the matching threshold never drops a candidate") {
  const GrayImage img = make_textured_image(96, 96, 71);
  PyramidConfig pcfg;
  pcfg.octaves = 2;
  const Pyramid pyr = build_pyramid(img, pcfg);
  const auto kps = oriented_keypoints(pyr, HarrisConfig{}, 4);
  const auto descs = describe(pyr, kps, DescriptorConfig{}, pcfg.beta);
  MatcherConfig lo;
  lo.epsilon = 0.3;
  MatcherConfig hi;
  hi.epsilon = 0.36;
  const auto small = pair_keys(match_features(descs, lo));
  const auto large = pair_keys(match_features(descs, hi));
  for (const auto& key : small) CHECK(large.count(key) == 1);
  CHECK(large.size() >= small.size());
}

TEST_CASE("ransac: unanimous translation") {
  std::vector<MatchPair> pairs;
  std::mt19937 gen(2);
  for (int i = 0; i < 20; ++i) {
    const double x = 20.0 + (gen() % 200), y = 20.0 + (gen() % 200);
    pairs.push_back(pair_at(x, y, x + 40.0, y));
  }
  const RansacResult res =
      ransac_filter(pairs, TransformKind::translation, 256, 3.0, 7);
  REQUIRE(res.model.has_value());
  CHECK(res.inliers.size() == 20);
  CHECK(res.model->parameters[0] == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(res.model->parameters[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ransac: planted translation against scattered outliers, ten seeds") {
  std::mt19937 gen(3);
  std::vector<MatchPair> pairs;
  const double tx = 57.0, ty = -24.0;
  for (int i = 0; i < 14; ++i) {
    const double x = 30.0 + (gen() % 150), y = 40.0 + (gen() % 150);
    pairs.push_back(pair_at(x, y, x + tx, y + ty));
  }
  for (int i = 0; i < 6; ++i) {
    // displacements far from the planted translation
    const double x = 30.0 + (gen() % 150), y = 40.0 + (gen() % 150);
    pairs.push_back(pair_at(x, y, x + 150.0 + (gen() % 60), y + 90.0 + (gen() % 60)));
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RansacResult res = ransac_filter(pairs, TransformKind::translation, 256, 3.0, seed);
    REQUIRE(res.model.has_value());
    CHECK(res.inliers.size() == 14);
    CHECK(std::abs(res.model->parameters[0] - tx) < 1e-6);
    CHECK(std::abs(res.model->parameters[1] - ty) < 1e-6);
    for (const MatchPair& p : res.inliers)
      CHECK(std::abs(p.bx - p.ax - tx) + std::abs(p.by - p.ay - ty) < 1e-9);
  }
}

TEST_CASE("ransac: empty and undersized inputs give a no-model result") {
  const RansacResult res = ransac_filter({}, TransformKind::translation, 128, 3.0, 1);
  CHECK(!res.model.has_value());
  CHECK(res.inliers.empty());
  const RansacResult res2 =
      ransac_filter({pair_at(0, 0, 10, 10)}, TransformKind::similarity, 128, 3.0, 1);
  CHECK(!res2.model.has_value());
}

TEST_CASE("ransac: similarity recovers a planted rotation and scale") {
  const double angle = M_PI / 5, scale = 1.15, tx = 30.0, ty = -12.0;
  const double a = scale * std::cos(angle), b = scale * std::sin(angle);
  std::mt19937 gen(4);
  std::vector<MatchPair> pairs;
  for (int i = 0; i < 24; ++i) {
    const double x = 40.0 + (gen() % 160), y = 40.0 + (gen() % 160);
    pairs.push_back(pair_at(x, y, a * x - b * y + tx, b * x + a * y + ty));
  }
  for (int i = 0; i < 8; ++i) {
    const double x = 40.0 + (gen() % 160), y = 40.0 + (gen() % 160);
    pairs.push_back(pair_at(x, y, 400.0 - 0.3 * (gen() % 100), 420.0 - 0.3 * (gen() % 100)));
  }
  const RansacResult res = ransac_filter(pairs, TransformKind::similarity, 512, 3.0, 11);
  REQUIRE(res.model.has_value());
  CHECK(res.inliers.size() == 24);
  CHECK(res.model->parameters[0] == doctest::Approx(a).epsilon(1e-9));
  CHECK(res.model->parameters[1] == doctest::Approx(b).epsilon(1e-9));
  CHECK(res.model->parameters[2] == doctest::Approx(tx).epsilon(1e-6));
  CHECK(res.model->parameters[3] == doctest::Approx(ty).epsilon(1e-6));
}

TEST_CASE("ransac: affine recovers a planted shear") {
  std::mt19937 gen(6);
  std::vector<MatchPair> pairs;
  const double m[6] = {1.1, 0.2, -0.15, 0.95, 25.0, 60.0};
  for (int i = 0; i < 30; ++i) {
    const double x = 30.0 + (gen() % 180), y = 30.0 + (gen() % 180);
    pairs.push_back(pair_at(x, y, m[0] * x + m[1] * y + m[4], m[2] * x + m[3] * y + m[5]));
  }
  const RansacResult res = ransac_filter(pairs, TransformKind::affine, 512, 3.0, 4);
  REQUIRE(res.model.has_value());
  CHECK(res.inliers.size() == 30);
  CHECK(res.model->parameters[0] == doctest::Approx(1.1).epsilon(1e-9));
  CHECK(res.model->parameters[1] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(res.model->parameters[2] == doctest::Approx(-0.15).epsilon(1e-9));
  CHECK(res.model->parameters[3] == doctest::Approx(0.95).epsilon(1e-9));
}

TEST_CASE("reported inliers satisfy the tolerance under the stored model") {
  const GrayImage img = make_textured_image(256, 256, 72);
  ForgeryGroundTruth request;
  request.source_rect = {30, 40, 48, 48};
  request.tx = 120.0;
  request.ty = 60.0;
  auto [forged, gt] = synth_forgery(img, request, 1);
  RunConfig cfg;
  const DetectionReport rep = detect(forged, cfg, 5);
  REQUIRE(rep.model.has_value());
  CHECK(rep.inliers.size() <= rep.candidates);
  for (const MatchPair& p : rep.inliers) {
    const auto [px, py] = rep.model->apply(p.ax, p.ay);
    CHECK(std::hypot(px - p.bx, py - p.by) <= rep.model->inlier_tolerance + 1e-12);
  }
}

TEST_CASE("detect: constant image is genuine with no keypoints") {
  const GrayImage img(128, 128, 80.0);
  RunConfig cfg;
  const DetectionReport rep = detect(img, cfg, 1);
  CHECK(!rep.forged);
  CHECK(rep.num_keypoints == 0);
  CHECK(rep.candidates == 0);
  CHECK(!rep.model.has_value());
}

TEST_CASE("detect: forgery on a sparse textured image, with its negative control") {
  const GrayImage base = oracle::sparse_texture(512, 512, 81);
  RunConfig cfg;

  // place the copy over a region that contains a few stamps
  ForgeryGroundTruth request;
  request.source_rect = {0, 0, 64, 64};
  double best_energy = -1.0;
  for (int ry = 16; ry < 420; ry += 8)
    for (int rx = 16; rx < 420; rx += 8) {
      Rect r{rx, ry, 64, 64};
      double e = 0.0;
      for (int y = ry; y < ry + 64; y += 2)
        for (int x = rx; x < rx + 64; x += 2) {
          const double gx = (base.at_clamped(x + 1, y) - base.at_clamped(x - 1, y)) / 2;
          const double gy = (base.at_clamped(x, y + 1) - base.at_clamped(x, y - 1)) / 2;
          e += gx * gx + gy * gy;
        }
      if (e > best_energy && rx + 64 + 80 < 500) {
        best_energy = e;
        request.source_rect = r;
      }
    }
  request.tx = 80.0;
  request.ty = 0.0;
  auto [forged, gt] = synth_forgery(base, request, 1);

  const DetectionReport pos = detect(forged, cfg, 9);
  CHECK(pos.forged);
  REQUIRE(pos.model.has_value());
  const auto [fx, fy] = pos.model->apply(gt.source_cx(), gt.source_cy());
  const auto [rx, ry] = pos.model->apply(gt.dest_cx, gt.dest_cy);
  const double err = std::min(std::hypot(fx - gt.dest_cx, fy - gt.dest_cy),
                              std::hypot(rx - gt.source_cx(), ry - gt.source_cy()));
  CHECK(err <= 2.0);

  // the candidate stage links the two regions
  const Pyramid pyr = build_pyramid(forged, cfg.pyramid);
  const auto kps = oriented_keypoints(pyr, cfg.harris, cfg.orientation_radius);
  const auto descs = describe(pyr, kps, cfg.descriptor, cfg.pyramid.beta);
  const auto pairs = match_features(descs, cfg.matcher);
  int linking = 0;
  for (const MatchPair& p : pairs) {
    const double e1 = std::hypot(p.ax + 80.0 - p.bx, p.ay - p.by);
    const double e2 = std::hypot(p.bx + 80.0 - p.ax, p.by - p.ay);
    if (std::min(e1, e2) <= 3.0) ++linking;
  }
  CHECK(linking >= 5);

  const DetectionReport neg = detect(base, cfg, 9);
  CHECK(!neg.forged);
}

TEST_CASE("detect is bit-deterministic for a fixed seed") {
  const auto corpus = generate_corpus(1, TamperFactor::naive, 83, 256, 48, 40.0);
  RunConfig cfg;
  const DetectionReport a = detect(corpus[0].image, cfg, 31);
  const DetectionReport b = detect(corpus[0].image, cfg, 31);
  CHECK(report_to_json(a, cfg) == report_to_json(b, cfg));
}

TEST_CASE("raising the verdict threshold never flips genuine to forged") {
  const auto corpus = generate_corpus(1, TamperFactor::naive, 84, 256, 48, 40.0);
  RunConfig lo;
  lo.matcher.tau_match = 4;
  RunConfig hi = lo;
  hi.matcher.tau_match = 1000000;
  const DetectionReport a = detect(corpus[0].image, lo, 3);
  const DetectionReport b = detect(corpus[0].image, hi, 3);
  CHECK(a.inliers.size() == b.inliers.size());
  CHECK(b.forged == false);
  CHECK(static_cast<int>(a.forged) >= static_cast<int>(b.forged));
}

TEST_CASE("transform kinds round trip through names") {
  for (TransformKind k :
       {TransformKind::translation, TransformKind::similarity, TransformKind::affine})
    CHECK(transform_kind_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(transform_kind_from_string("warp"), std::invalid_argument);
}

TEST_SUITE_END();
