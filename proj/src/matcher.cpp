#include "cmfd/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "cmfd/orientation.hpp"
#include "cmfd/rng.hpp"
#include "cmfd/run_config.hpp"
#include "cmfd/scale_space.hpp"

namespace cmfd {

std::pair<double, double> map_to_original(const Keypoint& kp, double beta) {
  if (kp.octave < 1) throw std::invalid_argument("map_to_original: octave must be >= 1");
  const double factor = std::pow(beta, kp.octave - 1);
  return {kp.x * factor, kp.y * factor};
}

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::translation: return "translation";
    case TransformKind::similarity: return "similarity";
    case TransformKind::affine: return "affine";
  }
  return "?";
}

TransformKind transform_kind_from_string(const std::string& s) {
  if (s == "translation") return TransformKind::translation;
  if (s == "similarity") return TransformKind::similarity;
  if (s == "affine") return TransformKind::affine;
  throw std::invalid_argument("unknown transform kind '" + s + "'");
}

std::pair<double, double> TransformModel::apply(double x, double y) const {
  const std::vector<double>& p = parameters;
  switch (kind) {
    case TransformKind::translation:
      return {x + p[0], y + p[1]};
    case TransformKind::similarity:
      return {p[0] * x - p[1] * y + p[2], p[1] * x + p[0] * y + p[3]};
    case TransformKind::affine:
      return {p[0] * x + p[1] * y + p[4], p[2] * x + p[3] * y + p[5]};
  }
  throw std::logic_error("TransformModel: unknown kind");
}

double MatchPair::combined_distance() const {
  double s = 0.0;
  for (double d : block_distances) s += d * d;
  return std::sqrt(s);
}

double MatchPair::spatial_distance() const { return std::hypot(ax - bx, ay - by); }

std::array<double, 4> MatcherConfig::effective_epsilon() const {
  if (block_epsilon) return *block_epsilon;
  return {epsilon, epsilon, epsilon, epsilon};
}

void MatcherConfig::validate() const {
  for (double e : effective_epsilon())
    if (e <= 0.0) throw std::invalid_argument("MatcherConfig: epsilon must be > 0");
  if (d_min < 0.0) throw std::invalid_argument("MatcherConfig: d_min must be >= 0");
  if (iterations < 1) throw std::invalid_argument("MatcherConfig: iterations must be >= 1");
  if (tolerance <= 0.0) throw std::invalid_argument("MatcherConfig: tolerance must be > 0");
}

namespace {

// squared Euclidean distance with early exit once the bound is exceeded
bool block_within(const std::vector<double>& a, const std::vector<double>& b, double eps,
                  double& dist_out) {
  const double bound = eps * eps;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
    if (acc >= bound) return false;
  }
  dist_out = std::sqrt(acc);
  return true;
}

}  // namespace

std::vector<MatchPair> match_features(const std::vector<Descriptor>& descs,
                                      const MatcherConfig& cfg) {
  cfg.validate();
  const std::array<double, 4> eps = cfg.effective_epsilon();
  const double d_min2 = cfg.d_min * cfg.d_min;

  std::vector<MatchPair> pairs;
  for (std::size_t i = 0; i + 1 < descs.size(); ++i) {
    for (std::size_t j = i + 1; j < descs.size(); ++j) {
      const Descriptor& a = descs[i];
      const Descriptor& b = descs[j];
      const double dx = a.x - b.x;
      const double dy = a.y - b.y;
      if (dx * dx + dy * dy < d_min2) continue;
      MatchPair mp;
      if (!block_within(a.v1, b.v1, eps[0], mp.block_distances[0])) continue;
      if (!block_within(a.v2, b.v2, eps[1], mp.block_distances[1])) continue;
      if (!block_within(a.v3, b.v3, eps[2], mp.block_distances[2])) continue;
      if (!block_within(a.v4, b.v4, eps[3], mp.block_distances[3])) continue;
      mp.ax = a.x;
      mp.ay = a.y;
      mp.bx = b.x;
      mp.by = b.y;
      if (std::tie(mp.bx, mp.by) < std::tie(mp.ax, mp.ay)) {
        std::swap(mp.ax, mp.bx);
        std::swap(mp.ay, mp.by);
      }
      pairs.push_back(mp);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const MatchPair& l, const MatchPair& r) {
    const double dl = l.combined_distance();
    const double dr = r.combined_distance();
    if (dl != dr) return dl < dr;
    return std::tie(l.ax, l.ay, l.bx, l.by) < std::tie(r.ax, r.ay, r.bx, r.by);
  });
  return pairs;
}

std::vector<MatchPair> match_features(const std::vector<Descriptor>& descs, double epsilon,
                                      double d_min) {
  MatcherConfig cfg;
  cfg.epsilon = epsilon;
  cfg.d_min = d_min;
  return match_features(descs, cfg);
}

namespace {

int minimal_sample_size(TransformKind kind) {
  switch (kind) {
    case TransformKind::translation: return 1;
    case TransformKind::similarity: return 2;
    case TransformKind::affine: return 3;
  }
  return 0;
}

// Gaussian elimination with partial pivoting; false on a singular system.
template <int N>
bool solve_linear(double m[N][N], double rhs[N], double out[N]) {
  for (int col = 0; col < N; ++col) {
    int pivot = col;
    for (int r = col + 1; r < N; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-12) return false;
    if (pivot != col) {
      for (int c = 0; c < N; ++c) std::swap(m[col][c], m[pivot][c]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (int r = col + 1; r < N; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < N; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = N - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < N; ++c) acc -= m[r][c] * out[c];
    out[r] = acc / m[r][r];
  }
  return true;
}

bool fit_model(TransformKind kind, const std::vector<MatchPair>& pairs,
               const std::vector<std::size_t>& idx, TransformModel& model) {
  model.kind = kind;
  switch (kind) {
    case TransformKind::translation: {
      double tx = 0.0, ty = 0.0;
      for (std::size_t i : idx) {
        tx += pairs[i].bx - pairs[i].ax;
        ty += pairs[i].by - pairs[i].ay;
      }
      tx /= static_cast<double>(idx.size());
      ty /= static_cast<double>(idx.size());
      model.parameters = {tx, ty};
      return true;
    }
    case TransformKind::similarity: {
      // normal equations for [a, b, tx, ty]
      double m[4][4] = {};
      double rhs[4] = {};
      for (std::size_t i : idx) {
        const double x = pairs[i].ax, y = pairs[i].ay;
        const double u = pairs[i].bx, v = pairs[i].by;
        const double rows[2][4] = {{x, -y, 1.0, 0.0}, {y, x, 0.0, 1.0}};
        const double targets[2] = {u, v};
        for (int e = 0; e < 2; ++e) {
          for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) m[r][c] += rows[e][r] * rows[e][c];
            rhs[r] += rows[e][r] * targets[e];
          }
        }
      }
      double out[4];
      if (!solve_linear<4>(m, rhs, out)) return false;
      model.parameters = {out[0], out[1], out[2], out[3]};
      return true;
    }
    case TransformKind::affine: {
      double m[3][3] = {};
      double rx[3] = {};
      double ry[3] = {};
      for (std::size_t i : idx) {
        const double row[3] = {pairs[i].ax, pairs[i].ay, 1.0};
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) m[r][c] += row[r] * row[c];
          rx[r] += row[r] * pairs[i].bx;
          ry[r] += row[r] * pairs[i].by;
        }
      }
      double mx[3][3], my[3][3];
      std::copy(&m[0][0], &m[0][0] + 9, &mx[0][0]);
      std::copy(&m[0][0], &m[0][0] + 9, &my[0][0]);
      double ox[3], oy[3];
      if (!solve_linear<3>(mx, rx, ox)) return false;
      if (!solve_linear<3>(my, ry, oy)) return false;
      model.parameters = {ox[0], ox[1], oy[0], oy[1], ox[2], oy[2]};
      return true;
    }
  }
  return false;
}

// A copy-move transform has a moderate scale factor. Without this guard a
// near-singular fit (scale ~ 0) maps every source point onto one spot and
// collects any cluster of false matches as "consensus".
bool plausible_model(const TransformModel& model) {
  switch (model.kind) {
    case TransformKind::translation:
      return true;
    case TransformKind::similarity: {
      const double s = std::hypot(model.parameters[0], model.parameters[1]);
      return s >= 0.4 && s <= 2.5;
    }
    case TransformKind::affine: {
      const double det = model.parameters[0] * model.parameters[3] -
                         model.parameters[1] * model.parameters[2];
      return std::abs(det) >= 0.16 && std::abs(det) <= 6.25;
    }
  }
  return false;
}

double residual(const TransformModel& model, const MatchPair& p) {
  const auto [px, py] = model.apply(p.ax, p.ay);
  return std::hypot(px - p.bx, py - p.by);
}

std::vector<std::size_t> inlier_indices(const TransformModel& model,
                                        const std::vector<MatchPair>& pairs, double tol) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (residual(model, pairs[i]) <= tol) idx.push_back(i);
  return idx;
}

}  // namespace

RansacResult ransac_filter(const std::vector<MatchPair>& pairs, TransformKind kind,
                           int iterations, double tolerance, std::uint64_t seed) {
  if (iterations < 1) throw std::invalid_argument("ransac_filter: iterations must be >= 1");
  if (tolerance <= 0.0) throw std::invalid_argument("ransac_filter: tolerance must be > 0");

  RansacResult result;
  const int sample_size = minimal_sample_size(kind);
  if (pairs.size() < static_cast<std::size_t>(sample_size)) return result;

  Rng rng(derive_seed(seed, 0x72616e736163ull));
  const std::size_t n = pairs.size();

  TransformModel best;
  std::size_t best_count = 0;
  bool found = false;

  // multi-scale extraction detects one physical corner on several levels, so
  // a sample of nearly coincident endpoints is a single match in disguise;
  // short baselines also amplify endpoint noise into large model error
  const double min_sep = sample_size > 1 ? 16.0 : 0.0;

  // least-squares refit rounds; a 2-point similarity extrapolates endpoint
  // jitter, so grow the consensus at a widened tolerance first, then settle
  // at the real one
  const auto locally_optimize = [&](TransformModel& model, std::vector<std::size_t>& support) {
    TransformModel wide;
    wide.inlier_tolerance = tolerance;
    if (!support.empty() && fit_model(kind, pairs, support, wide) && plausible_model(wide)) {
      const std::vector<std::size_t> basin = inlier_indices(wide, pairs, 2.0 * tolerance);
      TransformModel wide2;
      wide2.inlier_tolerance = tolerance;
      if (!basin.empty() && fit_model(kind, pairs, basin, wide2) && plausible_model(wide2)) {
        const std::vector<std::size_t> grown = inlier_indices(wide2, pairs, tolerance);
        if (grown.size() > support.size()) {
          model = wide2;
          support = grown;
        }
      }
    }
    for (int round = 0; round < 10; ++round) {
      TransformModel refit;
      refit.inlier_tolerance = tolerance;
      if (support.empty() || !fit_model(kind, pairs, support, refit) ||
          !plausible_model(refit))
        return;
      std::vector<std::size_t> grown = inlier_indices(refit, pairs, tolerance);
      if (grown.size() < support.size()) return;
      const bool converged = grown == support;
      model = refit;
      support = std::move(grown);
      if (converged) return;
    }
  };

  // copied regions are compact, so the minimal sample's endpoints should be
  // near each other without being the same multi-scale site
  const double local_radius = 96.0;

  std::vector<std::size_t> best_support;
  std::vector<std::size_t> sample(sample_size);
  for (int it = 0; it < iterations; ++it) {
    // progressive sampling: pairs arrive sorted by descriptor distance, and
    // true matches concentrate at the top, so early iterations draw from the
    // best-ranked pairs and later ones from the whole set
    const std::size_t grow = static_cast<std::size_t>(
        n * (2.0 * (it + 1) / std::max(1, iterations)));
    const std::size_t pool = std::clamp<std::size_t>(grow, std::min<std::size_t>(n, 64), n);
    bool ok = true;
    sample[0] = rng.below(pool);
    for (int k = 1; k < sample_size && ok; ++k) {
      ok = false;
      for (int attempt = 0; attempt < 16 && !ok; ++attempt) {
        sample[k] = rng.below(pool);
        ok = true;
        for (int j = 0; j < k && ok; ++j) {
          if (sample[j] == sample[k]) ok = false;
          const MatchPair& p = pairs[sample[j]];
          const MatchPair& q = pairs[sample[k]];
          const double sep = std::hypot(p.ax - q.ax, p.ay - q.ay);
          if (sep < min_sep || sep > local_radius) ok = false;
        }
      }
    }
    if (!ok) continue;
    TransformModel candidate;
    candidate.inlier_tolerance = tolerance;
    if (!fit_model(kind, pairs, sample, candidate)) continue;
    if (!plausible_model(candidate)) continue;
    std::vector<std::size_t> support = inlier_indices(candidate, pairs, tolerance);
    if (found && support.size() <= best_count / 4) continue;
    locally_optimize(candidate, support);
    if (!found || support.size() > best_count) {
      best = candidate;
      best_support = std::move(support);
      best_count = best_support.size();
      found = true;
    }
  }
  if (!found) return result;
  const std::vector<std::size_t>& support = best_support;

  result.model = best;
  result.inliers.reserve(support.size());
  for (std::size_t i : support) result.inliers.push_back(pairs[i]);
  return result;
}

std::vector<Keypoint> oriented_keypoints(const Pyramid& pyr, const HarrisConfig& cfg,
                                         int orientation_radius) {
  std::vector<Keypoint> kps = extract_keypoints(pyr, cfg);
  // per-level polar gradients, computed once
  std::vector<std::vector<std::pair<GrayImage, GrayImage>>> polar(pyr.octaves());
  for (int o = 1; o <= pyr.octaves(); ++o)
    for (int i = 1; i <= pyr.intervals(); ++i)
      polar[o - 1].push_back(gradient_polar(pyr.level(o, i)));
  for (Keypoint& kp : kps) {
    const auto& [mag, ang] = polar[kp.octave - 1][kp.interval - 1];
    kp = assign_orientation(kp, mag, ang, orientation_radius);
  }
  return kps;
}

std::vector<Descriptor> describe(const Pyramid& pyr, const std::vector<Keypoint>& kps,
                                 const DescriptorConfig& cfg, double beta) {
  std::vector<Descriptor> descs;
  descs.reserve(kps.size());
  for (const Keypoint& kp : kps)
    descs.push_back(build_descriptor(pyr.level(kp.octave, kp.interval), kp, cfg, beta));
  return descs;
}

DetectionReport detect(const GrayImage& img, const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (!all_finite(img)) throw std::invalid_argument("detect: non-finite intensities");

  DetectionReport report;
  report.seed = seed;

  const Pyramid pyr = build_pyramid(img, cfg.pyramid);
  const std::vector<Keypoint> kps =
      oriented_keypoints(pyr, cfg.harris, cfg.orientation_radius);
  report.num_keypoints = kps.size();
  if (kps.size() < 2) return report;

  const std::vector<Descriptor> descs = describe(pyr, kps, cfg.descriptor, cfg.pyramid.beta);
  const std::vector<MatchPair> pairs = match_features(descs, cfg.matcher);
  report.candidates = pairs.size();

  RansacResult filtered = ransac_filter(pairs, cfg.matcher.model, cfg.matcher.iterations,
                                        cfg.matcher.tolerance, seed);
  report.model = std::move(filtered.model);
  report.inliers = std::move(filtered.inliers);
  report.forged = report.inliers.size() >= cfg.matcher.tau_match;
  return report;
}

std::string report_to_json(const DetectionReport& report, const RunConfig& cfg) {
  nlohmann::json j;
  j["verdict"] = report.forged ? "forged" : "genuine";
  j["num_keypoints"] = report.num_keypoints;
  j["candidates"] = report.candidates;
  nlohmann::json inliers = nlohmann::json::array();
  for (const MatchPair& p : report.inliers) {
    inliers.push_back({{"a", {p.ax, p.ay}},
                       {"b", {p.bx, p.by}},
                       {"block_distances", p.block_distances}});
  }
  j["inliers"] = std::move(inliers);
  if (report.model) {
    j["model"] = {{"kind", to_string(report.model->kind)},
                  {"parameters", report.model->parameters},
                  {"inlier_tolerance", report.model->inlier_tolerance}};
  } else {
    j["model"] = nullptr;
  }
  j["seed"] = report.seed;
  j["config"] = nlohmann::json::parse(run_config_to_json(cfg));
  return j.dump(2);
}

}  // namespace cmfd
