#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmfd/forgery.hpp"
#include "cmfd/matcher.hpp"
#include "cmfd/perturb.hpp"
#include "cmfd/run_config.hpp"

namespace cmfd {

struct ManifestEntry {
  std::string image_path;
  bool forged = false;
  TamperFactor factor = TamperFactor::none;
  std::string pair_id;  // optional
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  bool has_both_labels() const;
};

std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text);
DatasetManifest load_manifest(const std::string& path);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  std::size_t tau = 0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // sorted by FPR nondecreasing (tau descending)
  double auc = 0.0;
};

struct Metrics {
  std::optional<double> tpr;
  std::optional<double> fpr;
};

// Image-level detection rates; a side with no entries of its label is
// reported absent rather than zero.
Metrics compute_metrics(const std::vector<std::pair<DetectionReport, bool>>& labeled);

// One manifest entry after detection: its inlier count, or the error that
// excluded it.
struct EvalOutcome {
  ManifestEntry entry;
  bool ok = false;
  std::string error;
  std::size_t inlier_count = 0;
  std::size_t num_keypoints = 0;
};

// Runs the detector on every entry (optionally perturbed first). The
// per-entry detect seed depends only on (seed, entry index), so identical
// inputs score identically across grid cells.
std::vector<EvalOutcome> score_manifest(const DatasetManifest& manifest, const RunConfig& cfg,
                                        std::uint64_t seed,
                                        const std::optional<Perturbation>& op = std::nullopt);

// Threshold sweep over tau = max inlier count + 1 down to 0.
RocCurve roc_from_scores(const std::vector<std::pair<std::size_t, bool>>& scored);

// Curve restricted to forged entries of one tamper factor plus every
// genuine entry.
RocCurve roc_for_factor(const std::vector<EvalOutcome>& outcomes, TamperFactor factor);
RocCurve roc_all(const std::vector<EvalOutcome>& outcomes);

struct SweepResult {
  RocCurve curve;
  std::vector<EvalOutcome> outcomes;
};

SweepResult roc_sweep(const DatasetManifest& manifest, const RunConfig& cfg,
                      std::uint64_t seed);

// The post-processing grid: blur sigma {0.5, 1, 2} at w=3, noise variance
// {1, 3, 5}, JPEG quality {80, 60, 40}.
std::vector<Perturbation> default_grid();

struct GridCellResult {
  Perturbation op;
  SweepResult sweep;
};

std::vector<GridCellResult> robustness_grid(const DatasetManifest& manifest,
                                            const std::vector<Perturbation>& grid,
                                            const RunConfig& cfg, std::uint64_t seed);

struct RocRow {
  std::string subset;
  std::string op;
  double param = 0.0;
  std::size_t tau = 0;
  double fpr = 0.0;
  double tpr = 0.0;
};

std::vector<RocRow> rows_from_curve(const RocCurve& curve, const std::string& subset,
                                    const std::string& op, double param);
void write_roc_csv(const std::string& path, const std::vector<RocRow>& rows);

void write_roc_svg(const std::string& path,
                   const std::vector<std::pair<std::string, RocCurve>>& curves);

}  // namespace cmfd
