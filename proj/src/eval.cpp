#include "cmfd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cmfd/image_io.hpp"
#include "cmfd/rng.hpp"

namespace cmfd {

using nlohmann::json;

bool DatasetManifest::has_both_labels() const {
  bool f = false, g = false;
  for (const ManifestEntry& e : entries) (e.forged ? f : g) = true;
  return f && g;
}

std::string manifest_to_json(const DatasetManifest& m) {
  json arr = json::array();
  for (const ManifestEntry& e : m.entries) {
    json j;
    j["image_path"] = e.image_path;
    j["label"] = e.forged ? "forged" : "genuine";
    j["tamper_factor"] = to_string(e.factor);
    if (!e.pair_id.empty()) j["pair_id"] = e.pair_id;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

DatasetManifest manifest_from_json(const std::string& text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("manifest: JSON parse error: ") + e.what());
  }
  if (!arr.is_array()) throw std::runtime_error("manifest: expected a JSON array");
  DatasetManifest m;
  for (const json& j : arr) {
    ManifestEntry e;
    e.image_path = j.at("image_path").get<std::string>();
    const std::string label = j.at("label").get<std::string>();
    if (label == "forged")
      e.forged = true;
    else if (label == "genuine")
      e.forged = false;
    else
      throw std::runtime_error("manifest: unknown label '" + label + "'");
    if (j.contains("tamper_factor"))
      e.factor = tamper_factor_from_string(j.at("tamper_factor").get<std::string>());
    if (j.contains("pair_id")) e.pair_id = j.at("pair_id").get<std::string>();
    m.entries.push_back(std::move(e));
  }
  return m;
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

Metrics compute_metrics(const std::vector<std::pair<DetectionReport, bool>>& labeled) {
  std::size_t forged_total = 0, forged_hit = 0;
  std::size_t genuine_total = 0, genuine_flagged = 0;
  for (const auto& [report, is_forged] : labeled) {
    if (is_forged) {
      ++forged_total;
      if (report.forged) ++forged_hit;
    } else {
      ++genuine_total;
      if (report.forged) ++genuine_flagged;
    }
  }
  Metrics m;
  if (forged_total > 0)
    m.tpr = static_cast<double>(forged_hit) / static_cast<double>(forged_total);
  if (genuine_total > 0)
    m.fpr = static_cast<double>(genuine_flagged) / static_cast<double>(genuine_total);
  return m;
}

std::vector<EvalOutcome> score_manifest(const DatasetManifest& manifest, const RunConfig& cfg,
                                        std::uint64_t seed,
                                        const std::optional<Perturbation>& op) {
  std::vector<EvalOutcome> outcomes;
  outcomes.reserve(manifest.entries.size());
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    EvalOutcome oc;
    oc.entry = manifest.entries[i];
    const std::uint64_t detect_seed = derive_seed(seed, i);
    try {
      GrayImage img = load_image(oc.entry.image_path);
      if (op) img = perturb(img, *op, derive_seed(detect_seed, 0x70657274757262ull));
      const DetectionReport report = detect(img, cfg, detect_seed);
      oc.ok = true;
      oc.inlier_count = report.inliers.size();
      oc.num_keypoints = report.num_keypoints;
    } catch (const std::exception& e) {
      oc.ok = false;
      oc.error = e.what();
    }
    outcomes.push_back(std::move(oc));
  }
  return outcomes;
}

RocCurve roc_from_scores(const std::vector<std::pair<std::size_t, bool>>& scored) {
  std::size_t forged_total = 0, genuine_total = 0, max_count = 0;
  for (const auto& [count, is_forged] : scored) {
    (is_forged ? forged_total : genuine_total) += 1;
    max_count = std::max(max_count, count);
  }
  if (forged_total == 0 || genuine_total == 0)
    throw std::invalid_argument("roc_from_scores: need both forged and genuine entries");

  RocCurve curve;
  for (std::size_t tau = max_count + 1;; --tau) {
    std::size_t tp = 0, fp = 0;
    for (const auto& [count, is_forged] : scored) {
      if (count >= tau) (is_forged ? tp : fp) += 1;
    }
    RocPoint pt;
    pt.tau = tau;
    pt.tpr = static_cast<double>(tp) / static_cast<double>(forged_total);
    pt.fpr = static_cast<double>(fp) / static_cast<double>(genuine_total);
    curve.points.push_back(pt);
    if (tau == 0) break;
  }
  double auc = 0.0;
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i];
    const RocPoint& b = curve.points[i + 1];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  curve.auc = auc;
  return curve;
}

namespace {

std::vector<std::pair<std::size_t, bool>> scores_subset(const std::vector<EvalOutcome>& outcomes,
                                                        std::optional<TamperFactor> factor) {
  std::vector<std::pair<std::size_t, bool>> scored;
  for (const EvalOutcome& oc : outcomes) {
    if (!oc.ok) continue;
    if (factor && oc.entry.forged && oc.entry.factor != *factor) continue;
    scored.emplace_back(oc.inlier_count, oc.entry.forged);
  }
  return scored;
}

}  // namespace

RocCurve roc_for_factor(const std::vector<EvalOutcome>& outcomes, TamperFactor factor) {
  return roc_from_scores(scores_subset(outcomes, factor));
}

RocCurve roc_all(const std::vector<EvalOutcome>& outcomes) {
  return roc_from_scores(scores_subset(outcomes, std::nullopt));
}

SweepResult roc_sweep(const DatasetManifest& manifest, const RunConfig& cfg,
                      std::uint64_t seed) {
  if (manifest.entries.empty()) throw std::invalid_argument("roc_sweep: empty manifest");
  if (!manifest.has_both_labels())
    throw std::invalid_argument("roc_sweep: need both forged and genuine entries");
  SweepResult result;
  result.outcomes = score_manifest(manifest, cfg, seed);
  result.curve = roc_all(result.outcomes);
  return result;
}

std::vector<Perturbation> default_grid() {
  std::vector<Perturbation> grid;
  for (double sigma : {0.5, 1.0, 2.0}) grid.push_back(Perturbation::gaussian_blur(3, sigma));
  for (double var : {1.0, 3.0, 5.0}) grid.push_back(Perturbation::gaussian_noise(0.0, var));
  for (int q : {80, 60, 40}) grid.push_back(Perturbation::jpeg_recompress(q));
  return grid;
}

std::vector<GridCellResult> robustness_grid(const DatasetManifest& manifest,
                                            const std::vector<Perturbation>& grid,
                                            const RunConfig& cfg, std::uint64_t seed) {
  std::vector<GridCellResult> cells;
  cells.reserve(grid.size());
  for (const Perturbation& op : grid) {
    GridCellResult cell;
    cell.op = op;
    cell.sweep.outcomes = score_manifest(manifest, cfg, seed, op);
    cell.sweep.curve = roc_all(cell.sweep.outcomes);
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::vector<RocRow> rows_from_curve(const RocCurve& curve, const std::string& subset,
                                    const std::string& op, double param) {
  std::vector<RocRow> rows;
  rows.reserve(curve.points.size());
  for (const RocPoint& pt : curve.points)
    rows.push_back({subset, op, param, pt.tau, pt.fpr, pt.tpr});
  return rows;
}

void write_roc_csv(const std::string& path, const std::vector<RocRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_roc_csv: cannot open '" + path + "'");
  out << "subset,op,param,tau,fpr,tpr\n";
  char buf[256];
  for (const RocRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%g,%zu,%.6f,%.6f\n", r.subset.c_str(),
                  r.op.c_str(), r.param, r.tau, r.fpr, r.tpr);
    out << buf;
  }
}

void write_roc_svg(const std::string& path,
                   const std::vector<std::pair<std::string, RocCurve>>& curves) {
  const int size = 480, margin = 50;
  const double span = size - 2.0 * margin;
  const char* palette[] = {"#d33", "#36c", "#2a2", "#c80", "#839", "#099",
                           "#555", "#d6a", "#684", "#a22"};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_roc_svg: cannot open '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 220 << "\" height=\""
      << size << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  out << "<line x1=\"" << margin << "\" y1=\"" << size - margin << "\" x2=\"" << size - margin
      << "\" y2=\"" << size - margin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << margin << "\" y1=\"" << size - margin << "\" x2=\"" << margin
      << "\" y2=\"" << margin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << size / 2 << "\" y=\"" << size - 12 << "\" font-size=\"13\">FPR</text>\n";
  out << "<text x=\"12\" y=\"" << size / 2 << "\" font-size=\"13\">TPR</text>\n";
  char buf[256];
  int idx = 0;
  for (const auto& [label, curve] : curves) {
    const char* color = palette[idx % 10];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const RocPoint& pt : curve.points) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", margin + pt.fpr * span,
                    size - margin - pt.tpr * span);
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%d\" font-size=\"12\" fill=\"%s\">%s (auc %.3f)</text>\n",
                  size + 6, margin + 16 * idx, color, label.c_str(), curve.auc);
    out << buf;
    ++idx;
  }
  out << "</svg>\n";
}

}  // namespace cmfd
