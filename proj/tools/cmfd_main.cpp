// Command-line front end: detect, match, eval, perturb, synth,
// dump-keypoints, manifest.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cmfd/eval.hpp"
#include "cmfd/forgery.hpp"
#include "cmfd/image_io.hpp"
#include "cmfd/matcher.hpp"
#include "cmfd/overlay.hpp"
#include "cmfd/perturb.hpp"
#include "cmfd/run_config.hpp"
#include "cmfd/scale_space.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitGenuine = 0;
constexpr int kExitForged = 1;
constexpr int kExitError = 2;

// CLI overrides applied on top of --config file values
struct ConfigFlags {
  std::string config_path;
  std::optional<int> octaves, intervals, iterations, lbp2_p, orientation_radius, nms_radius;
  std::optional<double> beta, base_sigma, harris_k, t_cr_fraction, window_sigma;
  std::optional<double> epsilon, d_min, tolerance;
  std::optional<std::size_t> tau_match;
  std::optional<std::string> model;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration file");
    cmd->add_option("--seed", seed, "seed for all randomness");
    cmd->add_option("--octaves", octaves, "pyramid octaves");
    cmd->add_option("--intervals", intervals, "pyramid intervals");
    cmd->add_option("--beta", beta, "pyramid sampling factor");
    cmd->add_option("--base-sigma", base_sigma, "first interval sigma");
    cmd->add_option("--harris-k", harris_k, "corner response weight");
    cmd->add_option("--t-cr-fraction", t_cr_fraction, "response threshold fraction");
    cmd->add_option("--window-sigma", window_sigma, "second moment window sigma");
    cmd->add_option("--nms-radius", nms_radius, "non-max suppression radius");
    cmd->add_option("--lbp2-p", lbp2_p, "riu2 neighbor count (12 or 16)");
    cmd->add_option("--orientation-radius", orientation_radius, "orientation window radius");
    cmd->add_option("--epsilon", epsilon, "matching threshold");
    cmd->add_option("--d-min", d_min, "minimum spatial separation of a match");
    cmd->add_option("--model", model, "RANSAC model: translation|similarity|affine");
    cmd->add_option("--iterations", iterations, "RANSAC iterations");
    cmd->add_option("--tolerance", tolerance, "RANSAC inlier tolerance, pixels");
    cmd->add_option("--tau-match", tau_match, "verdict threshold on inlier count");
  }

  cmfd::RunConfig resolve() const {
    cmfd::RunConfig cfg;
    if (!config_path.empty()) cfg = cmfd::load_run_config(config_path);
    if (octaves) cfg.pyramid.octaves = *octaves;
    if (intervals) cfg.pyramid.intervals = *intervals;
    if (beta) cfg.pyramid.beta = *beta;
    if (base_sigma) cfg.pyramid.base_sigma = *base_sigma;
    if (harris_k) cfg.harris.k = *harris_k;
    if (t_cr_fraction) cfg.harris.t_cr_fraction = *t_cr_fraction;
    if (window_sigma) cfg.harris.window_sigma = *window_sigma;
    if (nms_radius) cfg.harris.nms_radius = *nms_radius;
    if (lbp2_p) cfg.descriptor.lbp2_p = *lbp2_p;
    if (orientation_radius) cfg.orientation_radius = *orientation_radius;
    if (epsilon) cfg.matcher.epsilon = *epsilon;
    if (d_min) cfg.matcher.d_min = *d_min;
    if (model) cfg.matcher.model = cmfd::transform_kind_from_string(*model);
    if (iterations) cfg.matcher.iterations = *iterations;
    if (tolerance) cfg.matcher.tolerance = *tolerance;
    if (tau_match) cfg.matcher.tau_match = *tau_match;
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "'");
  out << text;
}

void write_meta(const std::string& artifact_path, const cmfd::RunConfig& cfg,
                const json& extra = json::object()) {
  json meta = extra;
  meta["config"] = json::parse(cmfd::run_config_to_json(cfg));
  write_text(artifact_path + ".meta.json", meta.dump(2));
}

int run_detect(const std::string& image_path, const ConfigFlags& flags, const std::string& out,
               const std::string& overlay) {
  const cmfd::RunConfig cfg = flags.resolve();
  const cmfd::GrayImage img = cmfd::load_image(image_path);
  const cmfd::DetectionReport report = cmfd::detect(img, cfg, cfg.seed);
  const std::string text = cmfd::report_to_json(report, cfg);
  if (out.empty())
    std::cout << text << "\n";
  else
    write_text(out, text);
  if (!overlay.empty()) cmfd::write_match_overlay(img, report.inliers, overlay);
  return report.forged ? kExitForged : kExitGenuine;
}

int run_match(const std::string& image_path, const ConfigFlags& flags, const std::string& out) {
  const cmfd::RunConfig cfg = flags.resolve();
  const cmfd::GrayImage img = cmfd::load_image(image_path);
  const cmfd::Pyramid pyr = cmfd::build_pyramid(img, cfg.pyramid);
  const auto kps = cmfd::oriented_keypoints(pyr, cfg.harris, cfg.orientation_radius);
  const auto descs = cmfd::describe(pyr, kps, cfg.descriptor, cfg.pyramid.beta);
  const auto pairs = cmfd::match_features(descs, cfg.matcher);

  std::ostringstream csv;
  csv << "ax,ay,bx,by,d1,d2,d3,d4,combined\n";
  char buf[256];
  for (const cmfd::MatchPair& p : pairs) {
    std::snprintf(buf, sizeof(buf), "%.3f,%.3f,%.3f,%.3f,%.6f,%.6f,%.6f,%.6f,%.6f\n", p.ax,
                  p.ay, p.bx, p.by, p.block_distances[0], p.block_distances[1],
                  p.block_distances[2], p.block_distances[3], p.combined_distance());
    csv << buf;
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out, csv.str());
    write_meta(out, cfg, {{"image", image_path}, {"candidates", pairs.size()}});
  }
  return kExitGenuine;
}

int run_eval(const std::string& manifest_path, const ConfigFlags& flags,
             const std::string& out_dir, bool grid, bool svg) {
  const cmfd::RunConfig cfg = flags.resolve();
  cmfd::DatasetManifest manifest = cmfd::load_manifest(manifest_path);
  // paths are relative to the manifest's directory
  const fs::path base = fs::path(manifest_path).parent_path();
  for (cmfd::ManifestEntry& e : manifest.entries)
    if (!fs::path(e.image_path).is_absolute() && !base.empty())
      e.image_path = (base / e.image_path).string();
  fs::create_directories(out_dir);

  const cmfd::SweepResult clean = cmfd::roc_sweep(manifest, cfg, cfg.seed);

  std::vector<cmfd::RocRow> rows = cmfd::rows_from_curve(clean.curve, "all", "none", 0.0);
  json auc;
  auc["all"] = clean.curve.auc;
  std::vector<std::pair<std::string, cmfd::RocCurve>> svg_curves{{"all", clean.curve}};

  // one clean curve per tamper factor present in the manifest
  std::vector<cmfd::TamperFactor> factors;
  for (const cmfd::ManifestEntry& e : manifest.entries) {
    if (e.forged && std::find(factors.begin(), factors.end(), e.factor) == factors.end())
      factors.push_back(e.factor);
  }
  if (factors.size() > 1) {
    for (cmfd::TamperFactor f : factors) {
      const cmfd::RocCurve curve = cmfd::roc_for_factor(clean.outcomes, f);
      const std::string name = cmfd::to_string(f);
      auto sub = cmfd::rows_from_curve(curve, name, "none", 0.0);
      rows.insert(rows.end(), sub.begin(), sub.end());
      auc[name] = curve.auc;
      svg_curves.emplace_back(name, curve);
    }
  }

  json grid_auc = json::object();
  if (grid) {
    const auto cells = cmfd::robustness_grid(manifest, cmfd::default_grid(), cfg, cfg.seed);
    for (const cmfd::GridCellResult& cell : cells) {
      auto sub = cmfd::rows_from_curve(cell.sweep.curve, "all", cell.op.label(),
                                       cell.op.parameter());
      rows.insert(rows.end(), sub.begin(), sub.end());
      char key[64];
      std::snprintf(key, sizeof(key), "%s@%g", cell.op.label().c_str(), cell.op.parameter());
      grid_auc[key] = cell.sweep.curve.auc;
      svg_curves.emplace_back(key, cell.sweep.curve);
    }
  }

  cmfd::write_roc_csv((fs::path(out_dir) / "roc.csv").string(), rows);

  json errors = json::array();
  for (const cmfd::EvalOutcome& oc : clean.outcomes)
    if (!oc.ok) errors.push_back({{"image_path", oc.entry.image_path}, {"error", oc.error}});

  json summary;
  summary["auc"] = auc;
  if (grid) summary["grid_auc"] = grid_auc;
  summary["errors"] = errors;
  summary["config"] = json::parse(cmfd::run_config_to_json(cfg));
  write_text((fs::path(out_dir) / "summary.json").string(), summary.dump(2));
  if (svg) cmfd::write_roc_svg((fs::path(out_dir) / "roc.svg").string(), svg_curves);
  return kExitGenuine;
}

int run_perturb(const std::string& image_path, const ConfigFlags& flags, const std::string& op,
                int window, double sigma, double mean, double var, int quality,
                const std::string& out) {
  const cmfd::RunConfig cfg = flags.resolve();
  cmfd::Perturbation p;
  if (op == "blur")
    p = cmfd::Perturbation::gaussian_blur(window, sigma);
  else if (op == "noise")
    p = cmfd::Perturbation::gaussian_noise(mean, var);
  else if (op == "jpeg")
    p = cmfd::Perturbation::jpeg_recompress(quality);
  else
    throw std::runtime_error("perturb: unknown op '" + op + "' (blur|noise|jpeg)");
  const cmfd::GrayImage img = cmfd::load_image(image_path);
  cmfd::save_image(cmfd::perturb(img, p, cfg.seed), out);
  write_meta(out, cfg, {{"image", image_path}, {"op", p.label()}, {"param", p.parameter()}});
  return kExitGenuine;
}

int run_synth(const ConfigFlags& flags, const std::string& out_dir, int n,
              const std::string& tamper, int size, int patch, double min_shift) {
  const cmfd::RunConfig cfg = flags.resolve();
  const cmfd::TamperFactor factor = cmfd::tamper_factor_from_string(tamper);
  fs::create_directories(out_dir);
  const auto corpus = cmfd::generate_corpus(n, factor, cfg.seed, size, patch, min_shift);

  cmfd::DatasetManifest manifest;
  for (const cmfd::CorpusEntry& entry : corpus) {
    const std::string file = entry.name + ".png";
    cmfd::save_png(entry.image, (fs::path(out_dir) / file).string());
    if (entry.gt)
      write_text((fs::path(out_dir) / (entry.name + ".gt.json")).string(),
                 cmfd::ground_truth_to_json(*entry.gt));
    cmfd::ManifestEntry me;
    me.image_path = file;
    me.forged = entry.forged;
    me.factor = entry.factor;
    me.pair_id = entry.name.substr(entry.name.find('_') + 1);
    manifest.entries.push_back(std::move(me));
  }
  write_text((fs::path(out_dir) / "manifest.json").string(), cmfd::manifest_to_json(manifest));
  write_meta((fs::path(out_dir) / "corpus").string(), cfg,
             {{"n", n}, {"tamper", tamper}, {"size", size}, {"patch", patch}});
  return kExitGenuine;
}

int run_dump_keypoints(const std::string& image_path, const ConfigFlags& flags,
                       const std::string& out, const std::string& dump_pyramid,
                       const std::string& descriptors_out) {
  const cmfd::RunConfig cfg = flags.resolve();
  const cmfd::GrayImage img = cmfd::load_image(image_path);
  const cmfd::Pyramid pyr = cmfd::build_pyramid(img, cfg.pyramid);
  if (!dump_pyramid.empty()) {
    fs::create_directories(dump_pyramid);
    for (int o = 1; o <= pyr.octaves(); ++o)
      for (int i = 1; i <= pyr.intervals(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "level_o%d_i%d.pgm", o, i);
        cmfd::save_pgm(pyr.level(o, i), (fs::path(dump_pyramid) / name).string());
      }
  }
  const auto kps = cmfd::oriented_keypoints(pyr, cfg.harris, cfg.orientation_radius);
  if (!descriptors_out.empty()) {
    const auto descs = cmfd::describe(pyr, kps, cfg.descriptor, cfg.pyramid.beta);
    std::ostringstream csv;
    char num[32];
    for (const cmfd::Descriptor& d : descs) {
      std::snprintf(num, sizeof(num), "%.3f,%.3f", d.x, d.y);
      csv << num;
      for (const std::vector<double>* block : {&d.v1, &d.v2, &d.v3, &d.v4})
        for (double v : *block) {
          std::snprintf(num, sizeof(num), ",%.9g", v);
          csv << num;
        }
      csv << "\n";
    }
    write_text(descriptors_out, csv.str());
    write_meta(descriptors_out, cfg, {{"image", image_path}, {"descriptors", descs.size()}});
  }
  std::ostringstream csv;
  csv << "octave,interval,x,y,response,theta\n";
  char buf[160];
  for (const cmfd::Keypoint& kp : kps) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.1f,%.1f,%.8g,%.6f\n", kp.octave, kp.interval,
                  kp.x, kp.y, kp.response, kp.orientation);
    csv << buf;
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out, csv.str());
    write_meta(out, cfg, {{"image", image_path}, {"keypoints", kps.size()}});
  }
  return kExitGenuine;
}

int run_manifest(const std::string& dir, const std::string& out, const std::string& factor) {
  // COVERAGE-style pairing: <id><ext> is the genuine original, <id>t<ext>
  // its forged version.
  const cmfd::TamperFactor f = cmfd::tamper_factor_from_string(factor);
  std::map<std::string, std::pair<std::string, std::string>> pairs;  // id -> (orig, forged)
  for (const auto& de : fs::directory_iterator(dir)) {
    if (!de.is_regular_file()) continue;
    std::string ext = de.path().extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext != ".png" && ext != ".jpg" && ext != ".jpeg" && ext != ".pgm") continue;
    std::string stem = de.path().stem().string();
    const bool tampered = !stem.empty() && stem.back() == 't';
    if (tampered) stem.pop_back();
    if (stem.empty()) continue;
    auto& slot = pairs[stem];
    (tampered ? slot.second : slot.first) = de.path().string();
  }
  cmfd::DatasetManifest manifest;
  for (const auto& [id, slot] : pairs) {
    if (!slot.first.empty())
      manifest.entries.push_back({slot.first, false, cmfd::TamperFactor::none, id});
    if (!slot.second.empty()) manifest.entries.push_back({slot.second, true, f, id});
  }
  if (manifest.entries.empty())
    throw std::runtime_error("manifest: no images with the <id>/<id>t naming found in " + dir);
  write_text(out, cmfd::manifest_to_json(manifest));
  return kExitGenuine;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"copy-move forgery detection with scaled Harris feature descriptors"};
  app.require_subcommand(1);

  std::string image_path, out, overlay, manifest_path, out_dir, op;
  std::string tamper = "naive", dump_pyramid, scan_dir, factor = "combined", descriptors_out;
  int window = 3, quality = 60, n = 5, size = 512, patch = 64;
  double sigma = 1.0, mean = 0.0, var = 1.0, min_shift = 50.0;
  bool grid = false, svg = false;

  ConfigFlags detect_flags, match_flags, eval_flags, perturb_flags, synth_flags, dump_flags;

  CLI::App* detect = app.add_subcommand("detect", "detect copy-move forgery in one image");
  detect->add_option("image", image_path, "input image")->required();
  detect->add_option("--out", out, "write the JSON report here instead of stdout");
  detect->add_option("--overlay", overlay, "write a match overlay PNG");
  detect_flags.add_to(detect);

  CLI::App* match = app.add_subcommand("match", "dump candidate pairs before RANSAC");
  match->add_option("image", image_path, "input image")->required();
  match->add_option("--out", out, "CSV output path (default stdout)");
  match_flags.add_to(match);

  CLI::App* eval = app.add_subcommand("eval", "ROC sweep over a dataset manifest");
  eval->add_option("--manifest", manifest_path, "dataset manifest JSON")->required();
  eval->add_option("--out-dir", out_dir, "output directory")->required();
  eval->add_flag("--grid", grid, "also run the blur/noise/jpeg robustness grid");
  eval->add_flag("--svg", svg, "write roc.svg");
  eval_flags.add_to(eval);

  CLI::App* perturb = app.add_subcommand("perturb", "apply one post-processing operation");
  perturb->add_option("image", image_path, "input image")->required();
  perturb->add_option("--op", op, "blur|noise|jpeg")->required();
  perturb->add_option("--window", window, "blur window size (odd)");
  perturb->add_option("--sigma", sigma, "blur sigma");
  perturb->add_option("--mean", mean, "noise mean");
  perturb->add_option("--var", var, "noise variance, gray-levels^2");
  perturb->add_option("--quality", quality, "JPEG quality factor");
  perturb->add_option("--out", out, "output image path")->required();
  perturb_flags.add_to(perturb);

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic forgery corpus");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--n", n, "forged/genuine image count per side");
  synth->add_option("--tamper", tamper, "naive|rotation|scaling");
  synth->add_option("--size", size, "image side length");
  synth->add_option("--patch", patch, "copied patch side length");
  synth->add_option("--min-shift", min_shift, "minimum copy translation, pixels");
  synth_flags.add_to(synth);

  CLI::App* dump = app.add_subcommand("dump-keypoints", "write the keypoint table");
  dump->add_option("image", image_path, "input image")->required();
  dump->add_option("--out", out, "CSV output path (default stdout)");
  dump->add_option("--dump-pyramid", dump_pyramid, "also write pyramid levels as PGM");
  dump->add_option("--descriptors", descriptors_out, "also write descriptor rows as CSV");
  dump_flags.add_to(dump);

  CLI::App* mani = app.add_subcommand("manifest", "build a manifest from a COVERAGE-style dir");
  mani->add_option("dir", scan_dir, "directory with <id> / <id>t image pairs")->required();
  mani->add_option("--out", out, "manifest output path")->required();
  mani->add_option("--tamper-factor", factor, "factor label for the tampered images");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (detect->parsed()) return run_detect(image_path, detect_flags, out, overlay);
    if (match->parsed()) return run_match(image_path, match_flags, out);
    if (eval->parsed()) return run_eval(manifest_path, eval_flags, out_dir, grid, svg);
    if (perturb->parsed())
      return run_perturb(image_path, perturb_flags, op, window, sigma, mean, var, quality, out);
    if (synth->parsed())
      return run_synth(synth_flags, out_dir, n, tamper, size, patch, min_shift);
    if (dump->parsed())
      return run_dump_keypoints(image_path, dump_flags, out, dump_pyramid, descriptors_out);
    if (mani->parsed()) return run_manifest(scan_dir, out, factor);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
