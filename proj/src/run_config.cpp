#include "cmfd/run_config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cmfd {

using nlohmann::json;

void RunConfig::validate() const {
  pyramid.validate();
  harris.validate();
  descriptor.validate();
  matcher.validate();
  if (orientation_radius < 1)
    throw std::invalid_argument("RunConfig: orientation_radius must be >= 1");
}

namespace {

json matcher_to_json(const MatcherConfig& m) {
  json j;
  j["epsilon"] = m.epsilon;
  if (m.block_epsilon)
    j["block_epsilon"] = *m.block_epsilon;
  else
    j["block_epsilon"] = nullptr;
  j["d_min"] = m.d_min;
  j["model"] = to_string(m.model);
  j["iterations"] = m.iterations;
  j["tolerance"] = m.tolerance;
  j["tau_match"] = m.tau_match;
  return j;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  j["pyramid"] = {{"octaves", cfg.pyramid.octaves},
                  {"intervals", cfg.pyramid.intervals},
                  {"beta", cfg.pyramid.beta},
                  {"base_sigma", cfg.pyramid.base_sigma},
                  {"sigma_step", cfg.pyramid.sigma_step}};
  j["harris"] = {{"k", cfg.harris.k},
                 {"t_cr_fraction", cfg.harris.t_cr_fraction},
                 {"window_sigma", cfg.harris.window_sigma},
                 {"nms_radius", cfg.harris.nms_radius},
                 {"border_margin", cfg.harris.border_margin}};
  j["descriptor"] = {{"lbp2_p", cfg.descriptor.lbp2_p},
                     {"lbp1_radius", cfg.descriptor.lbp1_radius},
                     {"lbp2_radius", cfg.descriptor.lbp2_radius},
                     {"normalize_blocks", cfg.descriptor.normalize_blocks}};
  j["matcher"] = matcher_to_json(cfg.matcher);
  j["orientation_radius"] = cfg.orientation_radius;
  j["seed"] = cfg.seed;
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: JSON parse error: ") + e.what());
  }
  RunConfig cfg;
  if (j.contains("pyramid")) {
    const json& p = j.at("pyramid");
    read_if(p, "octaves", cfg.pyramid.octaves);
    read_if(p, "intervals", cfg.pyramid.intervals);
    read_if(p, "beta", cfg.pyramid.beta);
    read_if(p, "base_sigma", cfg.pyramid.base_sigma);
    read_if(p, "sigma_step", cfg.pyramid.sigma_step);
  }
  if (j.contains("harris")) {
    const json& h = j.at("harris");
    read_if(h, "k", cfg.harris.k);
    read_if(h, "t_cr_fraction", cfg.harris.t_cr_fraction);
    read_if(h, "window_sigma", cfg.harris.window_sigma);
    read_if(h, "nms_radius", cfg.harris.nms_radius);
    read_if(h, "border_margin", cfg.harris.border_margin);
  }
  if (j.contains("descriptor")) {
    const json& d = j.at("descriptor");
    read_if(d, "lbp2_p", cfg.descriptor.lbp2_p);
    read_if(d, "lbp1_radius", cfg.descriptor.lbp1_radius);
    read_if(d, "lbp2_radius", cfg.descriptor.lbp2_radius);
    read_if(d, "normalize_blocks", cfg.descriptor.normalize_blocks);
  }
  if (j.contains("matcher")) {
    const json& m = j.at("matcher");
    read_if(m, "epsilon", cfg.matcher.epsilon);
    if (m.contains("block_epsilon") && !m.at("block_epsilon").is_null())
      cfg.matcher.block_epsilon = m.at("block_epsilon").get<std::array<double, 4>>();
    read_if(m, "d_min", cfg.matcher.d_min);
    if (m.contains("model")) cfg.matcher.model = transform_kind_from_string(m.at("model"));
    read_if(m, "iterations", cfg.matcher.iterations);
    read_if(m, "tolerance", cfg.matcher.tolerance);
    read_if(m, "tau_match", cfg.matcher.tau_match);
  }
  read_if(j, "orientation_radius", cfg.orientation_radius);
  read_if(j, "seed", cfg.seed);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

}  // namespace cmfd
