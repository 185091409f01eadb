#include <doctest.h>

#include <stdexcept>

#include "cmfd/run_config.hpp"

using namespace cmfd;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults carry the reference parameter set") {
  RunConfig cfg;
  CHECK(cfg.pyramid.octaves == 4);
  CHECK(cfg.pyramid.intervals == 4);
  CHECK(cfg.pyramid.beta == 1.25);
  CHECK(cfg.harris.k == 0.05);
  CHECK(cfg.harris.t_cr_fraction == 0.02);
  CHECK(cfg.matcher.epsilon == 0.3);
  CHECK(cfg.matcher.d_min == 10.0);
  CHECK(cfg.matcher.model == TransformKind::similarity);
  CHECK(cfg.matcher.tau_match == 4);
  CHECK(cfg.descriptor.lbp2_p == 12);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("json round trip preserves every field") {
  RunConfig cfg;
  cfg.pyramid.octaves = 3;
  cfg.pyramid.beta = 1.5;
  cfg.harris.k = 0.06;
  cfg.descriptor.lbp2_p = 16;
  cfg.matcher.epsilon = 0.25;
  cfg.matcher.block_epsilon = {{0.1, 0.2, 0.3, 0.4}};
  cfg.matcher.model = TransformKind::affine;
  cfg.matcher.tau_match = 9;
  cfg.orientation_radius = 5;
  cfg.seed = 123456789ull;
  const RunConfig back = run_config_from_json(run_config_to_json(cfg));
  CHECK(back.pyramid.octaves == 3);
  CHECK(back.pyramid.beta == 1.5);
  CHECK(back.harris.k == 0.06);
  CHECK(back.descriptor.lbp2_p == 16);
  CHECK(back.matcher.epsilon == 0.25);
  REQUIRE(back.matcher.block_epsilon.has_value());
  CHECK((*back.matcher.block_epsilon)[2] == 0.3);
  CHECK(back.matcher.model == TransformKind::affine);
  CHECK(back.matcher.tau_match == 9);
  CHECK(back.orientation_radius == 5);
  CHECK(back.seed == 123456789ull);
}

TEST_CASE("partial json keeps defaults for absent keys") {
  const RunConfig cfg = run_config_from_json("{\"matcher\": {\"epsilon\": 0.5}}");
  CHECK(cfg.matcher.epsilon == 0.5);
  CHECK(cfg.matcher.d_min == 10.0);
  CHECK(cfg.pyramid.octaves == 4);
}

TEST_CASE("invalid json and invalid values are rejected") {
  CHECK_THROWS(run_config_from_json("{broken"));
  CHECK_THROWS(run_config_from_json("{\"pyramid\": {\"beta\": 0.5}}"));
  CHECK_THROWS(run_config_from_json("{\"matcher\": {\"model\": \"boogie\"}}"));
}

TEST_SUITE_END();
