#include <doctest.h>

#include "bellkl/config.hpp"

using namespace bellkl;

TEST_CASE("happy-path configuration parses and validates") {
  RunConfig c = parse_config(
      "command = optimize\n"
      "family = unbalanced\n"
      "theta = 45\n"
      "kind = detector\n"
      "eta = 0.83\n");
  validate_config(c);
  CHECK(c.command == "optimize");
  CHECK(c.resolved_family() == StateFamily::kUnbalanced);
  CHECK(c.theta_deg == 45.0);
  CHECK(c.kind == DetectionKind::kDetector);
  CHECK(c.eta == 0.83);
}

TEST_CASE("comments, blanks and whitespace are tolerated") {
  const RunConfig c = parse_config(
      "# a comment line\n"
      "\n"
      "  command =  strength   # trailing comment\n"
      "  gamma=30\n"
      "  angles = 10, -20, 30, -40\n");
  CHECK(c.command == "strength");
  CHECK(c.gamma_deg == 30.0);
  REQUIRE(c.angles_deg.has_value());
  CHECK((*c.angles_deg)[3] == -40.0);
}

TEST_CASE("conflicting state families are rejected naming both keys") {
  RunConfig c = parse_config("command = optimize\ntheta = 30\ngamma = 20\n");
  try {
    validate_config(c);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string message = e.what();
    CHECK(message.find("theta") != std::string::npos);
    CHECK(message.find("gamma") != std::string::npos);
  }
}

TEST_CASE("range violations name the key and the accepted range") {
  RunConfig c = parse_config("command = optimize\ntheta = 45\neta = 1.2\n");
  try {
    validate_config(c);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string message = e.what();
    CHECK(message.find("eta") != std::string::npos);
    CHECK(message.find("[0, 1]") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    parse_config("command = optimize\nfrobnicate = 7\n");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("frobnicate") != std::string::npos);
  }
}

TEST_CASE("command-specific requirements") {
  SUBCASE("trace needs family and grid") {
    RunConfig c = parse_config("command = trace\nfamily = pseudo\n");
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = parse_config("command = trace\nfamily = pseudo\ngrid = 45,40,35\n");
    validate_config(c);
  }
  SUBCASE("eta-for-strength needs a positive target") {
    RunConfig c = parse_config("command = eta-for-strength\ntheta = 30\n");
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  }
  SUBCASE("strength and chsh need explicit angles") {
    RunConfig c = parse_config("command = strength\ntheta = 30\n");
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  }
  SUBCASE("unknown command is rejected") {
    RunConfig c = parse_config("command = fly\ntheta = 30\n");
    CHECK_THROWS_AS(validate_config(c), ConfigError);
  }
}

TEST_CASE("a dumped configuration parses back to an equivalent run") {
  RunConfig c = parse_config(
      "command = trace\n"
      "family = pseudo\n"
      "grid = 45,40,35\n"
      "kind = detector\n"
      "target_s = 5e-05\n"
      "seed = 424242\n"
      "restarts = 12\n"
      "planar = false\n"
      "eta_resolution = 0.0005\n");
  validate_config(c);
  const std::string dumped = dump_config(c);
  RunConfig back = parse_config(dumped);
  validate_config(back);
  CHECK(dump_config(back) == dumped);
  CHECK(back.search.seed == 424242);
  CHECK(back.search.restarts == 12);
  CHECK_FALSE(back.search.planar_only);
  CHECK(back.search.eta_resolution == 0.0005);
  CHECK(back.target_s == 5e-05);
  CHECK(back.grid == std::vector<double>{45.0, 40.0, 35.0});
}
