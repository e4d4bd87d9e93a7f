#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "boxheat/config.hpp"
#include "boxheat/error.hpp"
#include "boxheat/experiments.hpp"

using namespace boxheat;

TEST_CASE("defaults validate and round-trip through INI") {
  const ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  const ExperimentConfig back = parse_config(c.to_ini());
  CHECK(back.to_ini() == c.to_ini());
}

TEST_CASE("every preset loads and round-trips") {
  for (const std::string& name : preset_names()) {
    CAPTURE(name);
    ConfigSources s;
    s.preset = name;
    const ExperimentConfig c = load_config(s);
    CHECK(parse_config(c.to_ini()).to_ini() == c.to_ini());
  }
  ConfigSources bad;
  bad.preset = "no-such-preset";
  CHECK_THROWS_AS(load_config(bad), ValidationError);
}

TEST_CASE("unknown keys and bad values are rejected with the field path") {
  try {
    parse_config("[grid]\nextent = 4\nwidth = 3\n");
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("grid.width") != std::string::npos);
  }
  try {
    parse_config("[grid]\npoints = many\n");
    FAIL("expected rejection");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("grid.points") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nonlinearity]\nm = 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[stepper]\nscheme = euler\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[weight]\nname = neg\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[lplq]\np = 1\nq = 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[bogus]\nkey = 1\n"), ValidationError);
}

TEST_CASE("overrides apply after the preset") {
  ConfigSources s;
  s.preset = "modsq-kernel";
  s.overrides = {"grid.points=65", "kernel.times = 0.5, 1", "run.seed=9"};
  const ExperimentConfig c = load_config(s);
  CHECK(c.points == 65);
  CHECK(c.extent == 8.0);
  CHECK(c.kernel_times == std::vector<double>{0.5, 1.0});
  CHECK(c.seed == 9);
  s.overrides = {"grid.points"};
  CHECK_THROWS_AS(load_config(s), ValidationError);
}

TEST_CASE("polynomial coefficients") {
  const auto c = parse_coefficients("1,1,1; 2,0,0.5,0.1; 0,2,0.5,-0.1");
  CHECK(c.size() == 3);
  CHECK(c.at({2, 0}) == cplx{0.5, 0.1});
  CHECK_THROWS_AS(parse_coefficients("1,1"), ValidationError);
  CHECK_THROWS_AS(parse_coefficients("1,1,1; 1,1,2"), ValidationError);
  const ExperimentConfig cfg = parse_config("[weight]\ncoeffs = 1,1,1\n");
  CHECK(cfg.weight().polynomial() != nullptr);
  CHECK_THROWS_AS(parse_config("[weight]\ncoeffs = 2,0,1\n"), ValidationError);
}

TEST_CASE("schedule kinds") {
  ScheduleConfig s;
  s.kind = "geometric";
  s.t_min = 0.1;
  s.count = 3;
  CHECK(s.build().size() == 3);
  s.kind = "list";
  s.times = {0.1, 0.3};
  CHECK(s.build() == std::vector<double>{0.1, 0.3});
  s.times = {0.3, 0.1};
  CHECK_THROWS_AS(s.build(), ValidationError);
  s.kind = "random";
  CHECK_THROWS_AS(s.build(), ValidationError);
}

TEST_CASE("commands write CSVs and a manifest, and map errors to exit codes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "boxheat_test_config";
  fs::remove_all(dir);
  ConfigSources s;
  s.preset = "modsq";
  s.overrides = {"run.out=" + dir.string()};
  const ExperimentConfig c = load_config(s);
  std::ostringstream log, err;
  CHECK(run_command("delta", c, log, err) == 0);
  CHECK(fs::exists(dir / "delta.csv"));
  CHECK(fs::exists(dir / "manifest.ini"));
  std::ifstream in(dir / "delta.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(row.rfind("modsq,1,delta_positive", 0) == 0);

  CHECK(run_command("beta-check", c, log, err) == 0);
  CHECK(run_command("nope", c, log, err) == 1);

  ExperimentConfig bad = c;
  bad.kernel_times = {0.001};
  CHECK(run_command("kernel", bad, log, err) == 1);
  fs::remove_all(dir);
}
