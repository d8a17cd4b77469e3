#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "hsadapt/config.hpp"
#include "hsadapt/errors.hpp"

using namespace hsadapt;
namespace fs = std::filesystem;

TEST_CASE("defaults") {
  const RunConfig cfg;
  CHECK(cfg.get_size("hqs_iters") == 0);
  CHECK(cfg.get_double("hqs_sigma_start") == 0.2);
  CHECK(cfg.get_double("hqs_lambda") == 0.23);
  CHECK(cfg.get("encoder") == "seq_rgb");
  CHECK(cfg.get_size("groups") == 11);
  CHECK(cfg.get_double_list("train_sigma_set") == std::vector<double>{0.05, 0.1, 0.15, 0.2});
  CHECK(RunConfig::known("blur_std"));
  CHECK_FALSE(RunConfig::known("blur"));
  std::set<std::string> keys;
  for (const auto& [k, v] : RunConfig::defaults()) CHECK(keys.insert(k).second);
}

TEST_CASE("parsing") {
  RunConfig cfg;
  cfg.parse("# comment\n\n  blur_std =  1.5  # trailing\nencoder=pca\r\ntrain_sigma_set = 0.1, 0.3\n");
  CHECK(cfg.get_double("blur_std") == 1.5);
  CHECK(cfg.get("encoder") == "pca");
  CHECK(cfg.get_double_list("train_sigma_set") == std::vector<double>{0.1, 0.3});

  try {
    cfg.parse("seed = 1\nbogus = 2\n", "run.cfg");
    FAIL("unknown key accepted");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
  }
  CHECK_THROWS_AS(cfg.parse("seed\n"), ParameterError);
  CHECK_THROWS_AS(cfg.set("nope", "1"), ParameterError);
  CHECK_THROWS_AS(cfg.get("nope"), ParameterError);

  cfg.set("seed", "12x");
  CHECK_THROWS_AS(cfg.get_u64("seed"), ParameterError);
  cfg.set("blur_std", "");
  CHECK_THROWS_AS(cfg.get_double("blur_std"), ParameterError);
  cfg.set("cg_tol", "1e-7");
  CHECK(cfg.get_double("cg_tol") == 1e-7);
  cfg.set("seed", "true");
  CHECK(cfg.get_bool("seed"));
  cfg.set("seed", "maybe");
  CHECK_THROWS_AS(cfg.get_bool("seed"), ParameterError);
  CHECK(cfg.get_list("encoder") == std::vector<std::string>{"pca"});
}

TEST_CASE("echo reloads to the same configuration") {
  RunConfig cfg;
  cfg.set("task", "deblur");
  cfg.set("hqs_lambda", "0.5");
  std::ostringstream os;
  cfg.write_echo(os);
  const std::string text = os.str();
  CHECK(text.rfind("# effective configuration\n", 0) == 0);
  CHECK(text.find("task = deblur\n") != std::string::npos);

  std::random_device rd;
  const fs::path p = fs::temp_directory_path() / ("hsadapt_cfg_" + std::to_string(rd()) + ".txt");
  cfg.write_echo(p);
  RunConfig back;
  back.load(p);
  fs::remove(p);
  for (const auto& [k, v] : RunConfig::defaults()) CHECK(back.get(k) == cfg.get(k));
  CHECK_THROWS_AS(back.load(p), ParameterError);
}
