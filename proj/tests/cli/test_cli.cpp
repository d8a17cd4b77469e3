#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "hsadapt/adapter.hpp"
#include "hsadapt/io.hpp"
#include "hsadapt/metrics.hpp"

using namespace hsadapt;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = HSADAPT_CLI_WORKDIR;

struct Run {
  int code = -1;
  std::string out;
};

Run hsadapt_cli(const std::string& args) {
  const std::string cmd = std::string("'") + HSADAPT_EXE + "' " + args + " 2>>'" +
                          (kWork / "stderr.log").string() + "'";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path fresh(const std::string& name) {
  const fs::path d = kWork / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Second line of a two-line metrics block, as numbers.
std::vector<double> metric_row(const std::string& out) {
  std::istringstream is(out);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  REQUIRE(header == "psnr\tsam\tssim\twall_time");
  std::istringstream rs(row);
  std::vector<double> v;
  for (double x; rs >> x;) v.push_back(x);
  REQUIRE(v.size() == 4);
  return v;
}

}  // namespace

TEST_CASE("phantom is deterministic and validated") {
  const fs::path d = fresh("phantom");
  REQUIRE(hsadapt_cli("phantom --height 16 --width 12 --channels 7 --rank 3 --seed 4 --out " + q(d / "a.hsb")).code == 0);
  REQUIRE(hsadapt_cli("phantom --height 16 --width 12 --channels 7 --rank 3 --seed 4 --out " + q(d / "b.hsb")).code == 0);
  REQUIRE(hsadapt_cli("phantom --height 16 --width 12 --channels 7 --rank 3 --seed 5 --out " + q(d / "c.hsb")).code == 0);
  CHECK(slurp(d / "a.hsb") == slurp(d / "b.hsb"));
  CHECK(slurp(d / "a.hsb") != slurp(d / "c.hsb"));
  CHECK(read_hsb(d / "a.hsb").shape() == Shape{16, 12, 7});
  CHECK(slurp(d / "a.hsb.config.txt").rfind("# command: ", 0) == 0);
  CHECK(hsadapt_cli("phantom --height 16 --width 12 --channels 31 --rank 40 --out " + q(d / "x.hsb")).code == 2);
  CHECK(hsadapt_cli("phantom --height 16 --width 12 --channels 7").code == 2);
  CHECK(hsadapt_cli("").code == 2);
  CHECK(hsadapt_cli("frobnicate").code == 2);
}

TEST_CASE("degrade produces the task's observation") {
  const fs::path d = fresh("degrade");
  REQUIRE(hsadapt_cli("phantom --height 64 --width 64 --channels 31 --rank 3 --seed 1 --out " + q(d / "x.hsb")).code == 0);
  REQUIRE(hsadapt_cli("degrade --task denoise10 --seed 2 --in " + q(d / "x.hsb") + " --out " + q(d / "y.hsb")).code == 0);
  const auto ev = hsadapt_cli("evaluate --ref " + q(d / "x.hsb") + " --in " + q(d / "y.hsb"));
  REQUIRE(ev.code == 0);
  CHECK(metric_row(ev.out)[0] == doctest::Approx(20.0).epsilon(0.025));
  CHECK(slurp(d / "y.hsb.config.txt").find("task = denoise10\n") != std::string::npos);

  REQUIRE(hsadapt_cli("degrade --task sisr4 --in " + q(d / "x.hsb") + " --out " + q(d / "s.hsb")).code == 0);
  CHECK(read_hsb(d / "s.hsb").shape() == Shape{16, 16, 31});

  REQUIRE(hsadapt_cli("phantom --height 30 --width 32 --channels 4 --rank 2 --out " + q(d / "odd.hsb")).code == 0);
  CHECK(hsadapt_cli("degrade --task sisr4 --in " + q(d / "odd.hsb") + " --out " + q(d / "o.hsb")).code == 2);
  CHECK(hsadapt_cli("degrade --task denoise30 --in " + q(d / "x.hsb") + " --out " + q(d / "o.hsb")).code == 2);
  CHECK(hsadapt_cli("degrade --task deblur --in " + q(d / "x.hsb") + " --out " + q(d / "o.hsb") + " --set blur=2").code == 2);
  CHECK(hsadapt_cli("degrade --task deblur --in " + q(d / "x.hsb") + " --out " + q(d / "o.hsb") + " --set nokey").code == 2);
}

TEST_CASE("restore") {
  const fs::path d = fresh("restore");
  REQUIRE(hsadapt_cli("phantom --height 32 --width 32 --channels 31 --rank 3 --seed 3 --out " + q(d / "x.hsb")).code == 0);
  REQUIRE(hsadapt_cli("degrade --task denoise10 --seed 1 --in " + q(d / "x.hsb") + " --out " + q(d / "y.hsb")).code == 0);

  SUBCASE("identity denoiser with one iteration returns the input") {
    REQUIRE(hsadapt_cli("restore --task denoise10 --denoiser identity --iters 1 --in " + q(d / "y.hsb") +
                        " --out " + q(d / "id.hsb")).code == 0);
    CHECK(slurp(d / "id.hsb") == slurp(d / "y.hsb"));
  }
  SUBCASE("a real denoiser improves PSNR and the run is recorded") {
    const auto noisy = metric_row(hsadapt_cli("evaluate --ref " + q(d / "x.hsb") + " --in " + q(d / "y.hsb")).out);
    const auto r = hsadapt_cli("restore --task denoise10 --encoder seq_rgb --denoiser gaussian --in " +
                               q(d / "y.hsb") + " --ref " + q(d / "x.hsb") + " --out " + q(d / "g.hsb"));
    REQUIRE(r.code == 0);
    const auto m = metric_row(r.out);
    CHECK(m[0] > noisy[0] + 5.0);
    CHECK(m[1] < noisy[1]);
    CHECK(slurp(d / "g.hsb.trace.tsv").rfind("iteration\tsigma\talpha\tresidual\n1\t", 0) == 0);
    const std::string echo = slurp(d / "g.hsb.config.txt");
    CHECK(echo.find("--encoder seq_rgb") != std::string::npos);
    CHECK(echo.find("encoder = seq_rgb\n") != std::string::npos);

    // The echoed configuration reproduces the run.
    const fs::path cfg = d / "echo.cfg";
    std::ofstream(cfg) << echo;
    REQUIRE(hsadapt_cli("restore --task denoise10 --config " + q(cfg) + " --in " + q(d / "y.hsb") +
                        " --out " + q(d / "g2.hsb")).code == 0);
    CHECK(slurp(d / "g2.hsb") == slurp(d / "g.hsb"));
  }
  SUBCASE("deblur and sisr4 run end to end") {
    REQUIRE(hsadapt_cli("degrade --task deblur --in " + q(d / "x.hsb") + " --out " + q(d / "b.hsb")).code == 0);
    const auto blurred = metric_row(hsadapt_cli("evaluate --ref " + q(d / "x.hsb") + " --in " + q(d / "b.hsb")).out);
    const auto rb = hsadapt_cli("restore --task deblur --iters 8 --in " + q(d / "b.hsb") + " --ref " + q(d / "x.hsb") +
                                " --out " + q(d / "rb.hsb"));
    REQUIRE(rb.code == 0);
    CHECK(metric_row(rb.out)[0] > blurred[0]);

    REQUIRE(hsadapt_cli("degrade --task sisr4 --in " + q(d / "x.hsb") + " --out " + q(d / "s.hsb")).code == 0);
    const auto rs = hsadapt_cli("restore --task sisr4 --iters 4 --encoder pca --in " + q(d / "s.hsb") + " --ref " +
                                q(d / "x.hsb") + " --out " + q(d / "rs.hsb"));
    REQUIRE(rs.code == 0);
    CHECK(read_hsb(d / "rs.hsb").shape() == Shape{32, 32, 31});
    CHECK(std::isfinite(metric_row(rs.out)[0]));
  }
  SUBCASE("usage errors") {
    CHECK(hsadapt_cli("restore --task denoise10 --out " + q(d / "z.hsb")).code == 2);
    CHECK(hsadapt_cli("restore --task denoise10 --denoiser bm3d --in " + q(d / "y.hsb") + " --out " + q(d / "z.hsb")).code == 2);
    CHECK(hsadapt_cli("restore --task denoise10 --encoder " + q(d / "missing.hsm") + " --in " + q(d / "y.hsb") +
                      " --out " + q(d / "z.hsb")).code != 0);
    std::ofstream(d / "bad.cfg") << "hqs_lambda = 0.2\nwhatever = 1\n";
    CHECK(hsadapt_cli("restore --task denoise10 --config " + q(d / "bad.cfg") + " --in " + q(d / "y.hsb") +
                      " --out " + q(d / "z.hsb")).code == 2);
  }
}

TEST_CASE("train") {
  const fs::path data = fresh("train_data");
  for (int s = 0; s < 4; ++s)
    REQUIRE(hsadapt_cli("phantom --height 16 --width 16 --channels 31 --rank 3 --seed " + std::to_string(s) +
                        " --out " + q(data / ("p" + std::to_string(s) + ".hsb"))).code == 0);
  const fs::path d = fresh("train");

  REQUIRE(hsadapt_cli("train --data " + q(data) + " --K 11 --c 3 --steps 0 --out " + q(d / "e0.hsm")).code == 0);
  const EncoderSpec s0 = orthonormalize(read_matrix(d / "e0.hsm"), 3);
  CHECK(s0.encoder().rows() == 33);
  CHECK(s0.encoder().cols() == 31);
  CHECK(s0.gram_error() < 1e-10);
  CHECK(slurp(d / "e0.hsm.loss.tsv") == "step\tsigma\ttrain_loss\theldout_loss\n");

  const std::string args = "train --data " + q(data) +
                           " --K 2 --c 3 --steps 3 --seed 9 --set train_batch=1 --set spsa_perturbations=2 --out ";
  const auto a = hsadapt_cli(args + q(d / "a.hsm"));
  const auto b = hsadapt_cli(args + q(d / "b.hsm"));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("initial_heldout\tbest_heldout\tbest_step\n", 0) == 0);
  CHECK(slurp(d / "a.hsm") == slurp(d / "b.hsm"));
  CHECK(slurp(d / "a.hsm.loss.tsv") == slurp(d / "b.hsm.loss.tsv"));

  // A trained encoder plugs into restore.
  REQUIRE(hsadapt_cli("degrade --task denoise10 --in " + q(data / "p0.hsb") + " --out " + q(d / "y.hsb")).code == 0);
  CHECK(hsadapt_cli("restore --task denoise10 --encoder " + q(d / "a.hsm") + " --in " + q(d / "y.hsb") +
                    " --out " + q(d / "r.hsb")).code == 0);

  const fs::path empty = fresh("train_empty");
  CHECK(hsadapt_cli("train --data " + q(empty) + " --out " + q(d / "x.hsm")).code == 2);
  CHECK(hsadapt_cli("train --data " + q(kWork / "no_such_dir") + " --out " + q(d / "x.hsm")).code == 2);
  CHECK(hsadapt_cli("train --data " + q(data) + " --c 2 --out " + q(d / "x.hsm")).code == 2);
}

TEST_CASE("ablate writes resumable cells and a table") {
  const fs::path data = fresh("ablate_data");
  REQUIRE(hsadapt_cli("phantom --height 32 --width 32 --channels 31 --rank 3 --seed 11 --out " + q(data / "a.hsb")).code == 0);
  const fs::path out = kWork / "ablate_out";
  fs::remove_all(out);
  const std::string args = "ablate --data " + q(data) + " --tasks denoise10 --seeds 0 --encoders seq_rgb --out " + q(out);

  const auto first = hsadapt_cli(args);
  REQUIRE(first.code == 0);
  const std::string table = slurp(out / "ablation.tsv");
  std::istringstream is(table);
  std::string header, row, extra;
  std::getline(is, header);
  std::getline(is, row);
  CHECK_FALSE(std::getline(is, extra));
  CHECK(header == "encoder\ttask\tseed\tpsnr\tsam\tssim\ttime");
  std::istringstream rs(row);
  std::string enc, task;
  double seed, psnr, sam, ssim, t;
  REQUIRE(static_cast<bool>(rs >> enc >> task >> seed >> psnr >> sam >> ssim >> t));
  CHECK(enc == "seq_rgb");
  CHECK(task == "denoise10");
  CHECK(psnr > 25.0);
  CHECK(std::isfinite(sam));
  CHECK(ssim <= 1.0);
  CHECK(fs::exists(out / "ablation.config.txt"));
  CHECK(fs::exists(out / "cells" / "seq_rgb__denoise10__s0.tsv"));

  // Finished cells are not recomputed.
  const auto mtime = fs::last_write_time(out / "cells" / "seq_rgb__denoise10__s0.tsv");
  fs::remove(out / "ablation.tsv");
  const auto second = hsadapt_cli(args);
  REQUIRE(second.code == 0);
  CHECK(second.out == first.out);
  CHECK(slurp(out / "ablation.tsv") == table);
  CHECK(fs::last_write_time(out / "cells" / "seq_rgb__denoise10__s0.tsv") == mtime);

  CHECK(hsadapt_cli("ablate --data " + q(data) + " --encoders nonsense --out " + q(out)).code == 2);
  CHECK(hsadapt_cli("ablate --data " + q(data) + " --seeds x --out " + q(out)).code == 2);
  CHECK(hsadapt_cli("ablate --data " + q(fresh("ablate_empty")) + " --out " + q(out)).code == 2);
}
