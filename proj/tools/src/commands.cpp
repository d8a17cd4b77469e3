#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "hsadapt/adapter.hpp"
#include "hsadapt/config.hpp"
#include "hsadapt/degrade.hpp"
#include "hsadapt/denoisers.hpp"
#include "hsadapt/io.hpp"
#include "hsadapt/metrics.hpp"
#include "hsadapt/phantom.hpp"
#include "hsadapt/solver.hpp"
#include "hsadapt/train.hpp"

namespace fs = std::filesystem;

namespace hsadapt::cli {
namespace {

RunConfig load_config(const Common& common) {
  RunConfig cfg;
  if (!common.config_path.empty()) cfg.load(common.config_path);
  for (const auto& kv : common.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

fs::path sidecar(const fs::path& out, std::string_view suffix) {
  return fs::path(out.string() + std::string(suffix));
}

void write_echo(const fs::path& path, const Common& common, const RunConfig* cfg,
                const std::string& extra = {}) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os << "# command: " << common.command_line << '\n';
  if (!extra.empty()) os << extra;
  if (cfg) cfg->write_echo(os);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<fs::path> list_cubes(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw UsageError("data directory '" + dir + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".hsb") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("data directory '" + dir + "' contains no .hsb files");
  return files;
}

std::vector<HSImage> load_cubes(const std::vector<fs::path>& files) {
  std::vector<HSImage> cubes;
  cubes.reserve(files.size());
  for (const auto& f : files) cubes.push_back(read_hsb(f));
  return cubes;
}

DegradationParams degradation_params(const RunConfig& cfg) {
  DegradationParams p;
  p.blur_std = cfg.get_double("blur_std");
  p.blur_support = cfg.get_size("blur_support");
  p.sr_factor = cfg.get_size("sr_factor");
  p.sr_kernel_std = cfg.get_double("sr_kernel_std");
  p.sr_kernel_support = cfg.get_size("sr_kernel_support");
  return p;
}

HQSConfig hqs_config(const RunConfig& cfg, const DegradationOp& op) {
  HQSConfig h;
  h.iters = cfg.get_size("hqs_iters");
  // Plain denoising is a single denoiser pass unless asked otherwise.
  if (h.iters == 0) h.iters = op.kind() == DegradationKind::identity ? 1 : 24;
  h.sigma_start = cfg.get_double("hqs_sigma_start");
  h.sigma_end = cfg.get_double("hqs_sigma_end");
  h.lambda = cfg.get_double("hqs_lambda");
  h.inner_solver = parse_inner_solver(cfg.get("inner_solver"));
  h.cg_tol = cfg.get_double("cg_tol");
  h.cg_max_iter = cfg.get_size("cg_max_iter");
  return h;
}

DenoiserHandle make_denoiser(const std::string& name, std::size_t arity, const RunConfig& cfg) {
  if (name == "gaussian") {
    GaussianKernelOptions opt;
    const double scale = cfg.get_double("gaussian_width_scale");
    opt.width_rule = [scale](double sigma) { return scale * sigma; };
    opt.chroma_width_scale = cfg.get_double("gaussian_chroma_scale");
    return gaussian_kernel_denoiser(arity, opt);
  }
  if (name == "wavelet") {
    WaveletOptions opt;
    const double scale = cfg.get_double("wavelet_threshold_scale");
    opt.threshold_rule = [scale](double sigma) { return scale * sigma; };
    opt.levels = cfg.get_size("wavelet_levels");
    return wavelet_soft_threshold_denoiser(arity, opt);
  }
  if (name == "identity") return identity_denoiser(arity);
  if (name.rfind("external:", 0) == 0) {
    ExternalDenoiserOptions opt;
    opt.command_template = name.substr(9);
    opt.arity = arity;
    const auto& wd = cfg.get("external_workdir");
    opt.workdir = wd.empty() ? fs::temp_directory_path() / "hsadapt-bridge" : fs::path(wd);
    opt.timeout = std::chrono::milliseconds(
        static_cast<long long>(cfg.get_double("external_timeout_s") * 1000.0));
    return external_denoiser(opt);
  }
  throw UsageError("unknown denoiser '" + name +
                   "' (expected gaussian, wavelet, identity or external:<cmd>)");
}

bool is_matrix_source(const std::string& source) {
  return fs::path(source).extension() == ".hsm" || fs::is_regular_file(source);
}

EncoderSpec make_encoder(const std::string& source, std::size_t bands, const RunConfig& cfg,
                         std::span<const HSImage> pca_data) {
  if (is_matrix_source(source)) {
    const Matrix m = read_matrix(source);
    if (static_cast<std::size_t>(m.cols()) != bands)
      throw UsageError("encoder " + source + " has " + std::to_string(m.cols()) +
                       " columns, data has " + std::to_string(bands) + " bands");
    return orthonormalize(m, cfg.get_size("latent_arity"));
  }
  AblationOptions opt;
  opt.seed = cfg.get_u64("seed");
  opt.groups = cfg.get_size("pca_groups");
  opt.latent_arity = cfg.get_size("pca_latent_arity");
  opt.data = pca_data;
  opt.complete_degenerate = true;
  return ablation_encoder(parse_ablation_kind(source), bands, opt);
}

TrainConfig train_config(const RunConfig& cfg) {
  TrainConfig t;
  t.steps = cfg.get_size("train_steps");
  t.batch = cfg.get_size("train_batch");
  t.lr = cfg.get_double("train_lr");
  t.sigma_set = cfg.get_double_list("train_sigma_set");
  t.grad_estimator = parse_gradient_estimator(cfg.get("train_estimator"));
  t.spsa_perturbations = cfg.get_size("spsa_perturbations");
  t.spsa_delta = cfg.get_double("spsa_delta");
  t.seed = cfg.get_u64("seed");
  return t;
}

void print_metrics(std::ostream& os, const MetricReport& m) {
  os << "psnr\tsam\tssim\twall_time\n"
     << std::fixed << std::setprecision(4) << m.psnr << '\t' << m.sam << '\t' << m.ssim << '\t'
     << m.wall_time << '\n';
  os.unsetf(std::ios::floatfield);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int cmd_phantom(const Common& common, const PhantomArgs& a) {
  const HSImage x = make_phantom(Shape{a.height, a.width, a.channels}, a.rank, a.seed);
  write_hsb(x, a.out);
  std::ostringstream extra;
  extra << "# height = " << a.height << "\n# width = " << a.width << "\n# channels = " << a.channels
        << "\n# rank = " << a.rank << "\n# seed = " << a.seed << '\n';
  write_echo(sidecar(a.out, ".config.txt"), common, nullptr, extra.str());
  return 0;
}

int cmd_degrade(const Common& common, const DegradeArgs& a) {
  RunConfig cfg = load_config(common);
  cfg.set("task", a.task);
  cfg.set("seed", std::to_string(a.seed));
  cfg.set("input", a.in);
  cfg.set("output", a.out);
  const HSImage x = read_hsb(a.in);
  const TaskSetup setup =
      make_task(parse_task(a.task), x.height(), x.width(), degradation_params(cfg));
  const HSImage y = add_awgn(apply(setup.op, x), setup.sigma, a.seed);
  write_hsb(y, a.out);
  write_echo(sidecar(a.out, ".config.txt"), common, &cfg);
  return 0;
}

int cmd_restore(const Common& common, const RestoreArgs& a) {
  RunConfig cfg = load_config(common);
  cfg.set("task", a.task);
  if (!a.encoder.empty()) cfg.set("encoder", a.encoder);
  if (!a.denoiser.empty()) cfg.set("denoiser", a.denoiser);
  if (a.iters) cfg.set("hqs_iters", std::to_string(a.iters));
  cfg.set("input", a.in);
  cfg.set("output", a.out);
  cfg.set("reference", a.ref);

  const HSImage y = read_hsb(a.in);
  const Task task = parse_task(a.task);
  const DegradationParams params = degradation_params(cfg);
  const std::size_t scale = task == Task::sisr4 ? params.sr_factor : 1;
  const TaskSetup setup = make_task(task, y.height() * scale, y.width() * scale, params);

  const HSImage start = setup.op.kind() == DegradationKind::downsample
                            ? bilinear_upsample(y, setup.op.factor())
                            : adjoint(setup.op, y);
  const EncoderSpec spec =
      make_encoder(cfg.get("encoder"), y.channels(), cfg, std::span<const HSImage>(&start, 1));
  const WrappedDenoiser wrapped(spec, make_denoiser(cfg.get("denoiser"), spec.latent_arity(), cfg));

  const auto t0 = std::chrono::steady_clock::now();
  const RestoreResult result = restore(y, setup.op, setup.sigma, wrapped, hqs_config(cfg, setup.op));
  const double elapsed = seconds_since(t0);

  write_hsb(result.image, a.out);
  {
    std::ofstream trace(sidecar(a.out, ".trace.tsv"), std::ios::binary | std::ios::trunc);
    write_trace(trace, result.trace);
  }
  write_echo(sidecar(a.out, ".config.txt"), common, &cfg);
  if (!a.ref.empty()) {
    const HSImage ref = read_hsb(a.ref);
    print_metrics(std::cout, evaluate(ref, result.image, elapsed));
  }
  return 0;
}

int cmd_train(const Common& common, const TrainArgs& a) {
  RunConfig cfg = load_config(common);
  if (a.groups) cfg.set("groups", std::to_string(a.groups));
  if (a.latent_arity) cfg.set("latent_arity", std::to_string(a.latent_arity));
  if (a.steps_set) cfg.set("train_steps", std::to_string(a.steps));
  if (a.seed_set) cfg.set("seed", std::to_string(a.seed));
  if (!a.denoiser.empty()) cfg.set("denoiser", a.denoiser);
  cfg.set("input", a.data);
  cfg.set("output", a.out);

  const auto cubes = load_cubes(list_cubes(a.data));
  const std::size_t c = cfg.get_size("latent_arity");
  const DenoiserHandle inner = make_denoiser(cfg.get("denoiser"), c, cfg);
  const TrainResult result = train_encoder(cubes, inner, cfg.get_size("groups"), c, train_config(cfg));

  write_matrix(result.spec.unconstrained(), a.out);
  {
    std::ofstream log(sidecar(a.out, ".loss.tsv"), std::ios::binary | std::ios::trunc);
    write_loss_history(log, result.history);
  }
  write_echo(sidecar(a.out, ".config.txt"), common, &cfg);
  std::cout << "initial_heldout\tbest_heldout\tbest_step\n"
            << std::setprecision(10) << result.initial_heldout_loss << '\t'
            << result.best_heldout_loss << '\t' << result.best_step << '\n';
  return 0;
}

namespace {

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw UsageError("bad seed '" + text + "'");
  return v;
}

// learned_k<N> -> N, 0 for anything else.
std::size_t learned_groups(const std::string& name) {
  if (name.rfind("learned_k", 0) != 0) return 0;
  const std::string digits = name.substr(9);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || v == 0)
    throw UsageError("bad learned encoder '" + name + "' (expected learned_k<N>)");
  return v;
}

constexpr const char* kCellHeader = "encoder\ttask\tseed\tpsnr\tsam\tssim\ttime";

}  // namespace

int cmd_ablate(const Common& common, const AblateArgs& a) {
  RunConfig cfg = load_config(common);
  cfg.set("input", a.data);
  cfg.set("output", a.out);

  const auto tasks = split_list(a.tasks);
  const auto encoders = split_list(a.encoders);
  std::vector<std::uint64_t> seeds;
  for (const auto& s : split_list(a.seeds)) seeds.push_back(parse_seed(s));
  if (tasks.empty() || encoders.empty() || seeds.empty())
    throw UsageError("ablation grid is empty");
  for (const auto& t : tasks) parse_task(t);
  for (const auto& e : encoders)
    if (!learned_groups(e)) parse_ablation_kind(e);

  const auto cubes = load_cubes(list_cubes(a.data));
  const std::size_t bands = cubes.front().channels();
  const fs::path out(a.out);
  fs::create_directories(out / "cells");
  fs::create_directories(out / "encoders");
  write_echo(out / "ablation.config.txt", common, &cfg);

  const DegradationParams params = degradation_params(cfg);
  auto cell_path = [&](const std::string& enc, const std::string& task, std::uint64_t seed) {
    return out / "cells" / (enc + "__" + task + "__s" + std::to_string(seed) + ".tsv");
  };

  for (const auto& enc : encoders) {
    for (std::uint64_t seed : seeds) {
      std::optional<EncoderSpec> spec;
      auto encoder_for_seed = [&]() -> const EncoderSpec& {
        if (spec) return *spec;
        RunConfig local = cfg;
        local.set("seed", std::to_string(seed));
        if (const std::size_t k = learned_groups(enc)) {
          const fs::path cached = out / "encoders" / (enc + "__s" + std::to_string(seed) + ".hsm");
          const std::size_t c = local.get_size("latent_arity");
          if (fs::exists(cached)) {
            spec = orthonormalize(read_matrix(cached), c);
          } else {
            const auto inner = make_denoiser(local.get("denoiser"), c, local);
            const TrainResult trained = train_encoder(cubes, inner, k, c, train_config(local));
            write_matrix(trained.spec.unconstrained(), cached);
            std::ofstream log(sidecar(cached, ".loss.tsv"), std::ios::binary | std::ios::trunc);
            write_loss_history(log, trained.history);
            spec = trained.spec;
          }
        } else {
          spec = make_encoder(enc, bands, local, cubes);
        }
        return *spec;
      };

      for (const auto& task_name : tasks) {
        const fs::path cell = cell_path(enc, task_name, seed);
        if (fs::exists(cell)) {
          std::cerr << "skip " << cell.filename().string() << " (exists)\n";
          continue;
        }
        const EncoderSpec& e = encoder_for_seed();
        const WrappedDenoiser wrapped(e, make_denoiser(cfg.get("denoiser"), e.latent_arity(), cfg));
        MetricReport mean;
        for (std::size_t i = 0; i < cubes.size(); ++i) {
          const HSImage& x = cubes[i];
          const TaskSetup setup = make_task(parse_task(task_name), x.height(), x.width(), params);
          const HSImage y = add_awgn(apply(setup.op, x), setup.sigma, seed * 1000003ULL + i);
          const auto t0 = std::chrono::steady_clock::now();
          const RestoreResult r = restore(y, setup.op, setup.sigma, wrapped, hqs_config(cfg, setup.op));
          const MetricReport m = evaluate(x, r.image, seconds_since(t0));
          mean.psnr += m.psnr;
          mean.sam += m.sam;
          mean.ssim += m.ssim;
          mean.wall_time += m.wall_time;
        }
        const double n = static_cast<double>(cubes.size());
        const fs::path tmp = sidecar(cell, ".part");
        {
          std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
          os << kCellHeader << '\n'
             << enc << '\t' << task_name << '\t' << seed << '\t' << std::setprecision(10)
             << mean.psnr / n << '\t' << mean.sam / n << '\t' << mean.ssim / n << '\t'
             << mean.wall_time / n << '\n';
          if (!os) throw Error("cannot write " + tmp.string());
        }
        fs::rename(tmp, cell);
        std::cerr << "done " << cell.filename().string() << '\n';
      }
    }
  }

  // Assemble the table from the cell files in grid order.
  std::ofstream table(out / "ablation.tsv", std::ios::binary | std::ios::trunc);
  table << kCellHeader << '\n';
  std::cout << kCellHeader << '\n';
  for (const auto& enc : encoders)
    for (const auto& task_name : tasks)
      for (std::uint64_t seed : seeds) {
        std::ifstream in(cell_path(enc, task_name, seed));
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        if (header != kCellHeader || row.empty())
          throw Error("malformed ablation cell " + cell_path(enc, task_name, seed).string());
        table << row << '\n';
        std::cout << row << '\n';
      }
  return 0;
}

int cmd_evaluate(const Common&, const EvaluateArgs& a) {
  const HSImage ref = read_hsb(a.ref);
  const HSImage est = read_hsb(a.in);
  print_metrics(std::cout, evaluate(ref, est));
  return 0;
}

}  // namespace hsadapt::cli
