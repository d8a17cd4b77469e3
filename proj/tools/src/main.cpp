// hsadapt: command-line front end.
//
// Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or config error.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hsadapt/errors.hpp"

namespace {

std::string quoted_command_line(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    std::string arg = argv[i];
    if (i) out += ' ';
    if (arg.find_first_of(" \t'\"\\$") == std::string::npos && !arg.empty()) {
      out += arg;
      continue;
    }
    out += '\'';
    for (char ch : arg) {
      if (ch == '\'') out += "'\\''";
      else out += ch;
    }
    out += '\'';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hsadapt::cli;

  CLI::App app{"Hyperspectral restoration with lifted low-dimensional denoisers", "hsadapt"};
  app.require_subcommand(1);

  Common common;
  common.command_line = quoted_command_line(argc, argv);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "key=value run configuration")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", common.overrides, "override a config key (key=value), repeatable");
  };

  PhantomArgs phantom;
  auto* ph = app.add_subcommand("phantom", "synthesize a low-rank hyperspectral cube");
  ph->add_option("--height", phantom.height)->required();
  ph->add_option("--width", phantom.width)->required();
  ph->add_option("--channels", phantom.channels)->required();
  ph->add_option("--rank", phantom.rank)->required();
  ph->add_option("--seed", phantom.seed);
  ph->add_option("--out", phantom.out)->required();

  DegradeArgs degrade;
  auto* dg = app.add_subcommand("degrade", "apply a task's operator and noise");
  dg->add_option("--task", degrade.task, "denoise10 | denoise20 | deblur | sisr4")->required();
  dg->add_option("--in", degrade.in)->required()->check(CLI::ExistingFile);
  dg->add_option("--out", degrade.out)->required();
  dg->add_option("--seed", degrade.seed);
  add_common(dg);

  RestoreArgs restore;
  auto* rs = app.add_subcommand("restore", "plug-and-play HQS restoration");
  rs->add_option("--task", restore.task)->required();
  rs->add_option("--in", restore.in)->required()->check(CLI::ExistingFile);
  rs->add_option("--ref", restore.ref, "clean cube; enables metrics")->check(CLI::ExistingFile);
  rs->add_option("--encoder", restore.encoder, "HSM file or ablation kind");
  rs->add_option("--denoiser", restore.denoiser, "gaussian | wavelet | identity | external:<cmd>");
  rs->add_option("--iters", restore.iters, "HQS iterations (overrides config)");
  rs->add_option("--out", restore.out)->required();
  add_common(rs);

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "learn a spectral encoder");
  tr->add_option("--data", train.data, "directory of HSB patches")->required();
  tr->add_option("--K", train.groups, "group count");
  tr->add_option("--c", train.latent_arity, "latent arity (1 or 3)");
  auto* steps_opt = tr->add_option("--steps", train.steps);
  auto* seed_opt = tr->add_option("--seed", train.seed);
  tr->add_option("--denoiser", train.denoiser);
  tr->add_option("--out", train.out, "output HSM file")->required();
  add_common(tr);

  AblateArgs ablate;
  auto* ab = app.add_subcommand("ablate", "run the encoder x task x seed grid");
  ab->add_option("--data", ablate.data, "directory of clean HSB cubes")->required();
  ab->add_option("--tasks", ablate.tasks, "comma-separated tasks");
  ab->add_option("--seeds", ablate.seeds, "comma-separated seeds");
  ab->add_option("--encoders", ablate.encoders, "comma-separated encoders");
  ab->add_option("--out", ablate.out, "output directory")->required();
  add_common(ab);

  EvaluateArgs evaluate;
  auto* ev = app.add_subcommand("evaluate", "PSNR / SAM / SSIM of a cube against a reference");
  ev->add_option("--ref", evaluate.ref)->required()->check(CLI::ExistingFile);
  ev->add_option("--in", evaluate.in)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  train.steps_set = steps_opt->count() > 0;
  train.seed_set = seed_opt->count() > 0;

  try {
    if (ph->parsed()) return cmd_phantom(common, phantom);
    if (dg->parsed()) return cmd_degrade(common, degrade);
    if (rs->parsed()) return cmd_restore(common, restore);
    if (tr->parsed()) return cmd_train(common, train);
    if (ab->parsed()) return cmd_ablate(common, ablate);
    if (ev->parsed()) return cmd_evaluate(common, evaluate);
  } catch (const UsageError& e) {
    std::cerr << "hsadapt: " << e.what() << '\n';
    return 2;
  } catch (const hsadapt::ParameterError& e) {
    std::cerr << "hsadapt: " << e.what() << '\n';
    return 2;
  } catch (const hsadapt::DimensionError& e) {
    std::cerr << "hsadapt: " << e.what() << '\n';
    return 2;
  } catch (const hsadapt::ModeError& e) {
    std::cerr << "hsadapt: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hsadapt: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
