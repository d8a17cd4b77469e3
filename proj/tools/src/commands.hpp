#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsadapt::cli {

/// Bad flags or inputs the user can fix; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Options shared by every command.
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;  ///< key=value
  std::string command_line;            ///< recorded in config echoes
};

struct PhantomArgs {
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t channels = 31;
  std::size_t rank = 3;
  std::uint64_t seed = 0;
  std::string out;
};

struct DegradeArgs {
  std::string task;
  std::string in;
  std::string out;
  std::uint64_t seed = 0;
};

struct RestoreArgs {
  std::string task;
  std::string in;
  std::string ref;
  std::string encoder;
  std::string denoiser;
  std::string out;
  std::size_t iters = 0;  ///< 0: keep config
};

struct TrainArgs {
  std::string data;
  std::size_t groups = 0;
  std::size_t latent_arity = 0;
  std::size_t steps = 0;
  bool steps_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string denoiser;
  std::string out;
};

struct AblateArgs {
  std::string data;
  std::string tasks = "denoise10,denoise20,deblur,sisr4";
  std::string seeds = "0";
  std::string encoders = "seq_mono,seq_rgb,random_rgb,pca,learned_k1,learned_k11";
  std::string out;
};

struct EvaluateArgs {
  std::string ref;
  std::string in;
};

int cmd_phantom(const Common& common, const PhantomArgs& args);
int cmd_degrade(const Common& common, const DegradeArgs& args);
int cmd_restore(const Common& common, const RestoreArgs& args);
int cmd_train(const Common& common, const TrainArgs& args);
int cmd_ablate(const Common& common, const AblateArgs& args);
int cmd_evaluate(const Common& common, const EvaluateArgs& args);

}  // namespace hsadapt::cli
