#include <atomic>
#include <cerrno>
#include <charconv>
#include <csignal>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "hsadapt/denoisers.hpp"
#include "hsadapt/io.hpp"

namespace hsadapt {
namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'')
      out += "'\\''";
    else
      out += ch;
  }
  out += "'";
  return out;
}

std::string decimal(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos;
       pos = text.find(key, pos + value.size()))
    text.replace(pos, key.size(), value);
  return text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t kMax = 16 * 1024;
  if (text.size() > kMax) text = "..." + text.substr(text.size() - kMax);
  return text;
}

struct ChildResult {
  bool timed_out = false;
  bool exited = false;
  int exit_code = -1;
  int signal = 0;
};

ChildResult run_shell(const std::string& command, const std::filesystem::path& stderr_path,
                      std::chrono::milliseconds timeout) {
  const pid_t pid = ::fork();
  if (pid < 0) throw BridgeError(std::string("fork failed: ") + std::strerror(errno), -1, "");
  if (pid == 0) {
    ::setpgid(0, 0);
    const int devnull = ::open("/dev/null", O_RDWR);
    if (devnull >= 0) {
      ::dup2(devnull, STDIN_FILENO);
      ::dup2(devnull, STDOUT_FILENO);
    }
    const int err = ::open(stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (err >= 0) ::dup2(err, STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  ChildResult result;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto pause = std::chrono::microseconds(200);
  for (;;) {
    int status = 0;
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      if (WIFEXITED(status)) {
        result.exited = true;
        result.exit_code = WEXITSTATUS(status);
      } else if (WIFSIGNALED(status)) {
        result.signal = WTERMSIG(status);
      }
      return result;
    }
    if (done < 0 && errno != EINTR)
      throw BridgeError(std::string("waitpid failed: ") + std::strerror(errno), -1, "");
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      result.timed_out = true;
      return result;
    }
    std::this_thread::sleep_for(pause);
    pause = std::min<std::chrono::microseconds>(pause * 2, std::chrono::milliseconds(20));
  }
}

class ExternalDenoiser final : public Denoiser {
 public:
  explicit ExternalDenoiser(ExternalDenoiserOptions options)
      : Denoiser(DenoiserKind::external, options.arity, options.unique_call_dirs),
        options_(std::move(options)) {
    for (const char* key : {"{input}", "{output}", "{sigma}"})
      if (options_.command_template.find(key) == std::string::npos)
        throw ParameterError(std::string("external denoiser command lacks placeholder ") + key);
    if (options_.workdir.empty())
      options_.workdir = std::filesystem::temp_directory_path() / "hsadapt-bridge";
    std::filesystem::create_directories(options_.workdir);
  }

 protected:
  LatentImage run(const LatentImage& z, double sigma) const override {
    if (options_.unique_call_dirs) {
      const auto dir = options_.workdir / ("call-" + std::to_string(::getpid()) + "-" +
                                           std::to_string(counter_++));
      std::filesystem::create_directories(dir);
      struct Cleanup {
        std::filesystem::path dir;
        ~Cleanup() {
          std::error_code ec;
          std::filesystem::remove_all(dir, ec);
        }
      } cleanup{dir};
      return call(z, sigma, dir);
    }
    std::lock_guard lock(mutex_);
    return call(z, sigma, options_.workdir);
  }

 private:
  LatentImage call(const LatentImage& z, double sigma, const std::filesystem::path& dir) const {
    const auto input = dir / "latent_in.hsb";
    const auto output = dir / "latent_out.hsb";
    const auto errlog = dir / "stderr.txt";
    std::error_code ec;
    std::filesystem::remove(output, ec);
    write_hsb(z, input);

    std::string command = options_.command_template;
    command = substitute(command, "{input}", shell_quote(input.string()));
    command = substitute(command, "{output}", shell_quote(output.string()));
    command = substitute(command, "{sigma}", decimal(sigma));

    const ChildResult child = run_shell(command, errlog, options_.timeout);
    const std::string diagnostics = read_text(errlog);
    if (child.timed_out)
      throw BridgeError("external denoiser timed out after " +
                            std::to_string(options_.timeout.count()) + " ms",
                        -1, diagnostics);
    if (!child.exited)
      throw BridgeError("external denoiser killed by signal " + std::to_string(child.signal), -1,
                        diagnostics);
    if (child.exit_code != 0)
      throw BridgeError("external denoiser exited with code " + std::to_string(child.exit_code),
                        child.exit_code, diagnostics);
    if (!std::filesystem::exists(output))
      throw BridgeError("external denoiser produced no output file", 0, diagnostics);

    LatentImage result = [&] {
      try {
        return read_hsb<LatentImage>(output);
      } catch (const Error& e) {
        throw BridgeError(std::string("external denoiser output is ill-formed: ") + e.what(), 0,
                          diagnostics);
      }
    }();
    if (!(result.shape() == z.shape()))
      throw BridgeError("external denoiser output shape " + to_string(result.shape()) +
                            " differs from input " + to_string(z.shape()),
                        0, diagnostics);
    return result;
  }

  ExternalDenoiserOptions options_;
  mutable std::mutex mutex_;
  mutable std::atomic<std::uint64_t> counter_{0};
};

}  // namespace

DenoiserHandle external_denoiser(ExternalDenoiserOptions options) {
  return std::make_shared<ExternalDenoiser>(std::move(options));
}

}  // namespace hsadapt
