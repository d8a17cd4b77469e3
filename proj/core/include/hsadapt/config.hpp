#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace hsadapt {

/// key=value run configuration. One entry per line, '#' starts a comment, blank
/// lines ignored, surrounding whitespace trimmed. Every key has a default; unknown
/// keys are rejected with ParameterError. Values are stored as text and converted
/// on access.
class RunConfig {
 public:
  RunConfig();

  /// Keys and default values in a fixed order.
  static const std::vector<std::pair<std::string, std::string>>& defaults();
  static bool known(std::string_view key);

  void load(const std::filesystem::path& path);
  void parse(std::string_view text, std::string_view origin = "<string>");
  void set(std::string_view key, std::string_view value);

  const std::string& get(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_double_list(std::string_view key) const;
  /// Comma-separated list of words.
  std::vector<std::string> get_list(std::string_view key) const;

  /// Effective configuration, every key, in defaults() order; reloadable with load().
  void write_echo(std::ostream& os) const;
  void write_echo(const std::filesystem::path& path) const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace hsadapt
