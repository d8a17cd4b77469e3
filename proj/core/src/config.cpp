#include "hsadapt/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hsadapt/errors.hpp"

namespace hsadapt {

const std::vector<std::pair<std::string, std::string>>& RunConfig::defaults() {
  static const std::vector<std::pair<std::string, std::string>> table{
      {"task", "denoise10"},
      {"seed", "0"},
      {"blur_std", "2.0"},
      {"blur_support", "9"},
      {"sr_factor", "4"},
      {"sr_kernel_std", "1.6"},
      {"sr_kernel_support", "13"},
      {"hqs_iters", "0"},
      {"hqs_sigma_start", "0.2"},
      {"hqs_sigma_end", "0"},
      {"hqs_lambda", "0.23"},
      {"inner_solver", "fft_closed_form"},
      {"cg_tol", "1e-6"},
      {"cg_max_iter", "200"},
      {"encoder", "seq_rgb"},
      {"pca_groups", "0"},
      {"pca_latent_arity", "3"},
      {"denoiser", "gaussian"},
      {"gaussian_width_scale", "10"},
      {"gaussian_chroma_scale", "2"},
      {"wavelet_threshold_scale", "3"},
      {"wavelet_levels", "3"},
      {"external_timeout_s", "600"},
      {"external_workdir", ""},
      {"train_steps", "200"},
      {"train_batch", "4"},
      {"train_lr", "0.01"},
      {"train_sigma_set", "0.05,0.10,0.15,0.20"},
      {"train_estimator", "spsa"},
      {"spsa_perturbations", "8"},
      {"spsa_delta", "1e-3"},
      {"groups", "11"},
      {"latent_arity", "3"},
      {"input", ""},
      {"output", ""},
      {"reference", ""},
  };
  return table;
}

bool RunConfig::known(std::string_view key) {
  const auto& d = defaults();
  return std::any_of(d.begin(), d.end(), [&](const auto& kv) { return kv.first == key; });
}

RunConfig::RunConfig() {
  for (const auto& [k, v] : defaults()) values_.emplace(k, v);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ParameterError("config key '" + std::string(key) + "': cannot parse '" +
                         std::string(text) + "' as a number");
  return value;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ParameterError("unknown config key '" + std::string(key) + "'");
  it->second = std::string(trim(value));
}

void RunConfig::parse(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParameterError(std::string(origin) + ":" + std::to_string(line_no) +
                           ": expected key=value");
    const auto key = trim(line.substr(0, eq));
    if (!known(key))
      throw ParameterError(std::string(origin) + ":" + std::to_string(line_no) +
                           ": unknown config key '" + std::string(key) + "'");
    set(key, line.substr(eq + 1));
  }
}

void RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  parse(buf.str(), path.string());
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ParameterError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

double RunConfig::get_double(std::string_view key) const { return parse_number<double>(key, get(key)); }

std::size_t RunConfig::get_size(std::string_view key) const {
  return parse_number<std::size_t>(key, get(key));
}

std::uint64_t RunConfig::get_u64(std::string_view key) const {
  return parse_number<std::uint64_t>(key, get(key));
}

bool RunConfig::get_bool(std::string_view key) const {
  const auto& v = get(key);
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ParameterError("config key '" + std::string(key) + "': expected a boolean, got '" + v + "'");
}

std::vector<std::string> RunConfig::get_list(std::string_view key) const {
  std::vector<std::string> out;
  std::string_view rest = get(key);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return out;
}

std::vector<double> RunConfig::get_double_list(std::string_view key) const {
  std::vector<double> out;
  for (const auto& item : get_list(key)) out.push_back(parse_number<double>(key, item));
  return out;
}

void RunConfig::write_echo(std::ostream& os) const {
  os << "# effective configuration\n";
  for (const auto& [k, unused] : defaults()) os << k << " = " << values_.find(k)->second << '\n';
}

void RunConfig::write_echo(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write config echo " + path.string());
  write_echo(out);
}

}  // namespace hsadapt
