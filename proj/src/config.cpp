#include "ubic/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ubic/error.hpp"
#include "ubic/random.hpp"

namespace ubic {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': cannot parse '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

}  // namespace

Denoiser parse_denoiser(const std::string& name) {
  if (name == "none") return Denoiser::None;
  if (name == "rksvd") return Denoiser::Rksvd;
  if (name == "savgol") return Denoiser::Savgol;
  if (name == "svd") return Denoiser::Svd;
  throw InvalidArgument("unknown denoiser '" + name + "' (none|rksvd|savgol|svd)");
}

std::string to_string(Denoiser denoiser) {
  switch (denoiser) {
    case Denoiser::None: return "none";
    case Denoiser::Rksvd: return "rksvd";
    case Denoiser::Savgol: return "savgol";
    case Denoiser::Svd: return "svd";
  }
  return "none";
}

int PipelineConfig::effective_weight_power() const {
  return weight_power > 0 ? weight_power : std::max(2, max_deriv);
}

void PipelineConfig::validate() const {
  if (!pde && input.empty()) throw ConfigError("either 'pde' or 'input' must be set");
  if (!input.empty() && !std::filesystem::exists(input))
    throw ConfigError("input file does not exist: " + input.string());
  if (oversample < 1) throw ConfigError("oversample must be >= 1");
  if (!(noise_percent >= 0.0)) throw ConfigError("noise_percent must be >= 0");
  if (max_power < 0 || max_deriv < 0 || max_power + max_deriv == 0)
    throw ConfigError("max_power and max_deriv must be non-negative and not both zero");
  if (n_domains == 0) throw ConfigError("n_domains must be positive");
  if (!(hx_frac > 0.0 && hx_frac < 0.5) || !(ht_frac > 0.0 && ht_frac < 0.5))
    throw ConfigError("hx_frac and ht_frac must lie in (0, 0.5)");
  if (effective_weight_power() < std::max(2, max_deriv))
    throw ConfigError("weight_power must be >= max(2, max_deriv)");
  if (!(tau0 > 0.0)) throw ConfigError("tau0 must be positive");
  if (!(tau0_percentile >= 0.0 && tau0_percentile <= 100.0) ||
      !(tau0_retry_percentile >= 0.0 && tau0_retry_percentile <= 100.0))
    throw ConfigError("percentiles must lie in [0, 100]");
  if (n_delta < 1) throw ConfigError("n_delta must be >= 1");
  if (!(subset_budget >= 1.0)) throw ConfigError("subset_budget must be >= 1");
  if (denoiser == Denoiser::Rksvd) {
    if (ksvd.patch < 2) throw ConfigError("patch must be >= 2");
    if (!(ksvd.rho >= 0.0)) throw ConfigError("rho must be >= 0");
    if (ksvd.train_sparsity < 1) throw ConfigError("train_sparsity must be >= 1");
    if (ksvd.iterations < 1) throw ConfigError("iterations must be >= 1");
  }
  if (denoiser == Denoiser::Savgol) {
    try {
      savgol.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (denoiser == Denoiser::Svd && svd_rank == 0) throw ConfigError("svd_rank must be >= 1");
}

PipelineConfig default_config(Pde pde) {
  PipelineConfig c;
  c.pde = pde;
  switch (pde) {
    case Pde::Burgers:
      c.ksvd.patch = 8;
      c.ksvd.rho = 0.05;
      c.max_power = 2;
      c.max_deriv = 2;
      break;
    case Pde::KdV:
    case Pde::KS:
      // Non-overlapping 25x25 tiles give fewer patches than atoms, which makes
      // the dictionary trivial; stride 8 overlaps them about threefold per axis.
      c.ksvd.patch = 25;
      c.ksvd.stride = 8;
      c.ksvd.rho = 0.01;
      c.max_power = 2;
      c.max_deriv = 4;
      break;
  }
  c.ksvd.train_sparsity = 1;
  return c;
}

void set_option(PipelineConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = unquote(trim(raw));
  try {
    if (key == "pde") {
      c.pde = parse_pde(v);
    } else if (key == "input") {
      c.input = v;
      if (!v.empty()) c.pde.reset();
    } else if (key == "truth") {
      c.truth = parse_pde(v);
    } else if (key == "nx") c.nx = parse_number<std::size_t>(key, v);
    else if (key == "nt") c.nt = parse_number<std::size_t>(key, v);
    else if (key == "oversample") c.oversample = parse_number<int>(key, v);
    else if (key == "noise_percent" || key == "eps") c.noise_percent = parse_number<double>(key, v);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
    else if (key == "noise_seed") c.noise_seed = parse_number<std::uint64_t>(key, v);
    else if (key == "denoiser") c.denoiser = parse_denoiser(v);
    else if (key == "patch") c.ksvd.patch = parse_number<std::size_t>(key, v);
    else if (key == "stride") c.ksvd.stride = parse_number<std::size_t>(key, v);
    else if (key == "atoms") c.ksvd.atoms = parse_number<std::size_t>(key, v);
    else if (key == "rho") c.ksvd.rho = parse_number<double>(key, v);
    else if (key == "train_sparsity") c.ksvd.train_sparsity = parse_number<std::size_t>(key, v);
    else if (key == "final_sparsity") c.ksvd.final_sparsity = parse_number<std::size_t>(key, v);
    else if (key == "iterations") c.ksvd.iterations = parse_number<int>(key, v);
    else if (key == "savgol_window") c.savgol.window_x = c.savgol.window_t = parse_number<std::size_t>(key, v);
    else if (key == "savgol_window_x") c.savgol.window_x = parse_number<std::size_t>(key, v);
    else if (key == "savgol_window_t") c.savgol.window_t = parse_number<std::size_t>(key, v);
    else if (key == "savgol_order") c.savgol.order_x = c.savgol.order_t = parse_number<int>(key, v);
    else if (key == "svd_rank") c.svd_rank = parse_number<std::size_t>(key, v);
    else if (key == "max_power") c.max_power = parse_number<int>(key, v);
    else if (key == "max_deriv") c.max_deriv = parse_number<int>(key, v);
    else if (key == "n_domains") c.n_domains = parse_number<std::size_t>(key, v);
    else if (key == "hx_frac") c.hx_frac = parse_number<double>(key, v);
    else if (key == "ht_frac") c.ht_frac = parse_number<double>(key, v);
    else if (key == "weight_power") c.weight_power = parse_number<int>(key, v);
    else if (key == "intercept") c.intercept = parse_bool(key, v);
    else if (key == "denoised_wf_alpha") c.denoised_wf_alpha = parse_number<std::size_t>(key, v);
    else if (key == "solver") c.solver = parse_solver(v);
    else if (key == "max_support") c.max_support = parse_number<std::size_t>(key, v);
    else if (key == "subset_budget") c.subset_budget = parse_number<double>(key, v);
    else if (key == "tau0_mode") {
      if (v == "fixed") c.tau0_mode = Tau0Mode::Fixed;
      else if (v == "percentile") c.tau0_mode = Tau0Mode::Percentile;
      else throw ConfigError("tau0_mode must be 'fixed' or 'percentile'");
    } else if (key == "tau0") c.tau0 = parse_number<double>(key, v);
    else if (key == "tau0_percentile") c.tau0_percentile = parse_number<double>(key, v);
    else if (key == "tau0_retry_percentile") c.tau0_retry_percentile = parse_number<double>(key, v);
    else if (key == "n_delta") c.n_delta = parse_number<int>(key, v);
    else if (key == "gamma") c.gamma = parse_number<double>(key, v);
    else if (key == "output_dir") c.output_dir = v;
    else throw ConfigError("unknown key '" + key + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

PipelineConfig parse_config(const std::string& text) {
  // The PDE key selects the per-equation defaults, so it is applied first.
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    entries.emplace_back(key, line.substr(eq + 1));
  }
  PipelineConfig config;
  for (const auto& [key, value] : entries) {
    if (key != "pde") continue;
    PipelineConfig probe;
    set_option(probe, key, value);
    config = default_config(*probe.pde);
  }
  for (const auto& [key, value] : entries) set_option(config, key, value);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::uint64_t noise_seed(const PipelineConfig& config) {
  return config.noise_seed ? *config.noise_seed : derive_seed(config.seed, "noise");
}
std::uint64_t subdomain_seed(const PipelineConfig& config) { return derive_seed(config.seed, "subdomains"); }
std::uint64_t dictionary_seed(const PipelineConfig& config) { return derive_seed(config.seed, "dictionary"); }

}  // namespace ubic
