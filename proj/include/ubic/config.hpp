#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ubic/datagen.hpp"
#include "ubic/denoise.hpp"
#include "ubic/subset.hpp"

namespace ubic {

enum class Denoiser { None, Rksvd, Savgol, Svd };
Denoiser parse_denoiser(const std::string& name);
std::string to_string(Denoiser denoiser);

enum class Tau0Mode { Fixed, Percentile };

/// Everything one end-to-end run needs. Loaded from a flat `key = value`
/// file; `#` starts a comment. Keys are the field names below.
struct PipelineConfig {
  // data: either a generated PDE or an existing field file
  std::optional<Pde> pde = Pde::Burgers;
  std::filesystem::path input;
  std::optional<Pde> truth;  // equation scored against; defaults to `pde`
  std::size_t nx = 0;  // 0: the PDE's default grid
  std::size_t nt = 0;
  int oversample = 1;

  double noise_percent = 30.0;
  std::uint64_t seed = 0;                   // root of every sub-seed
  std::optional<std::uint64_t> noise_seed;  // overrides the derived noise seed

  Denoiser denoiser = Denoiser::Rksvd;
  KsvdOptions ksvd{};
  SavgolSpec savgol{};
  std::size_t svd_rank = 10;

  int max_power = 2;
  int max_deriv = 2;
  std::size_t n_domains = 500;
  double hx_frac = 0.1;
  double ht_frac = 0.1;
  int weight_power = 0;  // 0: max(2, max_deriv)
  bool intercept = false;
  std::size_t denoised_wf_alpha = 0;  // > 1: refit the chosen support on a smoothed weak library

  Solver solver = Solver::Exhaustive;
  std::size_t max_support = 0;  // 0: every column
  double subset_budget = kDefaultSubsetBudget;

  Tau0Mode tau0_mode = Tau0Mode::Fixed;
  double tau0 = 0.02;
  double tau0_percentile = 75.0;
  double tau0_retry_percentile = 80.0;  // used once if the overfit warning fires
  int n_delta = 3;
  double gamma = 0.0;  // <= 0: log(N_omega)

  std::filesystem::path output_dir;  // empty: write nothing

  int effective_weight_power() const;
  std::optional<Pde> truth_pde() const { return truth ? truth : pde; }
  void validate() const;
};

/// Defaults for the named PDE: denoiser patch sizes, library order and the
/// subdomain count used by the end-to-end runs.
PipelineConfig default_config(Pde pde);

/// Applies one `key = value` assignment. Throws ConfigError on unknown keys.
void set_option(PipelineConfig& config, const std::string& key, const std::string& value);

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Sub-seeds for the random stages, derived from the root seed.
std::uint64_t noise_seed(const PipelineConfig& config);
std::uint64_t subdomain_seed(const PipelineConfig& config);
std::uint64_t dictionary_seed(const PipelineConfig& config);

}  // namespace ubic
