#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cgseq/iv_gibbs.hpp"
#include "cgseq/simulate.hpp"

namespace cgseq {

struct ConfigError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

/// Everything a subcommand needs. Keys accepted by `set` are the long flag
/// names without the leading dashes.
struct RunConfig {
  SimDesign design;
  std::optional<double> rho;  // unset: subcommand default
  McmcConfig mcmc;

  std::optional<double> mu_B, sigma2_B, mu_b, sigma2_b, alpha_B, beta_B;

  std::vector<Method> methods{Method::LIP, Method::RV, Method::TSRV};
  int k_subsamples = 0;
  unsigned threads = 0;
  double level = 0.90;
  int grid_points = 2001;

  std::filesystem::path input;
  std::filesystem::path output;

  void set(const std::string& key, const std::string& value);
  void validate() const;

  /// Priors derived from the design at `steps` increments per day, with any
  /// explicitly set hyperparameter taking precedence.
  PriorHyper priors_for(int steps) const;

  static const std::vector<std::string>& keys();
};

/// Applies `key = value` lines; '#' starts a comment, blank lines are skipped.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

}  // namespace cgseq
