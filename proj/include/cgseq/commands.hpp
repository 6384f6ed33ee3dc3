#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cgseq/config.hpp"

namespace cgseq {

inline constexpr const char* kVarianceUnits =
    "units: variances annualized (daily integrated variance x 252; computed per-step internally)";
inline constexpr const char* kLoadingUnits =
    "units: noise loadings annualized as standard deviations (per-step x sqrt(252 x steps per day))";

/// Writes `output` (ticks) and `<stem>_truth<ext>` (true quadratic variation
/// and parameters per day). Day d is simulated from the same random stream as
/// day d of the benchmark.
int cmd_simulate(const RunConfig& cfg, std::ostream& log);

/// Posterior summary `day,iv_mean,iv_lo,iv_hi,accept_rate` per input day.
int cmd_estimate(const RunConfig& cfg, std::ostream& log);

/// Table `method,bias,std,rmse` to `output`, per-day plot data to
/// `<stem>_days<ext>`.
int cmd_benchmark(const RunConfig& cfg, std::ostream& log);

/// Bias-region table `B1_tilde,lhs,rhs,sign` on a grid over
/// [-b1 sqrt(nts), b1 sqrt(nts)] with B2t fixed by the reference rho.
int cmd_biasmap(const RunConfig& cfg, std::ostream& log);

/// `dir/stem + suffix + ext` for a file path.
std::filesystem::path sibling_path(const std::filesystem::path& path, const std::string& suffix);

}  // namespace cgseq
