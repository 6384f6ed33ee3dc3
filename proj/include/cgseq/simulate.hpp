#pragma once

// Synthetic trading days with endogenous microstructure noise, baseline
// realized-variance estimators and the benchmark harness comparing them with
// the Bayesian estimator.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cgseq/bias.hpp"
#include "cgseq/iv_gibbs.hpp"

namespace cgseq {

struct SimDesign {
  double rho = -0.10;
  double nts = 1.5;
  double annualized_var_b1 = 0.06;
  int steps_per_day = 2340;  // T increments per day
  int n_days = 50;
  std::uint64_t seed = 1;
  double open_log_price = 4.605170185988091;  // log(100)

  void validate() const;
  /// Per-step (b1, B1t, B2t) implied by the design.
  SteadyParams per_step_params() const;
};

struct SimDay {
  std::vector<double> theta_true;  // theta(0..T)
  std::vector<double> xi;          // xi(0..T)
  double true_qv = 0;              // per-step units
  SteadyParams params_true;
};

/// theta(t+1) = theta(t) + b1 e1, xi(t+1) = theta(t+1) + B1t e1 + B2t e2 with
/// theta(0) = xi(0) = open_log_price.
SimDay simulate_day(const SimDesign& design, Rng& rng);

/// Hyperparameters offset from the truth the way the reference simulation
/// fixes them: mu_b = 1.2 b1, mu_B = 1.2 B1t, sigma2_b = b1^2,
/// sigma2_B = B1t^2 (0.01 B2t^2 when rho = 0), alpha_B = 2.1,
/// beta_B = 1.2 (alpha_B - 1) B2t^2, so the prior mean of B2t^2 is 20% high. At 23,400 steps,
/// annualized variance 0.06 and |rho| = 0.1, NTS = 1.5 this gives
/// mu_b = 1.21e-4, |mu_B| = 1.48e-5, sigma2_b = 1.02e-8, sigma2_B = 1.53e-10,
/// beta_B = 1.99e-8.
PriorHyper paper_hyperparameters(const SimDesign& design);

/// Sum of squared increments of the observed series.
double rv_naive(std::span<const double> xi);

/// Two-scale realized variance: mean of the K subsampled RVs minus
/// (nbar / n) rv_naive with n = number of increments, nbar = (n - K + 1) / K.
/// May be negative in finite samples.
double rv_two_scale(std::span<const double> xi, int K);

/// ceil(n^(2/3)) for n increments.
int default_subsamples(std::size_t n_increments);

enum class Method { LIP, RV, TSRV };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct BenchRow {
  std::string method;
  double bias = 0;
  double std = 0;
  double rmse = 0;
};

/// bias = mean error, std = population standard deviation, so that
/// rmse^2 = bias^2 + std^2.
BenchRow summarize_errors(const std::string& method, std::span<const double> errors);

struct DayRecord {
  int day = 0;
  double true_qv = 0;                    // annualized
  std::vector<double> estimates;         // annualized, one per method
  double lip_lo = 0, lip_hi = 0;         // credible interval, annualized
  double lip_acceptance = 0;
  bool tsrv_negative = false;
  double qv_gffbs = 0;                   // one G-FFBS path at the true parameters
  double qv_ffbs = 0;                    // same with the correlation ignored
};

struct BenchmarkResult {
  std::vector<Method> methods;
  std::vector<BenchRow> rows;  // one per method, annualized units
  std::vector<DayRecord> days;
};

struct BenchOptions {
  std::vector<Method> methods{Method::LIP, Method::RV, Method::TSRV};
  int k_subsamples = 0;  // 0: default_subsamples
  unsigned threads = 0;  // 0: CGSEQ_THREADS or hardware concurrency
  double level = 0.90;   // LIP credible interval
};

/// Simulates design.n_days independent days and evaluates each method against
/// the true quadratic variation. Day d uses Rng streams derived from
/// (design.seed, d), so results do not depend on the thread count.
BenchmarkResult run_benchmark(const SimDesign& design, const BenchOptions& options, const McmcConfig& mcmc);

/// Worker count from CGSEQ_THREADS, capped by `requested` when non-zero.
unsigned worker_count(unsigned requested, std::size_t jobs);

/// Runs fn(i) for i in [0, n) on worker_count(threads, n) threads and
/// rethrows the first exception after all workers finish.
void parallel_for(int n, unsigned threads, const std::function<void(int)>& fn);

}  // namespace cgseq
