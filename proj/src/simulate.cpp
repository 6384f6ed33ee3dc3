#include "cgseq/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace cgseq {

void SimDesign::validate() const {
  if (!(std::abs(rho) < 1)) throw InvalidInputError("design: |rho| must be < 1");
  if (!(nts >= 0)) throw InvalidInputError("design: nts must be non-negative");
  if (!(annualized_var_b1 > 0)) throw InvalidInputError("design: annualized transition variance must be positive");
  if (steps_per_day < 2) throw InvalidInputError("design: need at least 2 steps per day");
  if (n_days < 1) throw InvalidInputError("design: need at least one day");
  if (!std::isfinite(open_log_price)) throw InvalidInputError("design: open log price must be finite");
}

SteadyParams SimDesign::per_step_params() const {
  const double b1 = per_step_std_from_annual_var(annualized_var_b1, steps_per_day);
  return steady_from_correlation(b1, rho, nts, Units::per_step);
}

SimDay simulate_day(const SimDesign& design, Rng& rng) {
  design.validate();
  SimDay day;
  day.params_true = design.per_step_params();
  const auto& p = day.params_true;
  const auto T = static_cast<std::size_t>(design.steps_per_day);
  day.theta_true.resize(T + 1);
  day.xi.resize(T + 1);
  day.theta_true[0] = day.xi[0] = design.open_log_price;
  for (std::size_t t = 0; t < T; ++t) {
    const double e1 = rng.normal();
    const double e2 = rng.normal();
    day.theta_true[t + 1] = day.theta_true[t] + p.b1 * e1;
    day.xi[t + 1] = day.theta_true[t + 1] + p.B1t * e1 + p.B2t * e2;
  }
  day.true_qv = quadratic_variation(day.theta_true);
  return day;
}

PriorHyper paper_hyperparameters(const SimDesign& design) {
  const auto p = design.per_step_params();
  PriorHyper h;
  h.mu_b = 1.2 * p.b1;
  h.sigma2_b = p.b1 * p.b1;
  h.mu_B = 1.2 * p.B1t;
  h.sigma2_B = p.B1t != 0 ? p.B1t * p.B1t : 0.01 * std::max(p.B2t * p.B2t, 1e-4 * p.b1 * p.b1);
  h.alpha_B = 2.1;
  // Floor keeps the inverse-gamma prior proper for a noise-free design.
  h.beta_B = 1.2 * (h.alpha_B - 1) * std::max(p.B2t * p.B2t, 1e-4 * p.b1 * p.b1);
  return h;
}

double rv_naive(std::span<const double> xi) {
  if (xi.size() < 2) throw InvalidInputError("rv_naive: need at least two observations");
  return quadratic_variation(xi);
}

double rv_two_scale(std::span<const double> xi, int K) {
  if (xi.size() < 2) throw InvalidInputError("rv_two_scale: need at least two observations");
  const auto n = static_cast<long>(xi.size()) - 1;
  if (K < 1 || K >= n) throw InvalidInputError("rv_two_scale: K must satisfy 1 <= K < T");
  double sub = 0;
  for (long start = 0; start < K; ++start) {
    for (long j = start + K; j <= n; j += K) {
      const double d = xi[static_cast<std::size_t>(j)] - xi[static_cast<std::size_t>(j - K)];
      sub += d * d;
    }
  }
  sub /= K;
  const double nbar = static_cast<double>(n - K + 1) / K;
  return sub - nbar / static_cast<double>(n) * rv_naive(xi);
}

int default_subsamples(std::size_t n_increments) {
  return static_cast<int>(std::ceil(std::pow(static_cast<double>(n_increments), 2.0 / 3.0) - 1e-9));
}

std::string to_string(Method m) {
  switch (m) {
    case Method::LIP: return "LIP";
    case Method::RV: return "RV";
    case Method::TSRV: return "TSRV";
  }
  return "unknown";
}

Method method_from_string(const std::string& s) {
  if (s == "LIP" || s == "lip") return Method::LIP;
  if (s == "RV" || s == "rv") return Method::RV;
  if (s == "TSRV" || s == "tsrv") return Method::TSRV;
  throw InvalidInputError("unknown method '" + s + "' (expected LIP, RV or TSRV)");
}

BenchRow summarize_errors(const std::string& method, std::span<const double> errors) {
  if (errors.empty()) throw InvalidInputError("summarize_errors: no errors to summarize");
  const double n = static_cast<double>(errors.size());
  const double bias = std::accumulate(errors.begin(), errors.end(), 0.0) / n;
  double ss = 0;
  for (double e : errors) ss += (e - bias) * (e - bias);
  const double sd = std::sqrt(ss / n);
  return {method, bias, sd, std::sqrt(bias * bias + sd * sd)};
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CGSEQ_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  if (requested > 0) n = std::min(n, requested);
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

void parallel_for(int n, unsigned threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_workers = worker_count(threads, static_cast<std::size_t>(n));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

DayRecord evaluate_day(int d, const SimDesign& design, const PriorHyper& priors, const BenchOptions& options,
                       const McmcConfig& mcmc) {
  Rng sim_rng = Rng::derive(design.seed, 3 * static_cast<std::uint64_t>(d));
  Rng mcmc_rng = Rng::derive(design.seed, 3 * static_cast<std::uint64_t>(d) + 1);
  Rng fig_rng = Rng::derive(design.seed, 3 * static_cast<std::uint64_t>(d) + 2);

  const SimDay day = simulate_day(design, sim_rng);
  const double annual = kTradingDaysPerYear;
  const std::size_t n = day.xi.size() - 1;
  const int K = options.k_subsamples > 0 ? options.k_subsamples : default_subsamples(n);

  DayRecord rec;
  rec.day = d;
  rec.true_qv = annual * day.true_qv;
  for (Method m : options.methods) {
    double est = 0;
    switch (m) {
      case Method::LIP: {
        McmcConfig cfg = mcmc;
        const auto post = run_gibbs(day.xi, priors, cfg, mcmc_rng);
        const auto s = iv_point_and_interval(post, options.level);
        est = s.estimate;
        rec.lip_lo = annual * s.lo;
        rec.lip_hi = annual * s.hi;
        rec.lip_acceptance = post.acceptance_rate_b1;
        break;
      }
      case Method::RV:
        est = rv_naive(day.xi);
        break;
      case Method::TSRV:
        est = rv_two_scale(day.xi, K);
        rec.tsrv_negative = est < 0;
        break;
    }
    rec.estimates.push_back(annual * est);
  }

  // One path each from G-FFBS and from the sampler that ignores correlation,
  // both at the true parameters.
  ChainState truth;
  truth.b1 = {day.params_true.b1};
  truth.B1t = {day.params_true.B1t};
  truth.B2sq = {day.params_true.B2t * day.params_true.B2t};
  truth.theta = day.theta_true;
  rec.qv_gffbs = annual * quadratic_variation(sample_theta(truth, day.xi, fig_rng));
  ChainState naive = truth;
  naive.B1t = {0.0};
  rec.qv_ffbs = annual * quadratic_variation(sample_theta(naive, day.xi, fig_rng));
  return rec;
}

}  // namespace

BenchmarkResult run_benchmark(const SimDesign& design, const BenchOptions& options, const McmcConfig& mcmc) {
  design.validate();
  mcmc.validate();
  if (options.methods.empty()) throw InvalidInputError("benchmark: no methods selected");
  const PriorHyper priors = paper_hyperparameters(design);

  BenchmarkResult result;
  result.methods = options.methods;
  result.days.resize(static_cast<std::size_t>(design.n_days));

  parallel_for(design.n_days, options.threads, [&](int d) {
    result.days[static_cast<std::size_t>(d)] = evaluate_day(d, design, priors, options, mcmc);
  });

  for (std::size_t j = 0; j < options.methods.size(); ++j) {
    std::vector<double> errors;
    errors.reserve(result.days.size());
    for (const auto& rec : result.days) errors.push_back(rec.estimates[j] - rec.true_qv);
    result.rows.push_back(summarize_errors(to_string(options.methods[j]), errors));
  }
  return result;
}

}  // namespace cgseq
