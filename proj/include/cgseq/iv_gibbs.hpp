#pragma once

// Bayesian integrated-variance estimator for prices observed with noise that
// is correlated with the latent returns:
//
//   theta(t+1) = theta(t) + b1 e1(t+1)
//   xi(t+1)    = theta(t+1) + B1t e1(t+1) + B2t e2(t+1)
//
// Priors: B1t ~ N(mu_B, sigma2_B), b1 ~ N(mu_b, sigma2_b),
// B2t^2 ~ InvGamma(alpha_B, beta_B). One Gibbs sweep draws theta | rest by
// G-FFBS, B1t and B2t^2 from their conjugate conditionals, and b1 by a
// Hamiltonian step. The estimate is the posterior mean of sum (dtheta)^2.
//
// All quantities are per-step (natural) units. A day is the observation
// vector xi(0..T); theta(0) is anchored at xi(0) unless configured otherwise.

#include <cstdint>
#include <span>
#include <vector>

#include "cgseq/types.hpp"

namespace cgseq {

struct PriorHyper {
  double mu_B = 0;
  double sigma2_B = 1;
  double mu_b = 1;
  double sigma2_b = 1;
  double alpha_B = 2;
  double beta_B = 1;

  void validate() const;
  double B2sq_prior_mean() const { return beta_B / (alpha_B - 1); }
};

enum class ParamSharing { shared, per_step };

/// Potential used by the b1 Hamiltonian step. `full` is the negative log of
/// the b1 full conditional (prior, measurement term and transition density);
/// `as_printed` drops the transition density.
enum class B1Potential { full, as_printed };

struct McmcConfig {
  int iterations = 1000;  // M
  int burn_in = 500;      // M0 < M
  double hmc_epsilon = 1e-6;
  int hmc_leapfrog = 10;
  bool auto_epsilon = true;      // initialize from curvature, adapt during pilot
  int pilot_iterations = 100;    // capped at burn_in
  double epsilon_jitter = 0.2;   // eps drawn uniformly in eps * [1 - j, 1 + j]
  std::uint64_t seed = 1;
  double b1_floor = 1e-8;
  ParamSharing sharing = ParamSharing::shared;
  B1Potential b1_potential = B1Potential::full;
  bool keep_paths = false;
  double init_jitter = 0;        // relative lognormal jitter on initial parameters
  double init_gamma = 0;         // gamma(0); theta(0) ~ N(xi(0), init_gamma)

  void validate() const;
};

struct ChainState {
  std::vector<double> theta;  // theta(0..T)
  std::vector<double> B1t;    // size 1 (shared) or T
  std::vector<double> B2sq;
  std::vector<double> b1;

  std::size_t steps() const { return theta.empty() ? 0 : theta.size() - 1; }
  bool shared() const { return b1.size() == 1; }
  std::size_t param_index(std::size_t t) const { return shared() ? 0 : t; }

  void validate(double b1_floor) const;
};

struct IvPosterior {
  std::vector<double> iv_trace;  // quadratic variation of every iteration
  std::vector<double> iv_draws;  // retained iterations (i > M0)
  std::vector<double> b1_trace;  // parameter traces (mean over t in per-step mode)
  std::vector<double> B1t_trace;
  std::vector<double> B2sq_trace;
  std::vector<std::vector<double>> paths;  // retained theta paths when requested
  double acceptance_rate_b1 = 0;
  std::size_t nonfinite_energy = 0;
  double final_epsilon = 0;
};

struct IvSummary {
  double estimate;
  double lo;
  double hi;
};

/// Sum of squared increments of a path.
double quadratic_variation(std::span<const double> path);

/// Parameters at prior means, theta at the filtered means of one forward pass.
ChainState initial_state(std::span<const double> xi, const PriorHyper& priors, const McmcConfig& config,
                         Rng& rng);

/// Step (a): theta(0..T) | xi, parameters by G-FFBS.
std::vector<double> sample_theta(const ChainState& state, std::span<const double> xi, Rng& rng,
                                 double init_gamma = 0);

/// Step (b): B1t | theta, xi, B2sq, b1 (Gaussian conjugate update).
std::vector<double> sample_B1(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                              Rng& rng);

/// Step (c): B2t^2 | theta, xi, B1t, b1 (inverse-gamma conjugate update).
std::vector<double> sample_B2sq(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                                Rng& rng);

namespace hmc {

/// Potential energy of one b1 block written in sufficient statistics of the
/// steps it covers: y = xi(t+1) - theta(t+1), d = theta(t+1) - theta(t),
/// syy = sum y^2, syd = sum y d, sdd = sum d^2, n = number of steps.
struct B1Target {
  double mu_b = 0;
  double sigma2_b = 1;
  double B1t = 0;
  double B2sq = 1;
  double syy = 0;
  double syd = 0;
  double sdd = 0;
  double n = 0;
  bool transition_term = true;

  double potential(double b1) const;
  double gradient(double b1) const;
  double curvature(double b1) const;
};

struct Trajectory {
  double position;
  double momentum;
};

/// L leapfrog steps: half momentum step, L - 1 alternating full steps, final
/// full position step and half momentum step.
Trajectory leapfrog(const B1Target& target, double position, double momentum, double epsilon, int steps);

/// min(1, exp(U - U* + Z - Z*)) with Z = p^2 / 2.
double acceptance_probability(const B1Target& target, double position, double momentum,
                              const Trajectory& proposal);

}  // namespace hmc

struct HmcStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::size_t nonfinite = 0;
};

/// Sufficient-statistic targets for every b1 block of the state.
std::vector<hmc::B1Target> b1_targets(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                                      B1Potential potential);

/// Step (d): Hamiltonian update of b1. Proposals with |b1*| < b1_floor or a
/// non-finite energy are rejected.
std::vector<double> hmc_step_b1(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                                const McmcConfig& config, double epsilon, Rng& rng, HmcStats& stats);

/// Starting step size 0.5 / sqrt(U'') averaged over blocks.
double initial_epsilon(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                       const McmcConfig& config);

/// Steps (a)-(d) once, in order.
void gibbs_sweep(ChainState& state, std::span<const double> xi, const PriorHyper& priors, const McmcConfig& config,
                 double epsilon, Rng& rng, HmcStats& stats);

/// Full chain of config.iterations sweeps on one day. Requires at least two
/// observations.
IvPosterior run_gibbs(std::span<const double> xi, const PriorHyper& priors, const McmcConfig& config, Rng& rng);

/// Posterior mean of the retained draws and the equal-tailed interval at
/// `level` (linear-interpolation quantiles).
IvSummary iv_point_and_interval(const IvPosterior& post, double level);

/// Quantile with linear interpolation between order statistics (R type 7).
double quantile_sorted(std::span<const double> sorted, double p);

}  // namespace cgseq
