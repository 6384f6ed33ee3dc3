#include "cgseq/iv_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cgseq/scalar_system.hpp"

namespace cgseq {

void PriorHyper::validate() const {
  if (!(sigma2_B > 0)) throw InvalidInputError("prior: sigma2_B must be positive");
  if (!(sigma2_b > 0)) throw InvalidInputError("prior: sigma2_b must be positive");
  if (!(alpha_B > 1)) throw InvalidInputError("prior: alpha_B must exceed 1");
  if (!(beta_B > 0)) throw InvalidInputError("prior: beta_B must be positive");
  if (!std::isfinite(mu_B) || !std::isfinite(mu_b)) throw InvalidInputError("prior: non-finite mean");
}

void McmcConfig::validate() const {
  if (iterations < 1) throw InvalidInputError("mcmc: iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw InvalidInputError("mcmc: burn-in must satisfy 0 <= M0 < M");
  if (!(hmc_epsilon > 0)) throw InvalidInputError("mcmc: hmc epsilon must be positive");
  if (hmc_leapfrog < 1) throw InvalidInputError("mcmc: leapfrog steps must be >= 1");
  if (!(b1_floor > 0)) throw InvalidInputError("mcmc: b1 floor must be positive");
  if (!(epsilon_jitter >= 0 && epsilon_jitter < 1)) throw InvalidInputError("mcmc: epsilon jitter must be in [0, 1)");
  if (!(init_jitter >= 0)) throw InvalidInputError("mcmc: init jitter must be non-negative");
  if (!(init_gamma >= 0)) throw InvalidInputError("mcmc: init gamma must be non-negative");
}

void ChainState::validate(double b1_floor) const {
  for (double v : B2sq)
    if (!(v > 0)) throw InvalidInputError("chain state: B2sq must be positive");
  for (double v : b1)
    if (!(std::abs(v) >= b1_floor)) throw InvalidInputError("chain state: |b1| below floor");
  if (B1t.size() != b1.size() || B2sq.size() != b1.size()) throw DimensionMismatch("chain state: parameter sizes differ");
  if (!shared() && b1.size() != steps()) throw DimensionMismatch("chain state: per-step parameters need T entries");
}

double quadratic_variation(std::span<const double> path) {
  double s = 0;
  for (std::size_t t = 1; t < path.size(); ++t) {
    const double d = path[t] - path[t - 1];
    s += d * d;
  }
  return s;
}

namespace {

std::vector<ScalarSystem<double>> systems_of(const ChainState& s) {
  std::vector<ScalarSystem<double>> out(s.b1.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = ScalarSystem<double>::unit_root(s.b1[i], s.B1t[i], std::sqrt(s.B2sq[i]));
  return out;
}

void check_day(std::span<const double> xi) {
  if (xi.size() < 2) throw InvalidInputError("day needs at least two observations");
  for (double v : xi)
    if (!std::isfinite(v)) throw InvalidInputError("day contains a non-finite observation");
}

}  // namespace

ChainState initial_state(std::span<const double> xi, const PriorHyper& priors, const McmcConfig& config, Rng& rng) {
  check_day(xi);
  priors.validate();
  const std::size_t T = xi.size() - 1;
  const std::size_t n = config.sharing == ParamSharing::shared ? 1 : T;

  auto jitter = [&](double v) {
    return config.init_jitter > 0 ? v * std::exp(config.init_jitter * rng.normal()) : v;
  };

  ChainState s;
  s.B1t.assign(n, priors.mu_B);
  s.B2sq.assign(n, priors.B2sq_prior_mean());
  s.b1.assign(n, priors.mu_b);
  for (std::size_t i = 0; i < n; ++i) {
    s.B1t[i] = jitter(s.B1t[i]);
    s.B2sq[i] = jitter(s.B2sq[i]);
    s.b1[i] = jitter(s.b1[i]);
    if (std::abs(s.b1[i]) < config.b1_floor) s.b1[i] = std::copysign(config.b1_floor, s.b1[i] == 0 ? 1.0 : s.b1[i]);
  }

  const auto sys = systems_of(s);
  ScalarBelief<double> b{xi[0], config.init_gamma};
  s.theta.resize(T + 1);
  s.theta[0] = b.m;
  for (std::size_t t = 0; t < T; ++t) {
    b = scalar_filter_step(b, sys[sys.size() == 1 ? 0 : t], xi[t + 1]);
    s.theta[t + 1] = b.m;
  }
  return s;
}

std::vector<double> sample_theta(const ChainState& state, std::span<const double> xi, Rng& rng, double init_gamma) {
  check_day(xi);
  const std::vector<double> obs(xi.begin() + 1, xi.end());
  std::vector<ScalarBelief<double>> beliefs;
  std::vector<double> path;
  scalar_sample_path(systems_of(state), obs, ScalarBelief<double>{xi[0], init_gamma}, rng, beliefs, path);
  return path;
}

std::vector<double> sample_B1(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                              Rng& rng) {
  const std::size_t T = state.steps();
  const std::size_t n = state.b1.size();
  // Per block: likelihood sum_t N(y_t; B1t x_t, B2sq) with x = dtheta / b1.
  std::vector<double> sxx(n, 0.0), sxy(n, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t i = state.param_index(t);
    const double x = (state.theta[t + 1] - state.theta[t]) / state.b1[i];
    const double y = xi[t + 1] - state.theta[t + 1];
    sxx[i] += x * x;
    sxy[i] += x * y;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(state.B2sq[i] > 0)) throw InvalidInputError("sample_B1: B2sq must be positive");
    const double ratio = priors.sigma2_B / state.B2sq[i];
    const double denom = 1 + ratio * sxx[i];
    const double mean = (priors.mu_B + ratio * sxy[i]) / denom;
    const double var = priors.sigma2_B / denom;
    out[i] = mean + std::sqrt(var) * rng.normal();
  }
  return out;
}

std::vector<double> sample_B2sq(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                                Rng& rng) {
  const std::size_t T = state.steps();
  const std::size_t n = state.b1.size();
  std::vector<double> ss(n, 0.0), count(n, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t i = state.param_index(t);
    const double r = xi[t + 1] - state.theta[t + 1] - state.B1t[i] / state.b1[i] * (state.theta[t + 1] - state.theta[t]);
    ss[i] += r * r;
    count[i] += 1;
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = rng.inverse_gamma(priors.alpha_B + 0.5 * count[i], priors.beta_B + 0.5 * ss[i]);
  return out;
}

namespace hmc {

double B1Target::potential(double b1) const {
  const double c = B1t / b1;
  const double prior = (b1 - mu_b) * (b1 - mu_b) / (2 * sigma2_b);
  const double measurement = (syy - 2 * c * syd + c * c * sdd) / (2 * B2sq);
  double u = prior + measurement;
  if (transition_term) u += n * std::log(std::abs(b1)) + sdd / (2 * b1 * b1);
  return u;
}

double B1Target::gradient(double b1) const {
  const double b2 = b1 * b1;
  const double b3 = b2 * b1;
  // d/db1 of the measurement term: (1/B2sq) sum r_t (B1t / b1^2) d_t.
  double g = (b1 - mu_b) / sigma2_b + (B1t * syd / b2 - B1t * B1t * sdd / b3) / B2sq;
  if (transition_term) g += n / b1 - sdd / b3;
  return g;
}

double B1Target::curvature(double b1) const {
  const double b2 = b1 * b1;
  const double b3 = b2 * b1;
  const double b4 = b2 * b2;
  double h = 1 / sigma2_b + (-2 * B1t * syd / b3 + 3 * B1t * B1t * sdd / b4) / B2sq;
  if (transition_term) h += -n / b2 + 3 * sdd / b4;
  return h;
}

Trajectory leapfrog(const B1Target& target, double position, double momentum, double epsilon, int steps) {
  double k = position;
  double p = momentum - 0.5 * epsilon * target.gradient(k);
  for (int i = 1; i < steps; ++i) {
    k += epsilon * p;
    p -= epsilon * target.gradient(k);
  }
  k += epsilon * p;
  p -= 0.5 * epsilon * target.gradient(k);
  return {k, p};
}

double acceptance_probability(const B1Target& target, double position, double momentum, const Trajectory& proposal) {
  const double current = target.potential(position) + 0.5 * momentum * momentum;
  const double proposed = target.potential(proposal.position) + 0.5 * proposal.momentum * proposal.momentum;
  const double log_ratio = current - proposed;
  if (!std::isfinite(log_ratio)) return 0.0;
  return log_ratio >= 0 ? 1.0 : std::exp(log_ratio);
}

}  // namespace hmc

std::vector<hmc::B1Target> b1_targets(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                                      B1Potential potential) {
  const std::size_t n = state.b1.size();
  std::vector<hmc::B1Target> targets(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& tg = targets[i];
    tg.mu_b = priors.mu_b;
    tg.sigma2_b = priors.sigma2_b;
    tg.B1t = state.B1t[i];
    tg.B2sq = state.B2sq[i];
    tg.transition_term = potential == B1Potential::full;
  }
  for (std::size_t t = 0; t < state.steps(); ++t) {
    auto& tg = targets[state.param_index(t)];
    const double y = xi[t + 1] - state.theta[t + 1];
    const double d = state.theta[t + 1] - state.theta[t];
    tg.syy += y * y;
    tg.syd += y * d;
    tg.sdd += d * d;
    tg.n += 1;
  }
  return targets;
}

std::vector<double> hmc_step_b1(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                                const McmcConfig& config, double epsilon, Rng& rng, HmcStats& stats) {
  const auto targets = b1_targets(state, xi, priors, config.b1_potential);
  std::vector<double> out = state.b1;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double eps = config.epsilon_jitter > 0
                           ? epsilon * (1 + config.epsilon_jitter * (2 * rng.uniform() - 1))
                           : epsilon;
    const double p0 = rng.normal();
    const double u = rng.uniform();
    const auto prop = hmc::leapfrog(targets[i], state.b1[i], p0, eps, config.hmc_leapfrog);
    ++stats.proposals;
    if (!std::isfinite(prop.position) || !std::isfinite(prop.momentum)) {
      ++stats.nonfinite;
      continue;
    }
    if (std::abs(prop.position) < config.b1_floor) continue;
    const double current = targets[i].potential(state.b1[i]) + 0.5 * p0 * p0;
    const double proposed = targets[i].potential(prop.position) + 0.5 * prop.momentum * prop.momentum;
    if (!std::isfinite(current) || !std::isfinite(proposed)) {
      ++stats.nonfinite;
      continue;
    }
    if (std::log(u) < current - proposed) {
      out[i] = prop.position;
      ++stats.accepted;
    }
  }
  return out;
}

double initial_epsilon(const ChainState& state, std::span<const double> xi, const PriorHyper& priors,
                       const McmcConfig& config) {
  const auto targets = b1_targets(state, xi, priors, config.b1_potential);
  double sum = 0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double h = targets[i].curvature(state.b1[i]);
    if (h > 0 && std::isfinite(h)) {
      sum += 0.5 / std::sqrt(h);
      ++used;
    }
  }
  return used > 0 ? sum / static_cast<double>(used) : 0.5 * std::sqrt(priors.sigma2_b);
}

void gibbs_sweep(ChainState& state, std::span<const double> xi, const PriorHyper& priors, const McmcConfig& config,
                 double epsilon, Rng& rng, HmcStats& stats) {
  state.theta = sample_theta(state, xi, rng, config.init_gamma);
  state.B1t = sample_B1(state, xi, priors, rng);
  state.B2sq = sample_B2sq(state, xi, priors, rng);
  state.b1 = hmc_step_b1(state, xi, priors, config, epsilon, rng, stats);
}

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

IvPosterior run_gibbs(std::span<const double> xi, const PriorHyper& priors, const McmcConfig& config, Rng& rng) {
  config.validate();
  check_day(xi);
  ChainState state = initial_state(xi, priors, config, rng);
  state.validate(config.b1_floor);

  double epsilon = config.auto_epsilon ? initial_epsilon(state, xi, priors, config) : config.hmc_epsilon;
  const int pilot = config.auto_epsilon ? std::min(config.pilot_iterations, config.burn_in) : 0;
  constexpr int kWindow = 10;

  IvPosterior post;
  const auto M = static_cast<std::size_t>(config.iterations);
  post.iv_trace.reserve(M);
  post.b1_trace.reserve(M);
  post.B1t_trace.reserve(M);
  post.B2sq_trace.reserve(M);

  HmcStats total, window;
  for (int i = 0; i < config.iterations; ++i) {
    HmcStats it;
    gibbs_sweep(state, xi, priors, config, epsilon, rng, it);

    window.proposals += it.proposals;
    window.accepted += it.accepted;
    total.proposals += it.proposals;
    total.accepted += it.accepted;
    total.nonfinite += it.nonfinite;

    if (i < pilot && (i + 1) % kWindow == 0 && window.proposals > 0) {
      const double rate = static_cast<double>(window.accepted) / static_cast<double>(window.proposals);
      if (rate > 0.9) epsilon *= 1.25;
      if (rate < 0.6) epsilon *= 0.75;
      window = {};
    }

    const double qv = quadratic_variation(state.theta);
    post.iv_trace.push_back(qv);
    post.b1_trace.push_back(mean_of(state.b1));
    post.B1t_trace.push_back(mean_of(state.B1t));
    post.B2sq_trace.push_back(mean_of(state.B2sq));
    if (i >= config.burn_in) {
      post.iv_draws.push_back(qv);
      if (config.keep_paths) post.paths.push_back(state.theta);
    }
  }
  post.acceptance_rate_b1 =
      total.proposals > 0 ? static_cast<double>(total.accepted) / static_cast<double>(total.proposals) : 0.0;
  post.nonfinite_energy = total.nonfinite;
  post.final_epsilon = epsilon;
  return post;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidInputError("quantile of an empty set");
  const double h = (static_cast<double>(sorted.size()) - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

IvSummary iv_point_and_interval(const IvPosterior& post, double level) {
  if (post.iv_draws.empty()) throw InvalidInputError("no retained draws");
  if (!(level > 0 && level < 1)) throw InvalidInputError("credible level must lie in (0, 1)");
  std::vector<double> sorted = post.iv_draws;
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1 - level);
  return {mean_of(post.iv_draws), quantile_sorted(sorted, tail), quantile_sorted(sorted, 1 - tail)};
}

}  // namespace cgseq
