#pragma once

// Successive-conditional simulator: alternate one Gibbs sweep with a fresh
// draw of xi | theta, parameters. Its stationary law is the joint prior, so
// recorded parameter draws must follow the prior marginals.

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "cgseq/iv_gibbs.hpp"
#include "ks.hpp"

namespace geweke {

struct Setup {
  cgseq::PriorHyper priors{-0.3, 0.04, 1.0, 0.01, 20.0, 19.0};
  std::size_t T = 50;
  int sweeps = 50000;
  int thin = 25;
  double epsilon = 0.03;
  int leapfrog = 10;
  cgseq::ParamSharing sharing = cgseq::ParamSharing::shared;
  cgseq::B1Potential potential = cgseq::B1Potential::full;
  std::uint64_t seed = 2024;
};

struct Draws {
  std::vector<double> b1, B1t, B2sq;
  std::vector<double> scaled_qv;  // sum (dtheta / b1)^2, chi-square with T degrees of freedom a priori
  double acceptance = 0;
};

inline void simulate_xi(const cgseq::ChainState& s, std::vector<double>& xi, cgseq::Rng& rng) {
  xi[0] = s.theta[0];
  for (std::size_t t = 0; t < s.steps(); ++t) {
    const std::size_t i = s.param_index(t);
    const double d = s.theta[t + 1] - s.theta[t];
    xi[t + 1] = s.theta[t + 1] + s.B1t[i] / s.b1[i] * d + std::sqrt(s.B2sq[i]) * rng.normal();
  }
}

inline Draws run(const Setup& setup) {
  cgseq::Rng rng(setup.seed);
  const auto& pr = setup.priors;
  const std::size_t n = setup.sharing == cgseq::ParamSharing::shared ? 1 : setup.T;
  cgseq::ChainState s;
  s.b1.resize(n);
  s.B1t.resize(n);
  s.B2sq.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.b1[i] = pr.mu_b + std::sqrt(pr.sigma2_b) * rng.normal();
    s.B1t[i] = pr.mu_B + std::sqrt(pr.sigma2_B) * rng.normal();
    s.B2sq[i] = rng.inverse_gamma(pr.alpha_B, pr.beta_B);
  }
  s.theta.assign(setup.T + 1, 0.0);
  for (std::size_t t = 0; t < setup.T; ++t) s.theta[t + 1] = s.theta[t] + s.b1[s.param_index(t)] * rng.normal();
  std::vector<double> xi(setup.T + 1);
  simulate_xi(s, xi, rng);

  cgseq::McmcConfig cfg;
  cfg.iterations = 2;
  cfg.burn_in = 1;
  cfg.auto_epsilon = false;
  cfg.hmc_epsilon = setup.epsilon;
  cfg.hmc_leapfrog = setup.leapfrog;
  cfg.epsilon_jitter = 0.2;
  cfg.sharing = setup.sharing;
  cfg.b1_potential = setup.potential;

  Draws out;
  cgseq::HmcStats stats;
  const std::size_t probe = n / 2;
  for (int i = 0; i < setup.sweeps; ++i) {
    cgseq::gibbs_sweep(s, xi, pr, cfg, setup.epsilon, rng, stats);
    if ((i + 1) % setup.thin == 0) {
      out.b1.push_back(s.b1[probe]);
      out.B1t.push_back(s.B1t[probe]);
      out.B2sq.push_back(s.B2sq[probe]);
      double q = 0;
      for (std::size_t t = 0; t < setup.T; ++t) {
        const double z = (s.theta[t + 1] - s.theta[t]) / s.b1[s.param_index(t)];
        q += z * z;
      }
      out.scaled_qv.push_back(q);
    }
    simulate_xi(s, xi, rng);
  }
  out.acceptance = static_cast<double>(stats.accepted) / static_cast<double>(stats.proposals);
  return out;
}

struct PValues {
  double b1, B1t, B2sq, scaled_qv;
};

inline PValues test(const Draws& d, const cgseq::PriorHyper& pr, std::size_t T) {
  const boost::math::normal_distribution<double> pb(pr.mu_b, std::sqrt(pr.sigma2_b));
  const boost::math::normal_distribution<double> pB(pr.mu_B, std::sqrt(pr.sigma2_B));
  PValues p;
  p.b1 = ks::test(d.b1, [&](double x) { return boost::math::cdf(pb, x); });
  p.B1t = ks::test(d.B1t, [&](double x) { return boost::math::cdf(pB, x); });
  // InvGamma(a, b) CDF: Q(a, b / x).
  p.B2sq = ks::test(d.B2sq, [&](double x) { return x > 0 ? boost::math::gamma_q(pr.alpha_B, pr.beta_B / x) : 0.0; });
  const double dof = static_cast<double>(T);
  p.scaled_qv = ks::test(d.scaled_qv, [&](double x) { return x > 0 ? boost::math::gamma_p(dof / 2, x / 2) : 0.0; });
  return p;
}

}  // namespace geweke
