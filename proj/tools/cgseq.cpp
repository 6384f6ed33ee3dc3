// cgseq: simulate, estimate, benchmark and bias-map subcommands.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "cgseq/commands.hpp"
#include "cgseq/tick_io.hpp"

namespace {

const std::map<std::string, std::string>& help_text() {
  static const std::map<std::string, std::string> h = {
      {"rho", "noise/return correlation (biasmap: reference correlation fixing B2_tilde, default 0.9)"},
      {"nts", "noise-to-signal variance ratio"},
      {"b1var", "annualized variance of the efficient returns"},
      {"days", "number of simulated days"},
      {"steps", "increments per simulated day"},
      {"open", "opening log price of simulated days"},
      {"iters", "Gibbs iterations M"},
      {"burnin", "discarded iterations M0"},
      {"seed", "random seed"},
      {"epsilon", "fixed leapfrog step size (disables automatic tuning)"},
      {"leapfrog", "leapfrog steps per Hamiltonian proposal"},
      {"pilot", "burn-in iterations used to tune the step size"},
      {"epsilon-jitter", "relative uniform jitter of the step size"},
      {"b1-floor", "proposals with |b1| below this are rejected"},
      {"init-gamma", "prior variance of theta(0) around xi(0)"},
      {"per-step-params", "time-varying parameters (true/false)"},
      {"potential", "b1 potential: full or as-printed"},
      {"mu-B", "prior mean of B1_tilde (per-step)"},
      {"sigma2-B", "prior variance of B1_tilde (per-step)"},
      {"mu-b", "prior mean of b1 (per-step)"},
      {"sigma2-b", "prior variance of b1 (per-step)"},
      {"alpha-B", "inverse-gamma shape for B2_tilde^2"},
      {"beta-B", "inverse-gamma scale for B2_tilde^2 (per-step)"},
      {"methods", "comma-separated subset of LIP,RV,TSRV"},
      {"k-subsamples", "TSRV subsamples (0: ceil(T^(2/3)))"},
      {"threads", "worker threads (0: CGSEQ_THREADS or all cores)"},
      {"level", "posterior interval probability"},
      {"grid-points", "grid size over [-b1 sqrt(nts), b1 sqrt(nts)]"},
      {"input", "tick CSV with header day,timestamp,log_price"},
      {"output", "output CSV path"},
  };
  return h;
}

struct Subcommand {
  CLI::App* app;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
};

void add_keys(Subcommand& sub, const std::vector<std::string>& keys) {
  for (const auto& k : keys) sub.options[k] = sub.app->add_option("--" + k, sub.values[k], help_text().at(k));
  sub.app->add_option("--config", sub.config_path, "key=value file; flags override it")->check(CLI::ExistingFile);
}

cgseq::RunConfig build_config(const Subcommand& sub) {
  cgseq::RunConfig cfg;
  if (!sub.config_path.empty()) cgseq::apply_config_file(cfg, sub.config_path);
  for (const auto& [k, opt] : sub.options)
    if (opt->count() > 0) cfg.set(k, sub.values.at(k));
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact filtering and Bayesian integrated-variance estimation with endogenous noise"};
  app.require_subcommand(1);

  const std::vector<std::string> mcmc_keys{"iters", "burnin", "seed", "epsilon", "leapfrog", "pilot",
                                           "epsilon-jitter", "b1-floor", "init-gamma", "per-step-params",
                                           "potential", "level", "threads"};
  const std::vector<std::string> prior_keys{"mu-B", "sigma2-B", "mu-b", "sigma2-b", "alpha-B", "beta-B"};

  Subcommand simulate{app.add_subcommand("simulate", "simulate noisy tick days"), {}, {}, {}};
  add_keys(simulate, {"rho", "nts", "b1var", "days", "steps", "open", "seed", "threads", "output"});

  Subcommand estimate{app.add_subcommand("estimate", "posterior integrated variance per day of a tick CSV"), {}, {},
                      {}};
  {
    std::vector<std::string> keys{"input", "output", "rho", "nts", "b1var"};
    keys.insert(keys.end(), mcmc_keys.begin(), mcmc_keys.end());
    keys.insert(keys.end(), prior_keys.begin(), prior_keys.end());
    add_keys(estimate, keys);
  }

  Subcommand benchmark{app.add_subcommand("benchmark", "compare LIP, RV and TSRV on simulated days"), {}, {}, {}};
  {
    std::vector<std::string> keys{"rho", "nts", "b1var", "days", "steps", "k-subsamples", "methods", "output"};
    keys.insert(keys.end(), mcmc_keys.begin(), mcmc_keys.end());
    add_keys(benchmark, keys);
  }

  Subcommand biasmap{app.add_subcommand("biasmap", "sign of the bias from ignoring noise/return correlation"), {}, {},
                     {}};
  add_keys(biasmap, {"rho", "nts", "b1var", "grid-points", "output"});

  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<Subcommand*, std::function<int(const cgseq::RunConfig&, std::ostream&)>>> table{
      {&simulate, cgseq::cmd_simulate},
      {&estimate, cgseq::cmd_estimate},
      {&benchmark, cgseq::cmd_benchmark},
      {&biasmap, cgseq::cmd_biasmap}};
  try {
    for (const auto& [sub, run] : table)
      if (sub->app->parsed()) return run(build_config(*sub), std::cout);
  } catch (const cgseq::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
