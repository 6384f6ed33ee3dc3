#include "cgseq/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "cgseq/bias.hpp"
#include "cgseq/tick_io.hpp"

namespace cgseq {

namespace {

constexpr double kSecondsPerDay = 23400.0;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing (does the directory exist?)");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string day_id(int d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "day%04d", d);
  return buf;
}

SimDesign effective_design(const RunConfig& cfg, double default_rho) {
  SimDesign d = cfg.design;
  d.rho = cfg.rho.value_or(default_rho);
  d.validate();
  return d;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

std::filesystem::path sibling_path(const std::filesystem::path& path, const std::string& suffix) {
  auto name = path.stem().string() + suffix + path.extension().string();
  return path.parent_path() / name;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SimDesign design = effective_design(cfg, SimDesign{}.rho);
  const auto out_path = cfg.output.empty() ? std::filesystem::path("ticks.csv") : cfg.output;
  const auto truth_path = sibling_path(out_path, "_truth");

  std::vector<SimDay> days(static_cast<std::size_t>(design.n_days));
  parallel_for(design.n_days, cfg.threads, [&](int d) {
    Rng rng = Rng::derive(design.seed, 3 * static_cast<std::uint64_t>(d));
    days[static_cast<std::size_t>(d)] = simulate_day(design, rng);
  });

  const auto T = static_cast<std::size_t>(design.steps_per_day);
  std::vector<TickSeries> series;
  series.reserve(days.size());
  for (std::size_t d = 0; d < days.size(); ++d) {
    TickSeries s{day_id(static_cast<int>(d)), {}, days[d].xi};
    s.timestamp.resize(T + 1);
    for (std::size_t t = 0; t <= T; ++t) s.timestamp[t] = kSecondsPerDay * static_cast<double>(t) / T;
    series.push_back(std::move(s));
  }
  const std::vector<std::string> comments{
      "simulated log prices; timestamps in seconds from the open",
      "rho=" + fmt(design.rho) + " nts=" + fmt(design.nts) + " b1var=" + fmt(design.annualized_var_b1) +
          " steps=" + std::to_string(design.steps_per_day) + " seed=" + std::to_string(design.seed)};
  write_csv(out_path, series, comments);

  auto truth = open_output(truth_path);
  const double scale = annualization_factor(design.steps_per_day);
  truth << "# " << kVarianceUnits << "\n# " << kLoadingUnits << '\n';
  truth << "day,true_qv,b1,B1_tilde,B2_tilde\n";
  for (std::size_t d = 0; d < days.size(); ++d) {
    const auto& p = days[d].params_true;
    truth << series[d].day << ',' << fmt(kTradingDaysPerYear * days[d].true_qv) << ',' << fmt(scale * p.b1) << ','
          << fmt(scale * p.B1t) << ',' << fmt(scale * p.B2t) << '\n';
  }
  finish(truth, truth_path);
  log << "wrote " << days.size() << " days to " << out_path.string() << " and " << truth_path.string() << '\n';
  return 0;
}

int cmd_estimate(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.input.empty()) throw ConfigError("estimate: --input is required (CSV with header day,timestamp,log_price)");
  const auto out_path = cfg.output.empty() ? std::filesystem::path("posterior.csv") : cfg.output;
  const auto ingested = ingest_csv(cfg.input);
  for (const auto& w : ingested.warnings) log << "warning: " << w << '\n';
  const auto& days = ingested.days;
  for (const auto& d : days)
    if (d.size() < 3) throw InvalidInputError("estimate: day " + d.day + " has fewer than 3 ticks");

  std::vector<IvSummary> summaries(days.size());
  std::vector<double> acceptance(days.size());
  parallel_for(static_cast<int>(days.size()), cfg.threads, [&](int d) {
    const auto& day = days[static_cast<std::size_t>(d)];
    const PriorHyper priors = cfg.priors_for(static_cast<int>(day.size() - 1));
    Rng rng = Rng::derive(cfg.mcmc.seed, 3 * static_cast<std::uint64_t>(d) + 1);
    const auto post = run_gibbs(day.log_price, priors, cfg.mcmc, rng);
    summaries[static_cast<std::size_t>(d)] = iv_point_and_interval(post, cfg.level);
    acceptance[static_cast<std::size_t>(d)] = post.acceptance_rate_b1;
  });

  auto out = open_output(out_path);
  out << "# " << kVarianceUnits << '\n';
  out << "# interval: equal-tailed " << fmt(cfg.level) << " posterior interval; accept_rate: b1 Hamiltonian step\n";
  out << "day,iv_mean,iv_lo,iv_hi,accept_rate\n";
  for (std::size_t d = 0; d < days.size(); ++d) {
    const auto& s = summaries[d];
    out << days[d].day << ',' << fmt(kTradingDaysPerYear * s.estimate) << ',' << fmt(kTradingDaysPerYear * s.lo)
        << ',' << fmt(kTradingDaysPerYear * s.hi) << ',' << fmt(acceptance[d]) << '\n';
  }
  finish(out, out_path);
  log << "estimated " << days.size() << " days; wrote " << out_path.string() << '\n';
  return 0;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SimDesign design = effective_design(cfg, SimDesign{}.rho);
  const auto out_path = cfg.output.empty() ? std::filesystem::path("benchmark.csv") : cfg.output;
  const auto days_path = sibling_path(out_path, "_days");

  BenchOptions options;
  options.methods = cfg.methods;
  options.k_subsamples = cfg.k_subsamples;
  options.threads = cfg.threads;
  options.level = cfg.level;
  const auto result = run_benchmark(design, options, cfg.mcmc);

  auto table = open_output(out_path);
  table << "# " << kVarianceUnits << '\n';
  table << "# errors: estimate - true quadratic variation over " << design.n_days << " days; std is the population "
        << "standard deviation\n";
  table << "method,bias,std,rmse\n";
  for (const auto& r : result.rows)
    table << r.method << ',' << fmt(r.bias) << ',' << fmt(r.std) << ',' << fmt(r.rmse) << '\n';
  finish(table, out_path);

  auto plot = open_output(days_path);
  plot << "# " << kVarianceUnits << '\n';
  plot << "day,true_qv";
  for (Method m : result.methods) plot << ",est_" << to_string(m) << ",abs_err_" << to_string(m);
  plot << ",lip_lo,lip_hi,lip_accept,tsrv_negative,qv_gffbs,qv_ffbs\n";
  for (const auto& rec : result.days) {
    plot << day_id(rec.day) << ',' << fmt(rec.true_qv);
    for (std::size_t j = 0; j < rec.estimates.size(); ++j)
      plot << ',' << fmt(rec.estimates[j]) << ',' << fmt(std::abs(rec.estimates[j] - rec.true_qv));
    plot << ',' << fmt(rec.lip_lo) << ',' << fmt(rec.lip_hi) << ',' << fmt(rec.lip_acceptance) << ','
         << (rec.tsrv_negative ? 1 : 0) << ',' << fmt(rec.qv_gffbs) << ',' << fmt(rec.qv_ffbs) << '\n';
  }
  finish(plot, days_path);

  const double n = static_cast<double>(design.n_days);
  log << "method     bias x1000    std x1000   rmse x1000   bias/SE\n";
  for (const auto& r : result.rows) {
    char line[128];
    const double se = r.std / std::sqrt(n - 1);
    std::snprintf(line, sizeof line, "%-8s %12.5f %12.5f %12.5f %9.2f\n", r.method.c_str(), 1e3 * r.bias,
                  1e3 * r.std, 1e3 * r.rmse, se > 0 ? r.bias / se : 0.0);
    log << line;
  }
  log << "wrote " << out_path.string() << " and " << days_path.string() << '\n';
  return 0;
}

int cmd_biasmap(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const double rho = cfg.rho.value_or(0.9);
  if (!(std::abs(rho) <= 1)) throw ConfigError("biasmap: --rho must lie in [-1, 1]");
  const double b1 = std::sqrt(cfg.design.annualized_var_b1);
  const double nts = cfg.design.nts;
  const double B2t = std::sqrt((1 - rho * rho) * b1 * b1 * nts);
  const double edge = b1 * std::sqrt(nts);
  const auto grid = linear_grid(-edge, edge, cfg.grid_points);
  const auto rows = bias_region_table(b1, B2t, grid);
  const auto roots = bias_crossovers(b1, B2t, grid);
  const auto out_path = cfg.output.empty() ? std::filesystem::path("biasmap.csv") : cfg.output;

  auto out = open_output(out_path);
  out << "# " << kLoadingUnits << '\n';
  out << "# b1=" << fmt(b1) << " B2_tilde=" << fmt(B2t) << " (reference rho=" << fmt(rho) << ", nts=" << fmt(nts)
      << "); sign negative: ignoring correlation underestimates\n";
  out << "# crossovers:";
  for (double r : roots) out << ' ' << fmt(r);
  out << '\n';
  out << "B1_tilde,lhs,rhs,sign\n";
  for (const auto& r : rows)
    out << fmt(r.B1t) << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << to_string(r.sign) << '\n';
  finish(out, out_path);

  log << "b1=" << fmt(b1) << " B2_tilde=" << fmt(B2t) << '\n';
  for (double r : roots) log << "crossover B1_tilde=" << fmt(r) << '\n';
  log << "wrote " << out_path.string() << '\n';
  return 0;
}

}  // namespace cgseq
