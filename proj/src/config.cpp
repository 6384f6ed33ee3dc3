#include "cgseq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cgseq/tick_io.hpp"

namespace cgseq {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (v.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(x))
    throw ConfigError("option '" + key + "': expected a finite number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (v.empty() || r.ec != std::errc() || r.ptr != end)
    throw ConfigError("option '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const auto x = to_integer(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw ConfigError("option '" + key + "': value out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("option '" + key + "': expected true or false, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"rho", [](RunConfig& c, const auto& k, const auto& v) { c.rho = to_double(k, v); }},
      {"nts", [](RunConfig& c, const auto& k, const auto& v) { c.design.nts = to_double(k, v); }},
      {"b1var", [](RunConfig& c, const auto& k, const auto& v) { c.design.annualized_var_b1 = to_double(k, v); }},
      {"days", [](RunConfig& c, const auto& k, const auto& v) { c.design.n_days = to_int(k, v); }},
      {"steps", [](RunConfig& c, const auto& k, const auto& v) { c.design.steps_per_day = to_int(k, v); }},
      {"open", [](RunConfig& c, const auto& k, const auto& v) { c.design.open_log_price = to_double(k, v); }},
      {"iters", [](RunConfig& c, const auto& k, const auto& v) { c.mcmc.iterations = to_int(k, v); }},
      {"burnin", [](RunConfig& c, const auto& k, const auto& v) { c.mcmc.burn_in = to_int(k, v); }},
      {"seed",
       [](RunConfig& c, const auto& k, const auto& v) {
         const auto s = to_integer(k, v);
         if (s < 0) throw ConfigError("option 'seed': must be non-negative");
         c.design.seed = c.mcmc.seed = static_cast<std::uint64_t>(s);
       }},
      {"epsilon",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.mcmc.hmc_epsilon = to_double(k, v);
         c.mcmc.auto_epsilon = false;
       }},
      {"leapfrog", [](RunConfig& c, const auto& k, const auto& v) { c.mcmc.hmc_leapfrog = to_int(k, v); }},
      {"pilot", [](RunConfig& c, const auto& k, const auto& v) { c.mcmc.pilot_iterations = to_int(k, v); }},
      {"epsilon-jitter",
       [](RunConfig& c, const auto& k, const auto& v) { c.mcmc.epsilon_jitter = to_double(k, v); }},
      {"b1-floor", [](RunConfig& c, const auto& k, const auto& v) { c.mcmc.b1_floor = to_double(k, v); }},
      {"init-gamma", [](RunConfig& c, const auto& k, const auto& v) { c.mcmc.init_gamma = to_double(k, v); }},
      {"per-step-params",
       [](RunConfig& c, const auto& k, const auto& v) {
         c.mcmc.sharing = to_bool(k, v) ? ParamSharing::per_step : ParamSharing::shared;
       }},
      {"potential",
       [](RunConfig& c, const auto& k, const auto& v) {
         if (v == "full") c.mcmc.b1_potential = B1Potential::full;
         else if (v == "as-printed") c.mcmc.b1_potential = B1Potential::as_printed;
         else throw ConfigError("option '" + k + "': expected full or as-printed, got '" + v + "'");
       }},
      {"mu-B", [](RunConfig& c, const auto& k, const auto& v) { c.mu_B = to_double(k, v); }},
      {"sigma2-B", [](RunConfig& c, const auto& k, const auto& v) { c.sigma2_B = to_double(k, v); }},
      {"mu-b", [](RunConfig& c, const auto& k, const auto& v) { c.mu_b = to_double(k, v); }},
      {"sigma2-b", [](RunConfig& c, const auto& k, const auto& v) { c.sigma2_b = to_double(k, v); }},
      {"alpha-B", [](RunConfig& c, const auto& k, const auto& v) { c.alpha_B = to_double(k, v); }},
      {"beta-B", [](RunConfig& c, const auto& k, const auto& v) { c.beta_B = to_double(k, v); }},
      {"methods",
       [](RunConfig& c, const auto&, const auto& v) {
         std::vector<Method> ms;
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) ms.push_back(method_from_string(trim(item)));
         if (ms.empty()) throw ConfigError("option 'methods': empty list");
         c.methods = std::move(ms);
       }},
      {"k-subsamples", [](RunConfig& c, const auto& k, const auto& v) { c.k_subsamples = to_int(k, v); }},
      {"threads",
       [](RunConfig& c, const auto& k, const auto& v) {
         const int n = to_int(k, v);
         if (n < 0) throw ConfigError("option 'threads': must be non-negative");
         c.threads = static_cast<unsigned>(n);
       }},
      {"level", [](RunConfig& c, const auto& k, const auto& v) { c.level = to_double(k, v); }},
      {"grid-points", [](RunConfig& c, const auto& k, const auto& v) { c.grid_points = to_int(k, v); }},
      {"input", [](RunConfig& c, const auto&, const auto& v) { c.input = v; }},
      {"output", [](RunConfig& c, const auto&, const auto& v) { c.output = v; }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return names;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(*this, key, trim(value));
}

void RunConfig::validate() const {
  try {
    SimDesign d = design;
    if (rho) d.rho = *rho;
    d.validate();
    mcmc.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
  if (k_subsamples < 0) throw ConfigError("option 'k-subsamples': must be non-negative (0 selects ceil(T^(2/3)))");
  if (!(level > 0 && level < 1)) throw ConfigError("option 'level': must lie in (0, 1)");
  if (grid_points < 2) throw ConfigError("option 'grid-points': need at least 2");
  if (methods.empty()) throw ConfigError("option 'methods': empty list");
}

PriorHyper RunConfig::priors_for(int steps) const {
  SimDesign d = design;
  if (rho) d.rho = *rho;
  d.steps_per_day = steps;
  PriorHyper h = paper_hyperparameters(d);
  if (mu_B) h.mu_B = *mu_B;
  if (sigma2_B) h.sigma2_B = *sigma2_B;
  if (mu_b) h.mu_b = *mu_b;
  if (sigma2_b) h.sigma2_b = *sigma2_b;
  if (alpha_B) h.alpha_B = *alpha_B;
  if (beta_B) h.beta_B = *beta_B;
  try {
    h.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("priors: ") + e.what());
  }
  return h;
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line) + ": expected 'key = value'");
    try {
      cfg.set(trim(text.substr(0, eq)), text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  }
}

}  // namespace cgseq
