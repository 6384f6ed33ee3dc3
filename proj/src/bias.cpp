#include "cgseq/bias.hpp"

#include <cmath>
#include <stdexcept>

#include "cgseq/types.hpp"

namespace cgseq {

double annualization_factor(int steps_per_day) {
  if (steps_per_day < 1) throw InvalidInputError("steps per day must be positive");
  return std::sqrt(kTradingDaysPerYear * steps_per_day);
}

double per_step_std_from_annual_var(double annual_var, int steps_per_day) {
  if (!(annual_var >= 0)) throw InvalidInputError("annualized variance must be non-negative");
  return std::sqrt(annual_var) / annualization_factor(steps_per_day);
}

void SteadyParams::validate() const {
  if (!std::isfinite(b1) || !std::isfinite(B1t) || !std::isfinite(B2t))
    throw InvalidInputError("SteadyParams: non-finite value");
  if (!(B2t > 0)) throw InvalidInputError("SteadyParams: B2t must be positive");
}

SteadyParams SteadyParams::to_units(Units target, int steps_per_day) const {
  if (target == units) return *this;
  const double f = annualization_factor(steps_per_day);
  const double s = target == Units::annualized ? f : 1.0 / f;
  return {b1 * s, B1t * s, B2t * s, target};
}

SteadyParams steady_from_correlation(double b1, double rho, double nts, Units units) {
  if (!(std::abs(rho) < 1)) throw InvalidInputError("correlation must lie in (-1, 1)");
  if (!(nts >= 0)) throw InvalidInputError("noise-to-signal ratio must be non-negative");
  const double scale = b1 * b1 * nts;
  const double B2t = std::sqrt((1 - rho * rho) * scale);
  const double B1t = std::copysign(std::sqrt(rho * rho * scale), rho);
  return {b1, rho == 0 ? 0.0 : B1t, B2t, units};
}

double gamma_star(const SteadyParams& p) {
  const double s = 2 * p.B1t + p.b1;
  // Rationalized form of 1/2 (|b1| sqrt(s^2 + 4 B2t^2) - b1 s); avoids
  // cancellation when b1 s dominates.
  const double root = std::abs(p.b1) * std::sqrt(s * s + 4 * p.B2t * p.B2t);
  const double bs = p.b1 * s;
  if (bs <= 0) return 0.5 * (root - bs);
  return 2 * p.b1 * p.b1 * p.B2t * p.B2t / (root + bs);
}

double gamma0_star(const SteadyParams& p) {
  SteadyParams q = p;
  q.B1t = 0;
  return gamma_star(q);
}

std::string to_string(BiasSign s) {
  switch (s) {
    case BiasSign::negative: return "negative";
    case BiasSign::positive: return "positive";
    case BiasSign::boundary: return "boundary";
  }
  return "unknown";
}

double bias_lhs(double b1, double B1t) {
  const double x = B1t * B1t;
  return x * x / (b1 * b1) + 2 * x * B1t / b1;
}

double bias_rhs(double b1, double B1t, double B2t) {
  const double q = std::sqrt(b1 * b1 + 4 * B2t * B2t);
  return (q / b1) * B1t * B1t + (b1 + q) * B1t;
}

namespace {

BiasSign classify(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  if (std::abs(lhs - rhs) <= 1e-14 * scale) return BiasSign::boundary;
  return lhs > rhs ? BiasSign::negative : BiasSign::positive;
}

double gap(double b1, double B2t, double B1t) { return bias_lhs(b1, B1t) - bias_rhs(b1, B1t, B2t); }

}  // namespace

BiasSign bias_sign(const SteadyParams& p) {
  if (p.b1 == 0) throw InvalidInputError("bias_sign: b1 must be non-zero");
  return classify(bias_lhs(p.b1, p.B1t), bias_rhs(p.b1, p.B1t, p.B2t));
}

std::vector<BiasRow> bias_region_table(double b1, double B2t, const std::vector<double>& B1t_grid) {
  if (b1 == 0) throw InvalidInputError("bias_region_table: b1 must be non-zero");
  std::vector<BiasRow> rows;
  rows.reserve(B1t_grid.size());
  for (double x : B1t_grid) {
    if (!std::isfinite(x)) throw InvalidInputError("bias_region_table: non-finite grid point");
    const double l = bias_lhs(b1, x);
    const double r = bias_rhs(b1, x, B2t);
    rows.push_back({x, l, r, classify(l, r)});
  }
  return rows;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 2) throw InvalidInputError("linear_grid: need at least two points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return g;
}

std::vector<double> bias_crossovers(double b1, double B2t, const std::vector<double>& grid, double tol) {
  const auto rows = bias_region_table(b1, B2t, grid);
  std::vector<double> roots;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].sign == BiasSign::boundary) {
      roots.push_back(rows[i].B1t);
      continue;
    }
    if (i + 1 >= rows.size() || rows[i + 1].sign == BiasSign::boundary || rows[i + 1].sign == rows[i].sign)
      continue;
    double lo = rows[i].B1t;
    double hi = rows[i + 1].B1t;
    const double f_lo = gap(b1, B2t, lo);
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double f_mid = gap(b1, B2t, mid);
      if (f_mid == 0) {
        lo = hi = mid;
        break;
      }
      if ((f_mid > 0) == (f_lo > 0)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

}  // namespace cgseq
