#pragma once

// Steady-state analysis of the integrated-variance filter with constant
// parameters, and the sign of the asymptotic bias incurred by a sampler that
// ignores noise/return correlation.

#include <string>
#include <vector>

namespace cgseq {

inline constexpr double kTradingDaysPerYear = 252.0;
inline constexpr int kDefaultStepsPerDay = 23400;

enum class Units { per_step, annualized };

/// Annualized std = per-step std * sqrt(252 * steps_per_day).
double annualization_factor(int steps_per_day);
double per_step_std_from_annual_var(double annual_var, int steps_per_day);

struct SteadyParams {
  double b1 = 0;
  double B1t = 0;
  double B2t = 0;
  Units units = Units::per_step;

  void validate() const;
  SteadyParams to_units(Units target, int steps_per_day = kDefaultStepsPerDay) const;
};

/// Noise loadings for a target noise/return correlation rho and noise-to-signal
/// ratio nts: B2t = sqrt((1 - rho^2) b1^2 nts), B1t = sgn(rho) sqrt(rho^2 b1^2 nts).
SteadyParams steady_from_correlation(double b1, double rho, double nts, Units units = Units::per_step);

/// Limit of the filtering variance recursion with constant parameters:
///   gamma* = 1/2 (|b1| sqrt((2 B1t + b1)^2 + 4 B2t^2) - b1 (2 B1t + b1)).
double gamma_star(const SteadyParams& p);

/// gamma* of the model that ignores correlation (B1t = 0).
double gamma0_star(const SteadyParams& p);

enum class BiasSign { negative, positive, boundary };

std::string to_string(BiasSign s);

/// Left side B1t^4/b1^2 + 2 B1t^3/b1 of the bias inequality.
double bias_lhs(double b1, double B1t);
/// Right side (q/b1) B1t^2 + (b1 + q) B1t with q = sqrt(b1^2 + 4 B2t^2).
double bias_rhs(double b1, double B1t, double B2t);

/// negative when lhs > rhs (neglecting correlation underestimates), positive
/// when lhs < rhs, boundary when they agree to 1e-14 relative.
BiasSign bias_sign(const SteadyParams& p);

struct BiasRow {
  double B1t;
  double lhs;
  double rhs;
  BiasSign sign;
};

std::vector<BiasRow> bias_region_table(double b1, double B2t, const std::vector<double>& B1t_grid);

/// Evenly spaced grid with n points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int n);

/// Sign changes of lhs - rhs over a monotone grid, refined by bisection to
/// `tol`. Grid points that are exact boundaries are reported as-is.
std::vector<double> bias_crossovers(double b1, double B2t, const std::vector<double>& B1t_grid,
                                    double tol = 1e-10);

}  // namespace cgseq
