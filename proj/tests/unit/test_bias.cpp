#include <catch_amalgamated.hpp>

#include <cmath>

#include "cgseq/bias.hpp"
#include "cgseq/scalar_system.hpp"
#include "cgseq/simulate.hpp"

using namespace cgseq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double iterate_gamma(const SteadyParams& p, int steps) {
  const auto sys = ScalarSystem<double>::unit_root(p.b1, p.B1t, p.B2t);
  ScalarBelief<double> b{0.0, 0.0};
  for (int i = 0; i < steps; ++i) b = scalar_filter_step(b, sys, 0.0);
  return b.gamma;
}

}  // namespace

TEST_CASE("gamma* is the fixed point of the variance recursion", "[bias]") {
  Rng rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    SteadyParams p{0.2 + rng.uniform(), 0.6 * rng.normal(), 0.05 + rng.uniform()};
    const double g = gamma_star(p);
    CHECK(g >= 0);
    CHECK_THAT(iterate_gamma(p, 2000), WithinAbs(g, 1e-10));
  }
  const SteadyParams p0{0.7, 0.0, 0.4};
  // With no correlation both forms reduce to b1 (sqrt(b1^2 + 4 B2^2) - b1) / 2.
  CHECK_THAT(gamma0_star(p0), WithinAbs(0.7 * 0.5 * (std::sqrt(0.49 + 0.64) - 0.7), 1e-15));
  CHECK_THAT(gamma_star(p0), WithinAbs(gamma0_star(p0), 1e-15));
}

TEST_CASE("bias sides and sign", "[bias]") {
  const double b1 = 0.5, B2 = 0.3;
  const double q = std::sqrt(b1 * b1 + 4 * B2 * B2);
  CHECK_THAT(bias_lhs(b1, 0.2), WithinAbs(std::pow(0.2, 4) / 0.25 + 2 * std::pow(0.2, 3) / 0.5, 1e-16));
  CHECK_THAT(bias_rhs(b1, 0.2, B2), WithinAbs(q / b1 * 0.04 + (b1 + q) * 0.2, 1e-16));
  CHECK(bias_sign({b1, 0.0, B2}) == BiasSign::boundary);
  CHECK(bias_sign({b1, -b1, B2}) == BiasSign::boundary);
  CHECK(bias_sign({b1, 0.1, B2}) == BiasSign::positive);
  CHECK(bias_sign({b1, -0.1, B2}) == BiasSign::negative);
  CHECK(to_string(BiasSign::negative) == "negative");
  CHECK_THROWS(bias_sign({0.0, 0.1, B2}));
}

TEST_CASE("crossovers are the roots of lhs - rhs", "[bias]") {
  const double b1 = std::sqrt(0.06), B2 = std::sqrt((1 - 0.81) * 0.06 * 1.5);
  const double q = std::sqrt(b1 * b1 + 4 * B2 * B2);
  // lhs - rhs = B (B + b1) (B^2 + b1 B - b1 (b1 + q)) / b1^2.
  const double r_pos = 0.5 * b1 * (-1 + std::sqrt(5 + 4 * q / b1));
  const auto roots = bias_crossovers(b1, B2, linear_grid(-0.3, 0.3, 601));
  REQUIRE(roots.size() == 3);
  CHECK_THAT(roots[0], WithinAbs(-b1, 1e-9));
  CHECK_THAT(roots[1], WithinAbs(0.0, 1e-9));
  CHECK_THAT(roots[2], WithinAbs(r_pos, 1e-9));
  CHECK_THAT(roots[0], WithinAbs(-0.245, 0.005));
  CHECK_THAT(roots[2], WithinAbs(0.281, 0.005));

  const auto table = bias_region_table(b1, B2, linear_grid(-0.3, 0.3, 7));
  REQUIRE(table.size() == 7);
  CHECK(table.front().sign == BiasSign::positive);
  CHECK(table[2].sign == BiasSign::negative);
  CHECK(table[4].sign == BiasSign::positive);
  CHECK(table.back().sign == BiasSign::negative);
}

TEST_CASE("unit conversions", "[bias]") {
  CHECK_THAT(annualization_factor(23400), WithinRel(std::sqrt(252.0 * 23400), 1e-15));
  const double b1 = per_step_std_from_annual_var(0.06, 23400);
  CHECK_THAT(b1, WithinRel(1.008712e-4, 1e-6));
  const auto s = steady_from_correlation(0.2, -0.1, 1.5);
  CHECK_THAT(s.B1t, WithinAbs(-0.2 * 0.1 * std::sqrt(1.5), 1e-16));
  CHECK_THAT(s.B2t * s.B2t + s.B1t * s.B1t, WithinRel(1.5 * 0.04, 1e-14));
  const auto a = s.to_units(Units::annualized, 100);
  CHECK_THAT(a.b1, WithinRel(0.2 * std::sqrt(25200.0), 1e-15));
  const auto back = a.to_units(Units::per_step, 100);
  CHECK_THAT(back.B1t, WithinRel(s.B1t, 1e-15));
}

TEST_CASE("hyperparameters of the reference simulation", "[bias][simulate]") {
  SimDesign d;
  d.steps_per_day = 23400;
  const auto h = paper_hyperparameters(d);
  CHECK_THAT(h.mu_b, WithinRel(1.21e-4, 0.01));
  CHECK_THAT(std::abs(h.mu_B), WithinRel(1.48e-5, 0.01));
  CHECK(h.mu_B < 0);
  CHECK_THAT(h.B2sq_prior_mean(), WithinRel(1.2 * (1 - 0.01) * 1.5 * h.sigma2_b, 1e-12));
  d.rho = 0.0;
  const auto h0 = paper_hyperparameters(d);
  CHECK(h0.mu_B == 0.0);
  CHECK(h0.sigma2_B > 0);
}
