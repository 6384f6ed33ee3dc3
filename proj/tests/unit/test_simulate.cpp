#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "cgseq/simulate.hpp"

using namespace cgseq;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("naive and two-scale realized variance", "[simulate]") {
  const std::vector<double> line{0, 1, 2, 3, 4};
  CHECK(rv_naive(line) == 4.0);
  // K = 2: subsampled RVs (0,2,4) -> 8 and (1,3) -> 4, mean 6; nbar = 3/2,
  // correction (3/2)/4 * 4 = 1.5.
  CHECK_THAT(rv_two_scale(line, 2), WithinAbs(4.5, 1e-15));
  // K = 1 reduces to RV - RV = 0.
  CHECK_THAT(rv_two_scale(line, 1), WithinAbs(0.0, 1e-15));
  CHECK_THROWS_AS(rv_two_scale(line, 4), InvalidInputError);
  CHECK_THROWS_AS(rv_two_scale(line, 0), InvalidInputError);
  CHECK_THROWS_AS(rv_naive(std::vector<double>{1.0}), InvalidInputError);

  // A pure zigzag has large RV and a negative TSRV.
  std::vector<double> zig(101);
  for (std::size_t i = 0; i < zig.size(); ++i) zig[i] = (i % 2) ? 1.0 : 0.0;
  CHECK(rv_two_scale(zig, 2) < 0);

  CHECK(default_subsamples(2340) == 177);
  CHECK(default_subsamples(1000) == 100);
}

TEST_CASE("two-scale estimator removes iid noise bias", "[simulate]") {
  Rng rng(12);
  const int n = 23400, days = 40;
  double rv = 0, tsrv = 0, truth = 0;
  for (int d = 0; d < days; ++d) {
    std::vector<double> x(n + 1);
    double th = 0, qv = 0;
    x[0] = 0;
    for (int t = 1; t <= n; ++t) {
      const double r = 1e-4 * rng.normal();
      th += r;
      qv += r * r;
      x[t] = th + 1e-4 * rng.normal();
    }
    rv += rv_naive(x);
    tsrv += rv_two_scale(x, default_subsamples(n));
    truth += qv;
  }
  CHECK(rv / truth > 2.5);
  CHECK_THAT(tsrv / truth, WithinAbs(1.0, 0.1));
}

TEST_CASE("error summary", "[simulate]") {
  const std::vector<double> e{1, -1, 3, 1};
  const auto r = summarize_errors("X", e);
  CHECK(r.bias == 1.0);
  CHECK_THAT(r.std, WithinAbs(std::sqrt(2.0), 1e-15));
  CHECK_THAT(r.rmse * r.rmse, WithinAbs(r.bias * r.bias + r.std * r.std, 1e-14));
  CHECK_THROWS_AS(summarize_errors("X", std::vector<double>{}), InvalidInputError);
}

TEST_CASE("method names round-trip", "[simulate]") {
  for (Method m : {Method::LIP, Method::RV, Method::TSRV}) CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("QMLE"), InvalidInputError);
}

TEST_CASE("simulated day follows the design", "[simulate]") {
  SimDesign d;
  d.steps_per_day = 23400;
  Rng a(3), b(3);
  const auto x = simulate_day(d, a);
  const auto y = simulate_day(d, b);
  CHECK(x.xi == y.xi);
  REQUIRE(x.xi.size() == 23401);
  CHECK(x.xi[0] == d.open_log_price);
  const auto p = d.per_step_params();
  CHECK_THAT(x.true_qv, WithinRel(23400 * p.b1 * p.b1, 0.05));
  // Noise-return covariance: Cov(xi - theta, dtheta) = B1t b1 per step.
  double c = 0;
  for (std::size_t t = 1; t < x.xi.size(); ++t)
    c += (x.xi[t] - x.theta_true[t]) * (x.theta_true[t] - x.theta_true[t - 1]);
  c /= 23400;
  CHECK_THAT(c, WithinAbs(p.B1t * p.b1, 5 * p.b1 * std::sqrt((3 * p.B1t * p.B1t + p.B2t * p.B2t) / 23400)));

  SimDesign bad = d;
  bad.rho = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  bad = d;
  bad.steps_per_day = 1;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
}

TEST_CASE("benchmark does not depend on the thread count", "[simulate]") {
  SimDesign d;
  d.n_days = 3;
  d.steps_per_day = 200;
  McmcConfig m;
  m.iterations = 60;
  m.burn_in = 30;
  BenchOptions o1, o2;
  o1.threads = 1;
  o2.threads = 3;
  const auto r1 = run_benchmark(d, o1, m);
  const auto r2 = run_benchmark(d, o2, m);
  REQUIRE(r1.rows.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(r1.rows[j].rmse == r2.rows[j].rmse);
    CHECK(r1.rows[j].bias == r2.rows[j].bias);
  }
  for (std::size_t i = 0; i < r1.days.size(); ++i) CHECK(r1.days[i].estimates == r2.days[i].estimates);
  CHECK(r1.days[0].qv_gffbs > 0);
  CHECK(r1.days[0].lip_lo <= r1.days[0].lip_hi);
}

TEST_CASE("parallel_for covers every index and propagates failures", "[simulate]") {
  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](int i) { hits[static_cast<std::size_t>(i)] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 2,
                               [](int i) {
                                 if (i == 7) throw InvalidInputError("boom");
                               }),
                  InvalidInputError);
  CHECK(worker_count(1, 100) == 1);
  CHECK(worker_count(0, 1) == 1);
}

TEST_CASE("noise-free design gives unbiased estimates", "[simulate]") {
  SimDesign d;
  d.nts = 0.0;
  d.n_days = 20;
  d.steps_per_day = 500;
  McmcConfig m;
  m.iterations = 300;
  m.burn_in = 150;
  const auto r = run_benchmark(d, BenchOptions{}, m);
  for (const auto& row : r.rows) {
    INFO(row.method);
    CHECK_THAT(row.rmse * row.rmse, WithinRel(row.bias * row.bias + row.std * row.std, 1e-10));
    CHECK(std::abs(row.bias) <= 3 * row.std / std::sqrt(d.n_days - 1.0) + 1e-15);
  }
  // Without noise the naive estimator is the quadratic variation itself.
  for (const auto& day : r.days) CHECK_THAT(day.estimates[1], WithinRel(day.true_qv, 1e-12));
}
