#include <catch_amalgamated.hpp>

#include <limits>

#include "cgseq/cgfilter.hpp"
#include "gaussian_oracle.hpp"
#include "test_models.hpp"

using namespace cgseq;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double max_filter_error(Rng& rng, Eigen::Index k, Eigen::Index l, std::size_t T, bool correlated) {
  std::vector<SystemParams<double>> params;
  for (std::size_t t = 0; t < T; ++t) params.push_back(testing_models::random_system(rng, k, l, correlated));
  const VectorXd m0 = testing_models::random_matrix(rng, k, 1, 1.0);
  const MatrixXd g0 = testing_models::random_spd(rng, k);
  const auto joint = oracle::build_joint(params, m0, g0);
  const auto xi = oracle::simulate_observations(joint, rng);

  const auto beliefs = run_filter(params, xi, GaussianBelief<double>{m0, g0});
  double err = 0;
  for (std::size_t t = 0; t <= T; ++t) {
    const auto ref = oracle::filtered(joint, xi, t);
    err = std::max(err, (beliefs[t].m - ref.mean).cwiseAbs().maxCoeff());
    err = std::max(err, (beliefs[t].gamma - ref.cov).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace

TEST_CASE("filter matches joint-Gaussian conditioning", "[cgfilter]") {
  Rng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    CHECK(max_filter_error(rng, 1, 1, 5, true) < 1e-10);
    CHECK(max_filter_error(rng, 2, 2, 5, true) < 1e-10);
    CHECK(max_filter_error(rng, 2, 1, 4, true) < 1e-10);
    CHECK(max_filter_error(rng, 1, 3, 4, true) < 1e-10);
    CHECK(max_filter_error(rng, 3, 2, 3, false) < 1e-10);
  }
}

TEST_CASE("filter accepts a point-mass initial belief", "[cgfilter]") {
  Rng rng(7);
  std::vector<SystemParams<double>> params(4, SystemParams<double>::unit_root(0.3, -0.1, 0.2));
  const VectorXd m0 = VectorXd::Constant(1, 1.5);
  const MatrixXd g0 = MatrixXd::Zero(1, 1);
  const auto joint = oracle::build_joint(params, m0, g0);
  const auto xi = oracle::simulate_observations(joint, rng);
  const auto beliefs = run_filter(params, xi, GaussianBelief<double>::point(m0));
  for (std::size_t t = 0; t <= 4; ++t) {
    const auto ref = oracle::filtered(joint, xi, t);
    CHECK(std::abs(beliefs[t].m[0] - ref.mean[0]) < 1e-12);
    CHECK(std::abs(beliefs[t].gamma(0, 0) - ref.cov(0, 0)) < 1e-12);
  }
}

TEST_CASE("exact observation of the state collapses the belief", "[cgfilter]") {
  // xi(t+1) = theta(t+1) with no measurement noise: B∘B - C S^+ C^T has to
  // vanish and the filtered mean equals the observation.
  auto p = SystemParams<double>::unit_root(0.5, 0.0, 0.0);
  FilterState<double> s{0, GaussianBelief<double>{VectorXd::Constant(1, 0.0), MatrixXd::Constant(1, 1, 2.0)}};
  const auto next = filter_step_reparam(s, p, VectorXd::Constant(1, 0.7));
  CHECK(std::abs(next.belief.m[0] - 0.7) < 1e-15);
  CHECK(next.belief.gamma(0, 0) == 0.0);

  // Fully degenerate observation (B∘B = 0 and A1 = 0) leaves the prediction.
  auto q = SystemParams<double>::zeros(1, 1);
  q.a1(0, 0) = 1;
  q.b1(0, 0) = 0.5;
  q.A1t(0, 0) = 0;
  const auto pred = filter_step_reparam(s, q, VectorXd::Constant(1, 3.0));
  CHECK(pred.belief.m[0] == 0.0);
  CHECK(std::abs(pred.belief.gamma(0, 0) - 2.25) < 1e-15);
}

TEST_CASE("filter error reporting", "[cgfilter]") {
  const auto p = SystemParams<double>::unit_root(0.5, 0.1, 0.2);
  FilterState<double> s{0, GaussianBelief<double>::point(VectorXd::Zero(1))};
  CHECK_THROWS_AS(filter_step_reparam(s, p, VectorXd::Zero(2)), DimensionMismatch);
  VectorXd bad(1);
  bad << std::numeric_limits<double>::quiet_NaN();
  try {
    filter_step_reparam(s, p, bad);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.step() == 1);
  }
  std::vector<SystemParams<double>> params(2, p);
  CHECK_THROWS_AS(run_filter(params, std::vector<VectorXd>(3, VectorXd::Zero(1)),
                             GaussianBelief<double>::point(VectorXd::Zero(1))),
                  DimensionMismatch);
}

TEST_CASE("float instantiation tracks double", "[cgfilter]") {
  const auto pd = SystemParams<double>::unit_root(0.5, -0.1, 0.2);
  SystemParams<float> pf{pd.a0.cast<float>(),  pd.a1.cast<float>(),  pd.b1.cast<float>(),  pd.b2.cast<float>(),
                         pd.A0t.cast<float>(), pd.A1t.cast<float>(), pd.B1t.cast<float>(), pd.B2t.cast<float>()};
  FilterState<double> sd{0, GaussianBelief<double>{VectorXd::Zero(1), MatrixXd::Constant(1, 1, 0.1)}};
  FilterState<float> sf{0, GaussianBelief<float>{Vec<float>::Zero(1), Mat<float>::Constant(1, 1, 0.1f)}};
  for (int t = 0; t < 20; ++t) {
    const double x = 0.05 * t;
    sd = filter_step_reparam(sd, pd, VectorXd::Constant(1, x));
    sf = filter_step_reparam(sf, pf, Vec<float>::Constant(1, static_cast<float>(x)));
  }
  CHECK(std::abs(sd.belief.m[0] - sf.belief.m[0]) < 1e-5);
  CHECK(std::abs(sd.belief.gamma(0, 0) - sf.belief.gamma(0, 0)) < 1e-5);
}
