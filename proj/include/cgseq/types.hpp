#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cgseq {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatXd = Mat<double>;
using VecXd = Vec<double>;

// Error types. Everything derives from std::runtime_error or
// std::invalid_argument so callers can catch coarsely.

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a recursion produces non-finite numbers. Carries the step.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class DegenerateState : public std::runtime_error {
 public:
  DegenerateState(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// One step's coefficient set of the reparameterized system
///
///   theta(t+1) = a0 + a1 theta(t)   + b1 e1(t+1) + b2 e2(t+1)
///   xi(t+1)    = A0t + A1t theta(t+1) + B1t e1(t+1) + B2t e2(t+1)
///
/// with state dimension k and observation dimension l. e1 is k-dimensional,
/// e2 is l-dimensional, both standard Gaussian and mutually independent.
template <typename Scalar>
struct SystemParams {
  Vec<Scalar> a0;   // k
  Mat<Scalar> a1;   // k x k
  Mat<Scalar> b1;   // k x k
  Mat<Scalar> b2;   // k x l
  Vec<Scalar> A0t;  // l
  Mat<Scalar> A1t;  // l x k
  Mat<Scalar> B1t;  // l x k
  Mat<Scalar> B2t;  // l x l

  Eigen::Index state_dim() const { return a0.size(); }
  Eigen::Index obs_dim() const { return A0t.size(); }

  void validate() const {
    const auto k = state_dim();
    const auto l = obs_dim();
    auto check = [](bool ok, const char* name) {
      if (!ok) throw DimensionMismatch(std::string("SystemParams: bad shape for ") + name);
    };
    check(a1.rows() == k && a1.cols() == k, "a1");
    check(b1.rows() == k && b1.cols() == k, "b1");
    check(b2.rows() == k && b2.cols() == l, "b2");
    check(A1t.rows() == l && A1t.cols() == k, "A1t");
    check(B1t.rows() == l && B1t.cols() == k, "B1t");
    check(B2t.rows() == l && B2t.cols() == l, "B2t");
  }

  /// All-zero coefficients of the given dimensions.
  static SystemParams zeros(Eigen::Index k, Eigen::Index l) {
    return {Vec<Scalar>::Zero(k),    Mat<Scalar>::Zero(k, k), Mat<Scalar>::Zero(k, k),
            Mat<Scalar>::Zero(k, l), Vec<Scalar>::Zero(l),    Mat<Scalar>::Zero(l, k),
            Mat<Scalar>::Zero(l, k), Mat<Scalar>::Zero(l, l)};
  }

  /// Scalar system in the integrated-variance form: a0 = A0t = b2 = 0,
  /// a1 = A1t = 1.
  static SystemParams unit_root(Scalar b1, Scalar B1t, Scalar B2t) {
    auto p = zeros(1, 1);
    p.a1(0, 0) = 1;
    p.A1t(0, 0) = 1;
    p.b1(0, 0) = b1;
    p.B1t(0, 0) = B1t;
    p.B2t(0, 0) = B2t;
    return p;
  }
};

/// Observation coefficients of the original form
///   xi(t+1) = A0 + A1 theta(t) + B1 e1(t+1) + B2 e2(t+1).
template <typename Scalar>
struct DerivedParams {
  Vec<Scalar> A0;  // l
  Mat<Scalar> A1;  // l x k
  Mat<Scalar> B1;  // l x k
  Mat<Scalar> B2;  // l x l
};

/// Transition block plus original-form observation block: everything the
/// one-step filter consumes.
template <typename Scalar>
struct OriginalParams {
  Vec<Scalar> a0;
  Mat<Scalar> a1;
  Mat<Scalar> b1;
  Mat<Scalar> b2;
  DerivedParams<Scalar> obs;

  Eigen::Index state_dim() const { return a0.size(); }
  Eigen::Index obs_dim() const { return obs.A0.size(); }
};

template <typename Scalar>
struct GaussianBelief {
  Vec<Scalar> m;
  Mat<Scalar> gamma;

  static GaussianBelief point(const Vec<Scalar>& m) {
    return {m, Mat<Scalar>::Zero(m.size(), m.size())};
  }
};

/// Sampled latent trajectory theta(0), ..., theta(T).
template <typename Scalar>
using LatentPath = std::vector<Vec<Scalar>>;

/// Seedable source of standard Gaussians, uniforms and gamma variates.
/// Single owner; never share one instance between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream for (seed, stream) pairs, e.g. one per simulated day.
  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
    Rng r;
    r.engine_.seed(seq);
    return r;
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Gamma(shape, scale = 1).
  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }

  /// Inverse gamma with density proportional to x^{-shape-1} exp(-scale / x).
  double inverse_gamma(double shape, double scale) { return scale / gamma(shape); }

  template <typename Scalar = double>
  Vec<Scalar> normal_vector(Eigen::Index n) {
    Vec<Scalar> z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = static_cast<Scalar>(normal());
    return z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace cgseq
