#pragma once

// Generalized forward-filtering backward-sampling.
//
// With correlated transition and measurement noise, xi(t+1) is not
// conditionally independent of theta(t) given theta(t+1). The backward factor
// is p(xi(t+1) | theta(t+1), theta(t)) p(theta(t+1) | theta(t)) p(theta(t) | xi^t),
// a Gaussian in theta(t) with precision V^-1 and linear term W:
//
//   J      = B∘b (b∘b)^+                 (B∘b = (b∘B)^T)
//   H      = A1 - J a1
//   Sigma  = B∘B - J (B∘b)^T
//   V^-1   = H^T Sigma^+ H + a1^T (b∘b)^+ a1 + gamma^+
//   W      = H^T Sigma^+ (xi(t+1) - A0 - J (theta(t+1) - a0))
//            + a1^T (b∘b)^+ (theta(t+1) - a0) + gamma^+ m
//
// When gamma(t) is singular theta(t) is known exactly along null(gamma), so
// the draw is restricted to m + range(gamma).

#include <vector>

#include "cgseq/cgfilter.hpp"

namespace cgseq {

template <typename Scalar>
struct BackwardKernel {
  Mat<Scalar> V;      // conditional covariance of theta(t)
  Vec<Scalar> W;      // precision-weighted mean component
  Mat<Scalar> Sigma;  // Cov(xi(t+1) | theta(t+1), theta(t))
  Vec<Scalar> mean;   // conditional mean; equals V W when gamma(t) is full rank
};

template <typename Scalar>
BackwardKernel<Scalar> backward_kernel(const OriginalParams<Scalar>& p,
                                       const GaussianBelief<Scalar>& belief,
                                       const std::type_identity_t<Vec<Scalar>>& theta_next,
                                       const std::type_identity_t<Vec<Scalar>>& xi_next,
                                       std::size_t step = 0) {
  const auto k = p.state_dim();
  const auto& d = p.obs;
  if (belief.m.size() != k || theta_next.size() != k || xi_next.size() != p.obs_dim())
    throw DimensionMismatch("backward_kernel: dims do not match params");

  const NoiseProducts<Scalar> np(p);
  const Mat<Scalar> bb_inv = pinv_psd_unchecked<Scalar>(np.bb);
  const Mat<Scalar> Bb = np.bB.transpose();
  const Mat<Scalar> J = Bb * bb_inv;
  const Mat<Scalar> H = d.A1 - J * p.a1;

  BackwardKernel<Scalar> out;
  out.Sigma = symmetrize(np.BB - J * np.bB);
  const Mat<Scalar> sigma_inv =
      pinv_psd_unchecked<Scalar>(out.Sigma, Scalar(kPinvTol), max_eigenvalue(np.BB));

  const PsdEigen<Scalar> gamma_eig(symmetrize(belief.gamma), Scalar(kPinvTol), Scalar(0));
  const Mat<Scalar> gamma_inv = gamma_eig.pinv();

  const Vec<Scalar> dtheta = theta_next - p.a0;
  const Mat<Scalar> Ht_sigma_inv = H.transpose() * sigma_inv;
  const Mat<Scalar> a1t_bb_inv = p.a1.transpose() * bb_inv;

  const Mat<Scalar> precision =
      symmetrize(Ht_sigma_inv * H + a1t_bb_inv * p.a1 + gamma_inv);
  out.W = Ht_sigma_inv * (xi_next - d.A0 - J * dtheta) + a1t_bb_inv * dtheta + gamma_inv * belief.m;

  if (gamma_eig.rank == k) {
    out.V = pinv_psd_unchecked<Scalar>(precision);
    out.mean = out.V * out.W;
  } else if (gamma_eig.rank == 0) {
    out.V = Mat<Scalar>::Zero(k, k);
    out.mean = belief.m;
  } else {
    const Mat<Scalar> U = gamma_eig.range_basis();
    const Mat<Scalar> reduced_inv =
        pinv_psd_unchecked<Scalar>(symmetrize(U.transpose() * precision * U));
    out.V = symmetrize(U * reduced_inv * U.transpose());
    out.mean = belief.m + out.V * (out.W - precision * belief.m);
  }
  if (!out.V.allFinite() || !out.mean.allFinite())
    throw DegenerateState("backward kernel is not finite", step);
  return out;
}

/// Draw from N(mean, cov) for a possibly rank-deficient covariance.
template <typename Scalar>
Vec<Scalar> draw_gaussian(const Vec<Scalar>& mean, const Mat<Scalar>& cov, Rng& rng) {
  if (mean.size() == 1) {
    Vec<Scalar> r(1);
    r[0] = mean[0] + (cov(0, 0) > Scalar(0) ? std::sqrt(cov(0, 0)) : Scalar(0)) * Scalar(rng.normal());
    return r;
  }
  return mean + psd_sqrt<Scalar>(cov) * rng.normal_vector<Scalar>(mean.size());
}

/// Backward sampling pass over precomputed forward beliefs.
/// `beliefs` has T + 1 entries (as returned by run_filter).
template <typename Scalar>
LatentPath<Scalar> backward_sample(const std::vector<SystemParams<Scalar>>& params,
                                   const std::vector<Vec<Scalar>>& xi,
                                   const std::vector<GaussianBelief<Scalar>>& beliefs,
                                   Rng& rng) {
  const std::size_t T = xi.size();
  if (params.size() != T || beliefs.size() != T + 1)
    throw DimensionMismatch("backward_sample: inconsistent lengths");
  LatentPath<Scalar> path(T + 1);
  path[T] = draw_gaussian(beliefs[T].m, beliefs[T].gamma, rng);
  for (std::size_t t = T; t-- > 0;) {
    const auto kernel = backward_kernel(to_original(params[t]), beliefs[t], path[t + 1], xi[t], t);
    path[t] = draw_gaussian(kernel.mean, kernel.V, rng);
  }
  return path;
}

/// Joint posterior draw of theta(0..T) given xi(1..T). xi[t] holds xi(t+1)
/// and params[t] the coefficients of the step t -> t+1.
template <typename Scalar>
LatentPath<Scalar> sample_path(const std::vector<SystemParams<Scalar>>& params,
                               const std::vector<Vec<Scalar>>& xi,
                               const GaussianBelief<Scalar>& init,
                               Rng& rng) {
  const auto beliefs = run_filter(params, xi, init);
  return backward_sample(params, xi, beliefs, rng);
}

}  // namespace cgseq
