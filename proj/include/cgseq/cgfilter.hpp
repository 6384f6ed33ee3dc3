#pragma once

// One-step filtering recursions for conditionally Gaussian sequences.
//
// Given theta(t) | xi(0..t) ~ N(m, gamma) and the original-form system
//
//   theta(t+1) = a0 + a1 theta(t) + b1 e1 + b2 e2
//   xi(t+1)    = A0 + A1 theta(t) + B1 e1 + B2 e2
//
// the posterior after observing xi(t+1) is N(m', gamma') with
//
//   C      = b∘B + a1 gamma A1^T
//   S      = B∘B + A1 gamma A1^T
//   m'     = a0 + a1 m + C S^+ (xi - A0 - A1 m)
//   gamma' = a1 gamma a1^T + b∘b - C S^+ C^T
//
// The innovation covariance S is always pseudo-inverted, so exactly
// degenerate observations (B∘B = 0) are handled.

#include <type_traits>
#include <vector>

#include "cgseq/linalg.hpp"

namespace cgseq {

template <typename Scalar>
struct FilterState {
  std::size_t t = 0;
  GaussianBelief<Scalar> belief;
};

template <typename Scalar>
void check_belief(const GaussianBelief<Scalar>& b, std::size_t step) {
  if (!b.m.allFinite() || !b.gamma.allFinite())
    throw NumericalFailure("filter produced non-finite belief", step);
}

template <typename Scalar>
FilterState<Scalar> filter_step_original(const FilterState<Scalar>& state,
                                         const OriginalParams<Scalar>& p,
                                         const std::type_identity_t<Vec<Scalar>>& xi_next) {
  const auto& m = state.belief.m;
  const auto& gamma = state.belief.gamma;
  const auto& d = p.obs;
  if (m.size() != p.state_dim() || xi_next.size() != p.obs_dim())
    throw DimensionMismatch("filter_step_original: belief/observation dims do not match params");

  const NoiseProducts<Scalar> np(p);
  const Mat<Scalar> cross = np.bB + p.a1 * gamma * d.A1.transpose();
  const Mat<Scalar> innov_cov = symmetrize(np.BB + d.A1 * gamma * d.A1.transpose());
  const Mat<Scalar> innov_inv = pinv_psd_unchecked<Scalar>(innov_cov);
  const Mat<Scalar> gain = cross * innov_inv;

  const Mat<Scalar> pred_cov = symmetrize(p.a1 * gamma * p.a1.transpose() + np.bb);

  FilterState<Scalar> next;
  next.t = state.t + 1;
  next.belief.m = p.a0 + p.a1 * m + gain * (xi_next - d.A0 - d.A1 * m);
  next.belief.gamma =
      clean_psd<Scalar>(symmetrize(pred_cov - gain * cross.transpose()), max_eigenvalue(pred_cov));
  check_belief(next.belief, next.t);
  return next;
}

template <typename Scalar>
FilterState<Scalar> filter_step_reparam(const FilterState<Scalar>& state,
                                        const SystemParams<Scalar>& p,
                                        const std::type_identity_t<Vec<Scalar>>& xi_next) {
  return filter_step_original(state, to_original(p), xi_next);
}

/// Forward pass. Returns T + 1 beliefs: the initial one followed by the
/// posterior after each observation.
template <typename Scalar>
std::vector<GaussianBelief<Scalar>> run_filter(const std::vector<SystemParams<Scalar>>& params,
                                               const std::vector<Vec<Scalar>>& xi,
                                               const GaussianBelief<Scalar>& init) {
  if (params.size() != xi.size())
    throw DimensionMismatch("run_filter: params and observations differ in length");
  std::vector<GaussianBelief<Scalar>> out;
  out.reserve(xi.size() + 1);
  FilterState<Scalar> state{0, init};
  check_belief(init, 0);
  out.push_back(init);
  for (std::size_t t = 0; t < xi.size(); ++t) {
    state = filter_step_reparam(state, params[t], xi[t]);
    out.push_back(state.belief);
  }
  return out;
}

}  // namespace cgseq
