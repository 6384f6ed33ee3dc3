#pragma once

// k = l = 1 fast path of the filter and G-FFBS kernel. Same algebra and the
// same pseudo-inverse cutoffs as the matrix code in cgfilter.hpp/gffbs.hpp,
// without heap-allocated 1x1 matrices. Used by the integrated-variance
// sampler, where T runs to tens of thousands of steps per iteration.

#include <cmath>
#include <vector>

#include "cgseq/linalg.hpp"

namespace cgseq {

template <typename Scalar>
struct ScalarSystem {
  Scalar a0 = 0, a1 = 1, b1 = 0, b2 = 0;
  Scalar A0t = 0, A1t = 1, B1t = 0, B2t = 0;

  static ScalarSystem unit_root(Scalar b1, Scalar B1t, Scalar B2t) {
    ScalarSystem s;
    s.b1 = b1;
    s.B1t = B1t;
    s.B2t = B2t;
    return s;
  }

  SystemParams<Scalar> to_matrix() const {
    auto p = SystemParams<Scalar>::zeros(1, 1);
    p.a0[0] = a0;
    p.a1(0, 0) = a1;
    p.b1(0, 0) = b1;
    p.b2(0, 0) = b2;
    p.A0t[0] = A0t;
    p.A1t(0, 0) = A1t;
    p.B1t(0, 0) = B1t;
    p.B2t(0, 0) = B2t;
    return p;
  }
};

template <typename Scalar>
struct ScalarBelief {
  Scalar m = 0;
  Scalar gamma = 0;
};

template <typename Scalar>
struct ScalarKernel {
  Scalar V = 0;
  Scalar mean = 0;
};

namespace detail {

template <typename Scalar>
struct ScalarOriginal {
  Scalar A0, A1, bb, bB, BB;

  explicit ScalarOriginal(const ScalarSystem<Scalar>& s)
      : A0(s.A0t + s.A1t * s.a0), A1(s.A1t * s.a1) {
    const Scalar B1 = s.A1t * s.b1 + s.B1t;
    const Scalar B2 = s.A1t * s.b2 + s.B2t;
    bb = s.b1 * s.b1 + s.b2 * s.b2;
    bB = s.b1 * B1 + s.b2 * B2;
    BB = B1 * B1 + B2 * B2;
  }
};

}  // namespace detail

template <typename Scalar>
ScalarBelief<Scalar> scalar_filter_step(const ScalarBelief<Scalar>& b, const ScalarSystem<Scalar>& s,
                                        Scalar xi_next) {
  const detail::ScalarOriginal<Scalar> o(s);
  const Scalar tol(kPinvTol);
  const Scalar cross = o.bB + s.a1 * b.gamma * o.A1;
  const Scalar innov = o.BB + o.A1 * b.gamma * o.A1;
  const Scalar gain = cross * detail::pinv_scalar(innov, tol, Scalar(0));
  const Scalar pred = s.a1 * b.gamma * s.a1 + o.bb;
  ScalarBelief<Scalar> next;
  next.m = s.a0 + s.a1 * b.m + gain * (xi_next - o.A0 - o.A1 * b.m);
  next.gamma = pred - gain * cross;
  if (!(next.gamma > tol * std::max(next.gamma, pred))) next.gamma = Scalar(0);
  return next;
}

template <typename Scalar>
ScalarKernel<Scalar> scalar_backward_kernel(const ScalarSystem<Scalar>& s, const ScalarBelief<Scalar>& b,
                                            Scalar theta_next, Scalar xi_next) {
  const detail::ScalarOriginal<Scalar> o(s);
  const Scalar tol(kPinvTol);
  const Scalar bb_inv = detail::pinv_scalar(o.bb, tol, Scalar(0));
  const Scalar J = o.bB * bb_inv;
  const Scalar H = o.A1 - J * s.a1;
  const Scalar sigma = o.BB - J * o.bB;
  const Scalar sigma_inv = detail::pinv_scalar(sigma, tol, o.BB);
  const Scalar gamma_inv = detail::pinv_scalar(b.gamma, tol, Scalar(0));
  const Scalar dtheta = theta_next - s.a0;

  ScalarKernel<Scalar> k;
  if (gamma_inv == Scalar(0)) {
    k.mean = b.m;
    return k;
  }
  const Scalar precision = H * sigma_inv * H + s.a1 * bb_inv * s.a1 + gamma_inv;
  const Scalar W = H * sigma_inv * (xi_next - o.A0 - J * dtheta) + s.a1 * bb_inv * dtheta + gamma_inv * b.m;
  k.V = detail::pinv_scalar(precision, tol, Scalar(0));
  k.mean = k.V * W;
  return k;
}

/// Scalar G-FFBS over a whole series. xi holds xi(1..T); systems[t] the step
/// t -> t+1. `beliefs` is scratch storage reused across calls. Writes
/// theta(0..T) into `path`.
template <typename Scalar>
void scalar_sample_path(const std::vector<ScalarSystem<Scalar>>& systems, const std::vector<Scalar>& xi,
                        const ScalarBelief<Scalar>& init, Rng& rng, std::vector<ScalarBelief<Scalar>>& beliefs,
                        std::vector<Scalar>& path) {
  const std::size_t T = xi.size();
  if (systems.size() != T && systems.size() != 1)
    throw DimensionMismatch("scalar_sample_path: systems must have length T or 1");
  auto sys = [&](std::size_t t) -> const ScalarSystem<Scalar>& { return systems.size() == 1 ? systems[0] : systems[t]; };

  beliefs.resize(T + 1);
  path.resize(T + 1);
  beliefs[0] = init;
  for (std::size_t t = 0; t < T; ++t) {
    beliefs[t + 1] = scalar_filter_step(beliefs[t], sys(t), xi[t]);
    if (!std::isfinite(beliefs[t + 1].m) || !std::isfinite(beliefs[t + 1].gamma))
      throw NumericalFailure("filter produced non-finite belief", t + 1);
  }
  const auto& last = beliefs[T];
  path[T] = last.m + (last.gamma > Scalar(0) ? std::sqrt(last.gamma) : Scalar(0)) * Scalar(rng.normal());
  for (std::size_t t = T; t-- > 0;) {
    const auto k = scalar_backward_kernel(sys(t), beliefs[t], path[t + 1], xi[t]);
    if (!std::isfinite(k.mean) || !std::isfinite(k.V)) throw DegenerateState("backward kernel is not finite", t);
    path[t] = k.mean + (k.V > Scalar(0) ? std::sqrt(k.V) : Scalar(0)) * Scalar(rng.normal());
  }
}

}  // namespace cgseq
