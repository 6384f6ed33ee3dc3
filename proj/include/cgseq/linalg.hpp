#pragma once

#include <algorithm>
#include <cmath>

#include "cgseq/types.hpp"

namespace cgseq {

/// Relative eigenvalue cutoff used by every pseudo-inverse in the library.
inline constexpr double kPinvTol = 1e-12;

template <typename Derived>
auto symmetrize(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return Mat<Scalar>(Scalar(0.5) * (x + x.transpose()));
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& x, double rel_tol = 1e-12) {
  if (x.rows() != x.cols()) return false;
  const double scale = std::max(1.0, static_cast<double>(x.cwiseAbs().maxCoeff()));
  return static_cast<double>((x - x.transpose()).cwiseAbs().maxCoeff()) <= rel_tol * scale;
}

/// Eigendecomposition of a symmetric PSD matrix with eigenvalues at or below
/// tol * max(lambda_max, scale) clamped to zero.
template <typename Scalar>
struct PsdEigen {
  Vec<Scalar> values;   // clamped, ascending
  Mat<Scalar> vectors;  // orthonormal columns
  Eigen::Index rank = 0;

  PsdEigen(const Mat<Scalar>& x, Scalar tol, Scalar scale) {
    const auto n = x.rows();
    if (n == 0) return;
    if (n == 1) {
      values = x;
      vectors = Mat<Scalar>::Identity(1, 1);
    } else {
      Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(x);
      values = es.eigenvalues();
      vectors = es.eigenvectors();
    }
    const Scalar top = std::max(values.maxCoeff(), scale);
    const Scalar cut = top > Scalar(0) ? tol * top : Scalar(0);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(values[i] > cut)) {
        values[i] = Scalar(0);
      } else {
        ++rank;
      }
    }
  }

  Mat<Scalar> pinv() const {
    const auto n = values.size();
    Vec<Scalar> inv(n);
    for (Eigen::Index i = 0; i < n; ++i) inv[i] = values[i] > Scalar(0) ? Scalar(1) / values[i] : Scalar(0);
    return symmetrize(vectors * inv.asDiagonal() * vectors.transpose());
  }

  Mat<Scalar> sqrt() const {
    return vectors * values.cwiseSqrt().asDiagonal();
  }

  Mat<Scalar> reconstruct() const {
    return symmetrize(vectors * values.asDiagonal() * vectors.transpose());
  }

  /// Orthonormal basis of the retained eigenspace (n x rank).
  Mat<Scalar> range_basis() const {
    const auto n = values.size();
    Mat<Scalar> u(n, rank);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (values[i] > Scalar(0)) u.col(c++) = vectors.col(i);
    return u;
  }
};

namespace detail {

template <typename Scalar>
Scalar pinv_scalar(Scalar x, Scalar tol, Scalar scale) {
  const Scalar top = std::max(x, scale);
  const Scalar cut = top > Scalar(0) ? tol * top : Scalar(0);
  return x > cut ? Scalar(1) / x : Scalar(0);
}

}  // namespace detail

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix without argument
/// checks. Input is symmetrized first. `scale` raises the cutoff reference
/// above lambda_max(x), for matrices obtained by cancellation.
template <typename Scalar>
Mat<Scalar> pinv_psd_unchecked(const Mat<Scalar>& x, Scalar tol = Scalar(kPinvTol), Scalar scale = Scalar(0)) {
  if (x.rows() == 1) {
    Mat<Scalar> r(1, 1);
    r(0, 0) = detail::pinv_scalar(x(0, 0), tol, scale);
    return r;
  }
  return PsdEigen<Scalar>(symmetrize(x), tol, scale).pinv();
}

/// Moore-Penrose pseudo-inverse of a symmetric positive semidefinite matrix.
/// Eigenvalues at or below tol * lambda_max are treated as zero.
///
/// Throws InvalidInputError on non-finite entries and PreconditionError if x
/// is not square and symmetric to 1e-12 relative.
template <typename Derived>
Mat<typename Derived::Scalar> pinv_psd(const Eigen::MatrixBase<Derived>& x,
                                        typename Derived::Scalar tol = typename Derived::Scalar(kPinvTol)) {
  using Scalar = typename Derived::Scalar;
  if (!x.allFinite()) throw InvalidInputError("pinv_psd: non-finite entry");
  if (!is_symmetric(x)) throw PreconditionError("pinv_psd: matrix is not symmetric");
  return pinv_psd_unchecked<Scalar>(Mat<Scalar>(x), tol, Scalar(0));
}

/// Square root factor L with L L^T = x for symmetric PSD x (eigenvalue based,
/// valid for rank-deficient x).
template <typename Scalar>
Mat<Scalar> psd_sqrt(const Mat<Scalar>& x, Scalar tol = Scalar(kPinvTol)) {
  if (x.rows() == 1) {
    Mat<Scalar> r(1, 1);
    r(0, 0) = x(0, 0) > Scalar(0) ? std::sqrt(x(0, 0)) : Scalar(0);
    return r;
  }
  return PsdEigen<Scalar>(symmetrize(x), tol, Scalar(0)).sqrt();
}

/// Zero out eigenvalues of a covariance that are roundoff relative to
/// `scale`. Leaves exact PSD structure so later pseudo-inverses see true
/// zeros.
template <typename Scalar>
Mat<Scalar> clean_psd(const Mat<Scalar>& x, Scalar scale, Scalar tol = Scalar(kPinvTol)) {
  if (x.rows() == 1) {
    Mat<Scalar> r = x;
    const Scalar top = std::max(x(0, 0), scale);
    if (!(x(0, 0) > tol * top)) r(0, 0) = Scalar(0);
    return r;
  }
  PsdEigen<Scalar> e(symmetrize(x), tol, scale);
  return e.reconstruct();
}

template <typename Scalar>
Scalar max_eigenvalue(const Mat<Scalar>& x) {
  if (x.rows() == 0) return Scalar(0);
  if (x.rows() == 1) return x(0, 0);
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(symmetrize(x), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Original-form observation coefficients from the reparameterized system:
///   A0 = A0t + A1t a0,  A1 = A1t a1,  B1 = A1t b1 + B1t,  B2 = A1t b2 + B2t.
template <typename Scalar>
DerivedParams<Scalar> derive_original(const SystemParams<Scalar>& p) {
  p.validate();
  return {p.A0t + p.A1t * p.a0, p.A1t * p.a1, p.A1t * p.b1 + p.B1t, p.A1t * p.b2 + p.B2t};
}

template <typename Scalar>
OriginalParams<Scalar> to_original(const SystemParams<Scalar>& p) {
  return {p.a0, p.a1, p.b1, p.b2, derive_original(p)};
}

/// Composite noise products b∘b, b∘B, B∘B of the original form.
template <typename Scalar>
struct NoiseProducts {
  Mat<Scalar> bb;  // k x k
  Mat<Scalar> bB;  // k x l
  Mat<Scalar> BB;  // l x l

  explicit NoiseProducts(const OriginalParams<Scalar>& p)
      : bb(symmetrize(p.b1 * p.b1.transpose() + p.b2 * p.b2.transpose())),
        bB(p.b1 * p.obs.B1.transpose() + p.b2 * p.obs.B2.transpose()),
        BB(symmetrize(p.obs.B1 * p.obs.B1.transpose() + p.obs.B2 * p.obs.B2.transpose())) {}
};

}  // namespace cgseq
