#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "igw/errors.hpp"

namespace igw {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

constexpr double kSymmetryTol = 1e-12;
constexpr double kPivotTol = 1e-12;

inline Index vech_length(Index d) { return d * (d + 1) / 2; }

// Inverse of vech_length; throws unless n is a triangular number.
Index dim_from_vech_length(Index n);

template <typename Derived>
Vec<typename Derived::Scalar> vec(const Eigen::MatrixBase<Derived>& M)
{
    using S = typename Derived::Scalar;
    Mat<S> tmp = M;
    return Eigen::Map<const Vec<S>>(tmp.data(), tmp.size());
}

template <typename Derived>
Mat<typename Derived::Scalar> vec_inverse(const Eigen::MatrixBase<Derived>& a, Index d)
{
    using S = typename Derived::Scalar;
    if (a.size() != d * d)
        throw DimensionMismatch("vec_inverse: length " + std::to_string(a.size()) +
                                " is not " + std::to_string(d) + "^2");
    Vec<S> tmp = a;
    return Eigen::Map<const Mat<S>>(tmp.data(), d, d);
}

// Checks |M - M^T| <= tol * max|M| and returns (M + M^T)/2.
template <typename Derived>
Mat<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& M,
                                          double tol = kSymmetryTol)
{
    using S = typename Derived::Scalar;
    using std::abs;
    if (M.rows() != M.cols())
        throw DimensionMismatch("expected a square matrix, got " + std::to_string(M.rows()) +
                                "x" + std::to_string(M.cols()));
    const double scale = M.size() == 0 ? 0.0 : static_cast<double>(M.cwiseAbs().maxCoeff());
    const double asym = M.size() == 0 ? 0.0 : static_cast<double>((M - M.transpose()).cwiseAbs().maxCoeff());
    if (asym > tol * std::max(scale, 1e-300) && asym > 0.0)
        throw AsymmetricInput("matrix is not symmetric (max |M - M^T| = " + std::to_string(asym) + ")");
    Mat<S> out = (M + M.transpose()) / S(2);
    return out;
}

template <typename Derived>
Vec<typename Derived::Scalar> vech(const Eigen::MatrixBase<Derived>& M)
{
    using S = typename Derived::Scalar;
    const Mat<S> A = symmetrized(M);
    const Index d = A.rows();
    Vec<S> v(vech_length(d));
    Index k = 0;
    for (Index j = 0; j < d; ++j)
        for (Index i = j; i < d; ++i) v(k++) = A(i, j);
    return v;
}

// Symmetric matrix whose vech is v.
template <typename Derived>
Mat<typename Derived::Scalar> vech_inverse(const Eigen::MatrixBase<Derived>& v)
{
    using S = typename Derived::Scalar;
    const Index d = dim_from_vech_length(v.size());
    Mat<S> A(d, d);
    Index k = 0;
    for (Index j = 0; j < d; ++j)
        for (Index i = j; i < d; ++i) {
            A(i, j) = v(k);
            A(j, i) = v(k);
            ++k;
        }
    return A;
}

template <typename Scalar = double>
Mat<Scalar> make_duplication(Index d)
{
    Mat<Scalar> D = Mat<Scalar>::Zero(d * d, vech_length(d));
    Index k = 0;
    for (Index j = 0; j < d; ++j)
        for (Index i = j; i < d; ++i) {
            D(i + j * d, k) = Scalar(1);
            D(j + i * d, k) = Scalar(1);
            ++k;
        }
    return D;
}

// (D^T D)^{-1} D^T, written out: D^T D is diagonal with 1 on diagonal slots and 2 elsewhere.
template <typename Scalar = double>
Mat<Scalar> make_duplication_pinv(Index d)
{
    Mat<Scalar> P = Mat<Scalar>::Zero(vech_length(d), d * d);
    Index k = 0;
    for (Index j = 0; j < d; ++j)
        for (Index i = j; i < d; ++i) {
            if (i == j) {
                P(k, i + j * d) = Scalar(1);
            } else {
                P(k, i + j * d) = Scalar(0.5);
                P(k, j + i * d) = Scalar(0.5);
            }
            ++k;
        }
    return P;
}

// Cached per dimension; references stay valid for the program lifetime.
const MatrixXd& duplication(Index d);
const MatrixXd& duplication_pinv(Index d);

// D_d^T vec(M) for symmetric M: vech(M) with off-diagonal entries doubled.
template <typename Derived>
Vec<typename Derived::Scalar> dup_t_vec(const Eigen::MatrixBase<Derived>& M)
{
    using S = typename Derived::Scalar;
    const Mat<S> A = symmetrized(M);
    const Index d = A.rows();
    Vec<S> v(vech_length(d));
    Index k = 0;
    for (Index j = 0; j < d; ++j)
        for (Index i = j; i < d; ++i) v(k++) = (i == j) ? A(i, j) : S(2) * A(i, j);
    return v;
}

// vec^{-1}(D_d^{+T} v): diagonal slots copied, off-diagonal slots halved.
template <typename Derived>
Mat<typename Derived::Scalar> pinv_t_unvec(const Eigen::MatrixBase<Derived>& v)
{
    using S = typename Derived::Scalar;
    const Index d = dim_from_vech_length(v.size());
    Mat<S> A(d, d);
    Index k = 0;
    for (Index j = 0; j < d; ++j)
        for (Index i = j; i < d; ++i) {
            const S x = (i == j) ? v(k) : v(k) / S(2);
            A(i, j) = x;
            A(j, i) = x;
            ++k;
        }
    return A;
}

template <typename Derived>
bool is_spd(const Eigen::MatrixBase<Derived>& M)
{
    using S = typename Derived::Scalar;
    if (M.rows() != M.cols() || M.rows() == 0) return false;
    if (!M.allFinite()) return false;
    const Mat<S> A = symmetrized(M);
    const double maxdiag = static_cast<double>(A.diagonal().maxCoeff());
    if (!(maxdiag > 0.0)) return false;
    Eigen::LDLT<Mat<S>> ldlt(A);
    if (ldlt.info() != Eigen::Success) return false;
    const auto D = ldlt.vectorD();
    for (Index i = 0; i < D.size(); ++i)
        if (!(static_cast<double>(D(i)) > kPivotTol * maxdiag)) return false;
    return true;
}

template <typename Scalar = double>
Mat<Scalar> blockdiag(const std::vector<Mat<Scalar>>& blocks)
{
    Index rows = 0, cols = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
        cols += b.cols();
    }
    Mat<Scalar> out = Mat<Scalar>::Zero(rows, cols);
    Index r = 0, c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

// Inverse of a symmetric positive definite matrix; throws NumericalFailure otherwise.
MatrixXd spd_inverse(const MatrixXd& M);

// Inverse of a symmetric (possibly indefinite) invertible matrix, symmetrized.
MatrixXd sym_inverse(const MatrixXd& M);

}  // namespace igw
