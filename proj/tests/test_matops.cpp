#include "doctest.h"

#include "igw/matops.hpp"
#include "oracles.hpp"

using namespace igw;

namespace {

// D_d from its definition: column k of D holds vec(E_ij + E_ji) (or vec(E_ii)) for the k-th vech slot.
MatrixXd duplication_by_definition(Index d)
{
    MatrixXd D = MatrixXd::Zero(d * d, vech_length(d));
    Index k = 0;
    for (Index j = 0; j < d; ++j)
        for (Index i = j; i < d; ++i) {
            MatrixXd E = MatrixXd::Zero(d, d);
            E(i, j) = 1.0;
            E(j, i) = 1.0;
            D.col(k++) = Eigen::Map<VectorXd>(E.data(), d * d);
        }
    return D;
}

}  // namespace

TEST_CASE("vec stacks columns")
{
    MatrixXd M(2, 2);
    M << 1, 2, 3, 4;
    const VectorXd v = vec(M);
    CHECK(v == (VectorXd(4) << 1, 3, 2, 4).finished());
    CHECK(vec(MatrixXd::Identity(2, 2)) == (VectorXd(4) << 1, 0, 0, 1).finished());
}

TEST_CASE("vec_inverse examples and round trips")
{
    const MatrixXd M = vec_inverse((VectorXd(4) << 1, 3, 2, 4).finished(), 2);
    CHECK(M == (MatrixXd(2, 2) << 1, 2, 3, 4).finished());
    CHECK(vec_inverse((VectorXd(1) << 7).finished(), 1)(0, 0) == 7.0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    MatrixXd R(3, 3);
    for (Index i = 0; i < 9; ++i) R(i) = z(rng);
    CHECK(vec_inverse(vec(R), 3) == R);
    VectorXd a(9);
    for (Index i = 0; i < 9; ++i) a(i) = z(rng);
    CHECK(vec(vec_inverse(a, 3)) == a);
    CHECK_THROWS_AS(vec_inverse(a, 2), DimensionMismatch);
}

TEST_CASE("vech takes the lower triangle column by column")
{
    MatrixXd A(2, 2);
    A << 1.5, 2.5, 2.5, 3.5;
    CHECK(vech(A) == (VectorXd(3) << 1.5, 2.5, 3.5).finished());
    CHECK(vech((MatrixXd(1, 1) << 5).finished()) == (VectorXd(1) << 5).finished());
    MatrixXd B(2, 2);
    B << 1, 2, 2, 3;
    CHECK(duplication(2) * vech(B) == (VectorXd(4) << 1, 2, 2, 3).finished());
    MatrixXd bad(2, 2);
    bad << 1, 2, 3, 4;
    CHECK_THROWS_AS(vech(bad), AsymmetricInput);
}

TEST_CASE("duplication matrix")
{
    MatrixXd D2(4, 3);
    D2 << 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1;
    CHECK(duplication(2) == D2);
    CHECK(duplication(1) == MatrixXd::Ones(1, 1));
    std::mt19937_64 rng(5);
    for (Index d : {1, 2, 3, 4, 5}) CHECK(duplication(d) == duplication_by_definition(d));
    const MatrixXd& D3 = duplication(3);
    CHECK(D3.rows() == 9);
    CHECK(D3.cols() == 6);
    for (int r = 0; r < 20; ++r) {
        const MatrixXd A = oracle::random_symmetric(3, rng);
        CHECK(D3 * vech(A) == vec(A));
    }
    CHECK(make_duplication<float>(2).cast<double>() == D2);
}

TEST_CASE("duplication pseudo-inverse")
{
    MatrixXd P2(3, 4);
    P2 << 1, 0, 0, 0, 0, 0.5, 0.5, 0, 0, 0, 0, 1;
    CHECK(duplication_pinv(2) == P2);
    CHECK(duplication_pinv(1) == MatrixXd::Ones(1, 1));
    // (D^T D)^{-1} D^T evaluated directly.
    for (Index d : {2, 3, 4}) {
        const MatrixXd D = duplication_by_definition(d);
        const MatrixXd ref = (D.transpose() * D).inverse() * D.transpose();
        CHECK((duplication_pinv(d) - ref).cwiseAbs().maxCoeff() < 1e-15);
    }
    std::mt19937_64 rng(7);
    for (int r = 0; r < 20; ++r) {
        const MatrixXd A = oracle::random_symmetric(4, rng);
        CHECK((duplication_pinv(4) * vec(A) - vech(A)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("duplication identities on random symmetric matrices")
{
    std::mt19937_64 rng(11);
    for (Index d : {1, 2, 3, 5}) {
        const MatrixXd& D = duplication(d);
        const MatrixXd& P = duplication_pinv(d);
        CHECK((P * D - MatrixXd::Identity(vech_length(d), vech_length(d))).cwiseAbs().maxCoeff() < 1e-13);
        for (int r = 0; r < 10; ++r) {
            const MatrixXd A = oracle::random_symmetric(d, rng);
            CHECK(D * vech(A) == vec(A));
            CHECK((P * vec(A) - vech(A)).cwiseAbs().maxCoeff() < 1e-13);
            CHECK(vech_inverse(vech(A)) == A);
            CHECK(vec_inverse(D * vech(A), d) == A);
            // Fast forms of D^T vec(M) and vec^{-1}(D^{+T} v).
            CHECK((dup_t_vec(A) - D.transpose() * vec(A)).cwiseAbs().maxCoeff() < 1e-14);
            const VectorXd v = vech(A);
            CHECK((pinv_t_unvec(v) - vec_inverse(P.transpose() * v, d)).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("vech length helpers")
{
    CHECK(vech_length(4) == 10);
    CHECK(dim_from_vech_length(10) == 4);
    CHECK(dim_from_vech_length(1) == 1);
    CHECK_THROWS_AS(dim_from_vech_length(4), DimensionMismatch);
}

TEST_CASE("is_spd")
{
    CHECK(is_spd(MatrixXd::Identity(3, 3)));
    CHECK_FALSE(is_spd((MatrixXd(2, 2) << 1, 2, 2, 1).finished()));
    std::mt19937_64 rng(13);
    std::normal_distribution<double> z;
    for (int r = 0; r < 10; ++r) {
        MatrixXd A(4, 4);
        for (Index i = 0; i < 16; ++i) A(i) = z(rng);
        CHECK(is_spd(A.transpose() * A + 1e-6 * MatrixXd::Identity(4, 4)));
    }
    CHECK_FALSE(is_spd(MatrixXd::Zero(2, 2)));
    CHECK_FALSE(is_spd(MatrixXd(0, 0)));
}

TEST_CASE("blockdiag")
{
    const MatrixXd two = blockdiag<double>({MatrixXd::Constant(1, 1, 1.0), MatrixXd::Constant(1, 1, 2.0)});
    CHECK(two == (MatrixXd(2, 2) << 1, 0, 0, 2).finished());
    const MatrixXd empty = blockdiag<double>({});
    CHECK(empty.rows() == 0);
    CHECK(empty.cols() == 0);
    MatrixXd b(2, 1);
    b << 3, 4;
    const MatrixXd tall = blockdiag<double>({b, b});
    MatrixXd ref = MatrixXd::Zero(4, 2);
    ref.block(0, 0, 2, 1) = b;
    ref.block(2, 1, 2, 1) = b;
    CHECK(tall == ref);
}

TEST_CASE("inverses of symmetric matrices")
{
    std::mt19937_64 rng(17);
    const MatrixXd S = oracle::random_spd(3, rng);
    CHECK((spd_inverse(S) * S - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    const MatrixXd indef = (MatrixXd(2, 2) << 1, 2, 2, 1).finished();
    CHECK_THROWS_AS(spd_inverse(indef), NumericalFailure);
    CHECK((sym_inverse(indef) * indef - MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(sym_inverse(MatrixXd::Zero(2, 2)), NumericalFailure);
}
