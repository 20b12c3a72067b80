#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "navrec/linalg.hpp"
#include "navrec/svd.hpp"
#include "navref.hpp"

using namespace navrec;
using testutil::random_cmat;
using testutil::rel_err;

namespace {

// A = U diag(s) V^H with orthonormal factors planted via MGS.
CMat planted_matrix(std::size_t p, std::size_t n, const std::vector<double>& s,
                    std::uint64_t seed, CMat* U_out = nullptr, CMat* V_out = nullptr) {
    const std::size_t k = s.size();
    CMat U = random_cmat(p, k, seed);
    CMat V = random_cmat(n, k, seed + 1);
    mgs_orthonormalize(U);
    mgs_orthonormalize(V);
    CMat Us(p, k);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < k; ++j) Us.at(i, j) = U.at(i, j) * s[j];
    if (U_out) *U_out = U;
    if (V_out) *V_out = V;
    return matmul(Us, Op::None, V, Op::ConjTrans);
}

double frob(const CMat& A) { return det_norm2(A.a.data(), A.a.size()); }

CMat reconstruct(const SvdResult& svd) {
    CMat Us(svd.U.rows, svd.s.size());
    for (std::size_t i = 0; i < svd.U.rows; ++i)
        for (std::size_t j = 0; j < svd.s.size(); ++j) Us.at(i, j) = svd.U.at(i, j) * svd.s[j];
    return matmul(Us, Op::None, svd.V, Op::ConjTrans);
}

}  // namespace

TEST_CASE("identity matrix has unit singular values") {
    CMat I(4, 4);
    for (std::size_t i = 0; i < 4; ++i) I.at(i, i) = cd(1, 0);
    const SvdResult svd = truncated_svd(I, 4);
    for (double s : svd.s) CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rank-1 outer product") {
    const std::size_t p = 12, n = 7;
    CMat A(p, n);
    std::vector<cd> a(p), b(n);
    Rng rng(30);
    testutil::fill_random(a.data(), p, rng);
    testutil::fill_random(b.data(), n, rng);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < n; ++j) A.at(i, j) = a[i] * std::conj(b[j]);
    const SvdResult svd = truncated_svd(A, 1);
    const double want = det_norm2(a.data(), p) * det_norm2(b.data(), n);
    CHECK(svd.s[0] == doctest::Approx(want).epsilon(1e-10));
    CMat R = reconstruct(svd);
    for (std::size_t i = 0; i < A.size(); ++i) R.a[i] -= A.a[i];
    CHECK(frob(R) < 1e-10 * frob(A));
}

TEST_CASE("truncation error equals the discarded spectrum of the full SVD") {
    const CMat A = random_cmat(30, 50, 31);
    const SvdResult svd = truncated_svd(A, 5);
    CMat R = reconstruct(svd);
    for (std::size_t i = 0; i < A.size(); ++i) R.a[i] -= A.a[i];
    const double err_sq = frob(R) * frob(R);

    const ref::SvdRef full = ref::svd_jacobi(A);
    double tail = 0.0;
    for (std::size_t i = 5; i < full.s.size(); ++i) tail += full.s[i] * full.s[i];
    CHECK(std::abs(err_sq - tail) / tail < 1e-6);

    // leading singular values agree with the oracle too
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(svd.s[i] == doctest::Approx(full.s[i]).epsilon(1e-9));
}

TEST_CASE("planted factorization is recovered") {
    const std::vector<double> s = {10.0, 6.0, 3.0, 1.5, 0.5};
    CMat U0, V0;
    const CMat A = planted_matrix(24, 16, s, 32, &U0, &V0);

    const SvdResult svd = truncated_svd(A, 5);
    REQUIRE(svd.s.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(svd.s[i] == doctest::Approx(s[i]).epsilon(1e-9));

    // each recovered singular vector matches the planted one up to phase
    for (std::size_t j = 0; j < 5; ++j) {
        cd uv(0, 0), vv(0, 0);
        for (std::size_t i = 0; i < 24; ++i) uv += std::conj(U0.at(i, j)) * svd.U.at(i, j);
        for (std::size_t i = 0; i < 16; ++i) vv += std::conj(V0.at(i, j)) * svd.V.at(i, j);
        CHECK(std::abs(uv) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(vv) == doctest::Approx(1.0).epsilon(1e-8));
        // U and V phases must be consistent: A v = s u
        CHECK(std::abs(uv - vv) < 1e-8);
    }
}

TEST_CASE("reference Jacobi SVD is itself sound on a planted factorization") {
    // keeps the oracle honest: it must agree with a construction it never sees
    const std::vector<double> s = {4.0, 2.0, 1.0};
    const CMat A = planted_matrix(9, 6, s, 33);
    const ref::SvdRef full = ref::svd_jacobi(A);
    REQUIRE(full.s.size() == 6);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(full.s[i] == doctest::Approx(s[i]).epsilon(1e-10));
    for (std::size_t i = 3; i < 6; ++i) CHECK(full.s[i] < 1e-10);

    // orthonormal factors and exact reconstruction
    const CMat G = matmul(full.V, Op::ConjTrans, full.V, Op::None);
    for (std::size_t i = 0; i < G.rows; ++i)
        for (std::size_t j = 0; j < G.cols; ++j)
            CHECK(std::abs(G.at(i, j) - (i == j ? cd(1, 0) : cd(0, 0))) < 1e-10);
    CMat Us(9, 6);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 6; ++j) Us.at(i, j) = full.U.at(i, j) * full.s[j];
    const CMat R = matmul(Us, Op::None, full.V, Op::ConjTrans);
    CHECK(rel_err(R, A) < 1e-10);
}

TEST_CASE("wide and tall inputs transpose consistently") {
    const CMat A = random_cmat(8, 20, 34);
    const CMat At = conj_transpose(A);
    const SvdResult sa = truncated_svd(A, 4);
    const SvdResult sb = truncated_svd(At, 4);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(sa.s[i] == doctest::Approx(sb.s[i]).epsilon(1e-9));
}

TEST_CASE("V columns are orthonormal") {
    const CMat A = random_cmat(15, 40, 35);
    const SvdResult svd = truncated_svd(A, 6);
    const CMat G = matmul(svd.V, Op::ConjTrans, svd.V, Op::None);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            CHECK(std::abs(G.at(i, j) - (i == j ? cd(1, 0) : cd(0, 0))) < 1e-8);
}

TEST_CASE("singular values are non-negative and non-increasing") {
    const CMat A = random_cmat(18, 12, 36);
    const SvdResult svd = truncated_svd(A, 8);
    for (std::size_t i = 0; i < svd.s.size(); ++i) {
        CHECK(svd.s[i] >= 0.0);
        if (i) CHECK(svd.s[i] <= svd.s[i - 1] * (1.0 + 1e-12));
    }
}

TEST_CASE("rank argument is validated") {
    const CMat A = random_cmat(6, 9, 37);
    CHECK_THROWS_AS(truncated_svd(A, 0), DimensionError);
    CHECK_THROWS_AS(truncated_svd(A, 7), DimensionError);
    CMat Z(4, 4);
    CHECK_THROWS_AS(truncated_svd(Z, 2), DegenerateInputError);
}

TEST_CASE("determinism: identical input gives identical output") {
    const CMat A = random_cmat(20, 14, 38);
    const SvdResult a = truncated_svd(A, 5);
    const SvdResult b = truncated_svd(A, 5);
    CHECK(testutil::bit_equal(a.U, b.U));
    CHECK(testutil::bit_equal(a.V, b.V));
    CHECK(a.s == b.s);
}
