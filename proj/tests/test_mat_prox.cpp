#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrinorm/mat_prox.hpp"
#include "lrinorm/oracle.hpp"
#include "lrinorm/rng.hpp"

using namespace lrinorm;

namespace {

Matrix random_matrix(Rng& r, Index n, Index m) {
    Matrix M(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) M(i, j) = r.normal();
    return M;
}

// Haar-distributed orthogonal factor: QR of a Gaussian with sign fixing.
Matrix random_orthogonal(Rng& r, Index n) {
    const Matrix G = random_matrix(r, n, n);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ();
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j)
        if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    return Q;
}

Matrix random_low_rank(Rng& r, Index n, Index m, Index rank) {
    return random_matrix(r, n, rank) * random_matrix(r, rank, m) / std::sqrt(double(rank));
}

}  // namespace

TEST_CASE("thin SVD invariants") {
    Rng rng(51);
    for (int it = 0; it < 100; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const Index n = r.uniform_int(1, 12);
        const Index m = r.uniform_int(1, 12);
        const Matrix Z = random_matrix(r, n, m);
        const SvdFactors svd = thin_svd(Z);
        const Index q = std::min(n, m);
        REQUIRE(svd.sigma.size() == q);
        CHECK((svd.U.transpose() * svd.U - Matrix::Identity(q, q)).norm() <= 1e-10);
        CHECK((svd.V.transpose() * svd.V - Matrix::Identity(q, q)).norm() <= 1e-10);
        for (Index i = 0; i + 1 < q; ++i) CHECK(svd.sigma[i] >= svd.sigma[i + 1]);
        CHECK(svd.sigma[q - 1] >= 0.0);
        CHECK((svd.U * svd.sigma.asDiagonal() * svd.V.transpose() - Z).norm() <=
              1e-10 * std::max(1.0, Z.norm()));
    }
}

TEST_CASE("matrix norm examples") {
    Vector d(3);
    d << 2, 1, 1;
    Matrix Z = d.asDiagonal();
    CHECK(matrix_norm_value(Z, {NormFlavor::FrobeniusR, 2}) ==
          doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-13));
    CHECK(matrix_norm_value(Matrix::Zero(3, 4), {NormFlavor::FrobeniusR, 2}) == 0.0);
    CHECK(matrix_norm_value(Matrix::Zero(3, 4), {NormFlavor::SpectralR, 3}) == 0.0);
    CHECK_THROWS_AS(matrix_norm_value(Matrix::Zero(2, 3), {NormFlavor::FrobeniusR, 3}),
                    std::invalid_argument);
}

TEST_CASE("rank-r matrices: FrobeniusR equals Frobenius, SpectralR equals sigma_1") {
    Rng rng(52);
    for (int it = 0; it < 300; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const Index n = r.uniform_int(2, 10);
        const Index m = r.uniform_int(2, 10);
        const Index rank = r.uniform_int(1, std::min(n, m));
        const Matrix Z = random_low_rank(r, n, m, rank);
        const int rr = static_cast<int>(rank);
        const double fro = matrix_norm_value(Z, {NormFlavor::FrobeniusR, rr});
        CHECK(std::abs(fro - Z.norm()) <= 1e-10 * std::max(1.0, Z.norm()));
        const double spec = matrix_norm_value(Z, {NormFlavor::SpectralR, rr});
        const double s1 = singular_values(Z)[0];
        CHECK(std::abs(spec - s1) <= 1e-10 * std::max(1.0, s1));
    }
}

TEST_CASE("diagonal lift consistency") {
    Rng rng(53);
    for (int it = 0; it < 300; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const int q = r.uniform_int(1, 10);
        Vector d(q);
        for (int i = 0; i < q; ++i) d[i] = std::abs(r.normal());
        std::sort(d.data(), d.data() + q, std::greater<double>());
        const ScaledNorm f{{r.uniform() < 0.5 ? NormFlavor::FrobeniusR : NormFlavor::SpectralR,
                            r.uniform_int(1, q)},
                           std::pow(10.0, r.uniform(-2, 2)), r.uniform() < 0.5};
        const Matrix X = matrix_prox(Matrix(d.asDiagonal()), f).X;
        const Vector x = prox_vec(d, f).x;
        CHECK((X - Matrix(x.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("rank-1 block soft threshold") {
    Rng rng(54);
    Rng r = rng.stream("rank1");
    Vector u = Vector(5), v = Vector(4);
    for (int i = 0; i < 5; ++i) u[i] = r.normal();
    for (int i = 0; i < 4; ++i) v[i] = r.normal();
    u /= u.norm();
    v /= v.norm();
    for (double s : {0.5, 1.0, 3.0}) {
        const Matrix Z = s * u * v.transpose();
        const Matrix X = matrix_prox(Z, {{NormFlavor::FrobeniusR, 4}, 1.0, false}).X;
        const Matrix want = std::max(0.0, 1.0 - 1.0 / s) * Z;
        CHECK((X - want).norm() <= 1e-12 * std::max(1.0, Z.norm()));
    }
}

TEST_CASE("unitary invariance of the matrix prox") {
    Rng rng(55);
    for (int it = 0; it < 60; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const Index n = r.uniform_int(2, 8);
        const Index m = r.uniform_int(2, 8);
        const Matrix Z = random_matrix(r, n, m);
        const Matrix P = random_orthogonal(r, n);
        const Matrix Q = random_orthogonal(r, m);
        const ScaledNorm f{{r.uniform() < 0.5 ? NormFlavor::FrobeniusR : NormFlavor::SpectralR,
                            r.uniform_int(1, static_cast<int>(std::min(n, m)))},
                           std::pow(10.0, r.uniform(-1, 1)), r.uniform() < 0.5};
        const Matrix lhs = matrix_prox(P * Z * Q.transpose(), f).X;
        const Matrix rhs = P * matrix_prox(Z, f).X * Q.transpose();
        CHECK((lhs - rhs).norm() <= 1e-8 * std::max(1.0, Z.norm()));
    }
}

TEST_CASE("transpose equivariance") {
    Rng rng(56);
    for (int it = 0; it < 100; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const Matrix Z = random_matrix(r, r.uniform_int(1, 9), r.uniform_int(1, 9));
        const ScaledNorm f{{r.uniform() < 0.5 ? NormFlavor::FrobeniusR : NormFlavor::SpectralR,
                            r.uniform_int(1, static_cast<int>(std::min(Z.rows(), Z.cols())))},
                           std::pow(10.0, r.uniform(-1, 1)), r.uniform() < 0.5};
        const Matrix a = matrix_prox(Matrix(Z.transpose()), f).X;
        const Matrix b = matrix_prox(Z, f).X.transpose();
        CHECK((a - b).norm() <= 1e-10 * std::max(1.0, Z.norm()));
    }
}

TEST_CASE("matrix-level certificate through a fresh decomposition") {
    Rng rng(57);
    for (int it = 0; it < 100; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const Matrix Z = random_matrix(r, r.uniform_int(2, 8), r.uniform_int(2, 8));
        const ScaledNorm f{{r.uniform() < 0.5 ? NormFlavor::FrobeniusR : NormFlavor::SpectralR,
                            r.uniform_int(1, static_cast<int>(std::min(Z.rows(), Z.cols())))},
                           std::pow(10.0, r.uniform(-1, 1)), r.uniform() < 0.5};
        const Matrix X = matrix_prox(Z, f).X;
        // dual-gauge bound and pairing, evaluated on independently computed factors
        const double nx = matrix_norm_value(X, f.spec);
        const double gd = matrix_dual_norm_value(Z - X, f.spec);
        const double pairing = ((Z - X).transpose() * X).trace();
        const double scale = std::max(1.0, Z.norm());
        if (f.squared) {
            CHECK(gd <= f.gamma * nx + 1e-9 * scale);
            CHECK(std::abs(pairing - f.gamma * nx * nx) <= 1e-9 * scale * std::max(1.0, scale));
        } else {
            CHECK(gd <= f.gamma + 1e-9 * scale);
            CHECK(std::abs(pairing - f.gamma * nx) <= 1e-9 * scale * std::max(1.0, scale));
        }
        CHECK(matrix_prox(Z, f).rank == numerical_rank(X));
    }
}

TEST_CASE("Fenchel-Young equality at squared prox pairs") {
    Rng rng(58);
    for (int it = 0; it < 100; ++it) {
        Rng r = rng.stream(static_cast<std::uint64_t>(it));
        const Matrix Z = random_matrix(r, r.uniform_int(2, 8), r.uniform_int(2, 8));
        const int rr = r.uniform_int(1, static_cast<int>(std::min(Z.rows(), Z.cols())));
        const ScaledNorm f{{NormFlavor::FrobeniusR, rr}, 1.0, true};
        const Matrix X = matrix_prox(Z, f).X;
        const double nx = matrix_norm_value(X, f.spec);
        const Vector sd = singular_values(Z - X);
        const double gd = truncated_gauge(make_profile(sd), TruncEll::L2, rr);
        const double lhs = ((Z - X).transpose() * X).trace();
        const double rhs = 0.5 * nx * nx + 0.5 * gd * gd;
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("epigraph projection") {
    // already inside: unchanged
    Rng r(59);
    const Matrix Z = random_matrix(r, 3, 3);
    const NormSpec spec{NormFlavor::FrobeniusR, 2};
    const double nz = matrix_norm_value(Z, spec);
    const auto inside = project_epigraph(Z, nz + 1.0, spec);
    CHECK((inside.X - Z).norm() == 0.0);
    CHECK(inside.s == nz + 1.0);

    // origin corner: everything below the polar cone maps to (0, 0)
    const auto corner = project_epigraph(Matrix::Zero(2, 2), -1.0, spec);
    CHECK(corner.X.norm() == 0.0);
    CHECK(corner.s == 0.0);

    // 1-D boundary solve: diag(3, 0), t = 0, r = 1 splits the gap evenly
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 3.0;
    const auto boundary = project_epigraph(D, 0.0, {NormFlavor::FrobeniusR, 1});
    CHECK(boundary.s == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(boundary.X(0, 0) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(std::abs(boundary.X(1, 1)) <= 1e-12);

    // projection property: no sampled epigraph point is closer
    Rng rp(60);
    for (int it = 0; it < 40; ++it) {
        Rng rr = rp.stream(static_cast<std::uint64_t>(it));
        const Matrix W = random_matrix(rr, 3, 3);
        const double t = rr.normal();
        const NormSpec sp{rr.uniform() < 0.5 ? NormFlavor::FrobeniusR : NormFlavor::SpectralR,
                          rr.uniform_int(1, 3)};
        const auto [X, s] = project_epigraph(W, t, sp);
        CHECK(matrix_norm_value(X, sp) <= s + 1e-9 * std::max(1.0, s));
        const double base = (X - W).squaredNorm() + (s - t) * (s - t);
        for (int probe = 0; probe < 300; ++probe) {
            Matrix Y = X + 0.05 * random_matrix(rr, 3, 3);
            double sy = matrix_norm_value(Y, sp) + std::abs(rr.normal()) * 0.05;
            const double d = (Y - W).squaredNorm() + (sy - t) * (sy - t);
            CHECK(d >= base - 1e-9 * std::max(1.0, base));
        }
    }
}
