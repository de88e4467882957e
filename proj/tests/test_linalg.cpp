#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "liftlab/linalg.hpp"

using namespace liftlab;

namespace {

Eigen::MatrixXd random_matrix(int n, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = scale * unif(rng);
    return M;
}

}  // namespace

TEST_CASE("expm closed forms") {
    double theta = 1.3;
    Eigen::MatrixXd rot(2, 2);
    rot << 0.0, -theta, theta, 0.0;
    Eigen::MatrixXd E = expm(rot);
    REQUIRE(std::abs(E(0, 0) - std::cos(theta)) < 1e-13);
    REQUIRE(std::abs(E(0, 1) + std::sin(theta)) < 1e-13);
    REQUIRE(std::abs(E(1, 0) - std::sin(theta)) < 1e-13);
    REQUIRE(std::abs(E(1, 1) - std::cos(theta)) < 1e-13);

    Eigen::MatrixXd nil(2, 2);
    nil << 0.0, 1.0, 0.0, 0.0;
    Eigen::MatrixXd En = expm(nil);
    REQUIRE(std::abs(En(0, 0) - 1.0) < 1e-15);
    REQUIRE(std::abs(En(0, 1) - 1.0) < 1e-15);
    REQUIRE(std::abs(En(1, 0)) < 1e-15);

    Eigen::MatrixXd diag = Eigen::Vector3d(-1.0, 0.5, 2.0).asDiagonal();
    Eigen::MatrixXd Ed = expm(diag);
    REQUIRE(std::abs(Ed(0, 0) - std::exp(-1.0)) < 1e-14);
    REQUIRE(std::abs(Ed(1, 1) - std::exp(0.5)) < 1e-14);
    REQUIRE(std::abs(Ed(2, 2) - std::exp(2.0)) < 1e-13);
    REQUIRE(std::abs(Ed(0, 1)) < 1e-15);
}

TEST_CASE("expm inverse identity across pade branches") {
    // scales chosen to hit the order-3/5/7/9 branches and the squaring path;
    // the achievable residual grows with ||exp(A)|| ||exp(-A)||
    for (double scale : {0.002, 0.05, 0.2, 0.5, 2.0, 12.0}) {
        Eigen::MatrixXd A = random_matrix(6, 42, scale);
        Eigen::MatrixXd Ep = expm(A);
        Eigen::MatrixXd Em = expm(-A);
        double cond = operator_norm(Ep) * operator_norm(Em);
        REQUIRE((Ep * Em - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-13 * cond + 1e-13);
    }
    REQUIRE_THROWS_AS(expm(random_matrix(3, 1, 1.0).topRows(2)), ConfigError);
}

TEST_CASE("expm agrees with the eigendecomposition for symmetric matrices") {
    Eigen::MatrixXd B = random_matrix(8, 7, 1.5);
    Eigen::MatrixXd S = 0.5 * (B + B.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    Eigen::MatrixXd ref =
        es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
    REQUIRE((expm(S) - ref).cwiseAbs().maxCoeff() < 1e-10 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("operator norm matches the SVD") {
    for (std::uint64_t seed : {3u, 4u, 5u, 6u}) {
        Eigen::MatrixXd M = random_matrix(12, seed, 2.0);
        double ref = M.bdcSvd().singularValues()(0);
        // the power iteration stops on iterate differences, which can plateau
        // slightly above its nominal 1e-10 tolerance
        REQUIRE(std::abs(operator_norm(M) - ref) < 1e-7 * ref);
        Eigen::VectorXd warm;
        double first = operator_norm(M, &warm);
        double second = operator_norm(M, &warm);
        REQUIRE(std::abs(first - second) < 1e-7 * ref);
    }
    Eigen::MatrixXd rank1 = Eigen::VectorXd::Ones(5) * Eigen::RowVectorXd::Constant(5, 2.0);
    REQUIRE(std::abs(operator_norm(rank1) - 10.0) < 1e-9);
    REQUIRE(operator_norm(Eigen::MatrixXd::Zero(4, 4)) == 0.0);
}

TEST_CASE("smallest singular value and scaling homogeneity") {
    Eigen::MatrixXd D = Eigen::Vector3d(3.0, 2.0, 0.5).asDiagonal();
    REQUIRE(std::abs(smallest_singular_value(D) - 0.5) < 1e-14);
    Eigen::MatrixXd G = random_matrix(7, 9, 1.0);
    REQUIRE(std::abs(smallest_singular_value(3.0 * G) - 3.0 * smallest_singular_value(G)) < 1e-10);
}

TEST_CASE("spectral gap and minimum eigenvalue modulus") {
    Eigen::MatrixXd D2 = Eigen::Vector2d(-1.0, -3.0).asDiagonal();
    REQUIRE(std::abs(spectral_gap_of_generator(D2) - 1.0) < 1e-13);

    // eigenvalues -a +- ib: the gap sees only the real part
    double a = 0.7, b = 4.0;
    Eigen::MatrixXd R(2, 2);
    R << -a, -b, b, -a;
    REQUIRE(std::abs(spectral_gap_of_generator(R) - a) < 1e-12);
    REQUIRE(std::abs(min_abs_eigenvalue(R) - std::sqrt(a * a + b * b)) < 1e-12);

    Eigen::MatrixXd U(2, 2);
    U << 0.0, -1.0, 1.0, 1.0;  // |lambda| = 1 for both roots of l^2 - l + 1
    REQUIRE(std::abs(min_abs_eigenvalue(U) - 1.0) < 1e-12);
}

TEST_CASE("propagator evaluation, grids and anchor") {
    Eigen::MatrixXd G = -Eigen::MatrixXd::Identity(5, 5) + 0.3 * random_matrix(5, 21, 1.0);
    Propagator prop(G);
    REQUIRE((prop.at(0.0) - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
    for (double t : {0.37, 1.0, 2.9}) {
        REQUIRE((prop.at(t) - expm(t * G)).cwiseAbs().maxCoeff() < 1e-11);
        REQUIRE(std::abs(prop.norm_at(t) - operator_norm(expm(t * G))) < 1e-9);
    }

    std::vector<double> grid = prop.norms_on_grid(0.0, 0.1, 25);
    REQUIRE(grid.size() == 25);
    for (int k = 0; k < 25; ++k)
        REQUIRE(std::abs(grid[static_cast<std::size_t>(k)] - operator_norm(expm(0.1 * k * G))) < 1e-9);
    std::vector<double> offset = prop.norms_on_grid(0.5, 0.25, 8);
    for (int k = 0; k < 8; ++k)
        REQUIRE(std::abs(offset[static_cast<std::size_t>(k)] - operator_norm(expm((0.5 + 0.25 * k) * G))) < 1e-9);

    prop.set_anchor(2.0, 1.0);
    REQUIRE((prop.at(2.4) - expm(2.4 * G)).cwiseAbs().maxCoeff() < 1e-10);
    REQUIRE((prop.at(3.5) - expm(3.5 * G)).cwiseAbs().maxCoeff() < 1e-10);  // outside span: direct path

    REQUIRE_THROWS_AS(prop.at(-0.1), ConfigError);
    REQUIRE_THROWS_AS(prop.norms_on_grid(0.0, 0.0, 3), ConfigError);
}
