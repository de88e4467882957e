#ifndef LIFTLAB_GALERKIN_HPP
#define LIFTLAB_GALERKIN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "liftlab/common.hpp"
#include "liftlab/polynomial.hpp"
#include "liftlab/potential.hpp"
#include "liftlab/quadrature.hpp"

namespace liftlab {

// Generator restricted to a mean-zero orthonormal polynomial basis. For phase
// space the basis is {phi_j(x) psi_k(v)} \ {1} with psi_k orthonormal
// probabilists' Hermite; index(j,k) = j*(degree_v+1) + k - 1. Overdamped
// matrices use the position basis {phi_1..phi_D}.
struct GeneratorMatrix {
    Eigen::MatrixXd matrix;
    int degree_x = 0;
    int degree_v = 0;
    bool phase_space = true;
    std::string process;
    double gamma = 0.0;
    double gram_error = 0.0;

    int index(int j, int k) const { return j * (degree_v + 1) + k - 1; }
};

namespace detail {

// <phi_i, phi_j'>_mu and <phi_i, U' phi_j>_mu for i,j = 0..D: the analytic
// ladders for Gaussian targets, quadrature otherwise. The Gram defect of the
// basis under the same rule is returned through gram_error.
struct PositionOperators {
    Eigen::MatrixXd X;  // derivative coupling
    Eigen::MatrixXd F;  // force coupling
    double gram_error;
};

inline PositionOperators position_operators(const Potential& pot, int D, int quadrature_nodes) {
    PositionOperators ops;
    ops.X = Eigen::MatrixXd::Zero(D + 1, D + 1);
    ops.F = Eigen::MatrixXd::Zero(D + 1, D + 1);
    MeasureQuadrature quad(pot, quadrature_nodes);
    OrthoBasis1D basis = position_basis(pot, D, quadrature_nodes);

    const auto& rule = quad.rule();
    const std::size_t n = rule.nodes.size();
    Eigen::MatrixXd P(static_cast<Eigen::Index>(n), D + 1);
    Eigen::MatrixXd dP(static_cast<Eigen::Index>(n), D + 1);
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    Eigen::VectorXd du(static_cast<Eigen::Index>(n));
    std::vector<double> p, dp;
    for (std::size_t i = 0; i < n; ++i) {
        basis.values_and_derivatives(rule.nodes[i], D, p, dp);
        for (int k = 0; k <= D; ++k) {
            P(static_cast<Eigen::Index>(i), k) = p[static_cast<std::size_t>(k)];
            dP(static_cast<Eigen::Index>(i), k) = dp[static_cast<std::size_t>(k)];
        }
        w(static_cast<Eigen::Index>(i)) = rule.weights[i];
        du(static_cast<Eigen::Index>(i)) = pot.gradient({rule.nodes[i]})[0];
    }
    Eigen::MatrixXd gram = P.transpose() * w.asDiagonal() * P;
    ops.gram_error = (gram - Eigen::MatrixXd::Identity(D + 1, D + 1)).cwiseAbs().maxCoeff();

    if (pot.quadratic_mass) {
        double m = *pot.quadratic_mass;
        for (int j = 1; j <= D; ++j) ops.X(j - 1, j) = std::sqrt(j * m);
        for (int j = 0; j <= D; ++j) {
            if (j + 1 <= D) ops.F(j + 1, j) = std::sqrt(m) * std::sqrt(j + 1.0);
            if (j - 1 >= 0) ops.F(j - 1, j) = std::sqrt(m) * std::sqrt(static_cast<double>(j));
        }
    } else {
        ops.X = P.transpose() * w.asDiagonal() * dP;
        ops.F = P.transpose() * (w.cwiseProduct(du)).asDiagonal() * P;
    }
    return ops;
}

}  // namespace detail

// Galerkin matrix of the generator on mean-zero functions. Phase-space terms:
// transport v d/dx, force -U'(x) d/dv, plus the velocity part of the chosen
// process (Ornstein-Uhlenbeck -gamma*k, or refreshment gamma(Pi_v - I)).
// Overdamped uses the integration-by-parts form -1/2 <phi_i', phi_j'>.
inline GeneratorMatrix assemble_galerkin(const std::string& process, const Potential& pot, double gamma,
                                         int degree, int quadrature_nodes = 200) {
    require(pot.d == 1, "assemble_galerkin: implemented for d = 1");
    require(degree >= 1, "assemble_galerkin: truncation degree must be >= 1");
    require(gamma >= 0, "assemble_galerkin: gamma must be nonnegative");
    require(process == "overdamped" || process == "langevin" || process == "rhmc",
            "assemble_galerkin: process must be overdamped | langevin | rhmc");

    const int D = degree;
    detail::PositionOperators ops = detail::position_operators(pot, D, quadrature_nodes);
    if (ops.gram_error > 1e-8)
        throw ConvergenceError("assemble_galerkin: basis Gram defect " + std::to_string(ops.gram_error) +
                               " exceeds 1e-8 at degree " + std::to_string(degree) + "; reject degree");

    GeneratorMatrix gm;
    gm.degree_x = D;
    gm.process = process;
    gm.gamma = gamma;
    gm.gram_error = ops.gram_error;

    if (process == "overdamped") {
        gm.phase_space = false;
        gm.degree_v = 0;
        // <phi_i, L phi_j> = -1/2 <phi_i', phi_j'>: with X_{ij} = <phi_i, phi_j'>
        // and orthonormality, <phi_i', phi_j'> = (X^T X)_{ij}.
        Eigen::MatrixXd full = -0.5 * (ops.X.transpose() * ops.X);
        gm.matrix = full.block(1, 1, D, D);
        return gm;
    }

    gm.degree_v = D;
    const int dim = (D + 1) * (D + 1) - 1;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim, dim);
    auto idx = [D](int j, int k) { return j * (D + 1) + k - 1; };

    for (int j = 0; j <= D; ++j) {
        for (int k = 0; k <= D; ++k) {
            if (j == 0 && k == 0) continue;
            int col = idx(j, k);
            // transport: v phi_j' psi_k
            for (int i = 0; i <= D; ++i) {
                double xij = ops.X(i, j);
                if (xij == 0.0) continue;
                if (k + 1 <= D) G(idx(i, k + 1), col) += xij * std::sqrt(k + 1.0);
                if (k - 1 >= 0 && !(i == 0 && k - 1 == 0))
                    G(idx(i, k - 1), col) += xij * std::sqrt(static_cast<double>(k));
            }
            // force: -U' phi_j psi_k'
            if (k - 1 >= 0) {
                for (int i = 0; i <= D; ++i) {
                    double fij = ops.F(i, j);
                    if (fij == 0.0 || (i == 0 && k - 1 == 0)) continue;
                    G(idx(i, k - 1), col) -= std::sqrt(static_cast<double>(k)) * fij;
                }
            }
            if (process == "langevin") {
                G(col, col) += -gamma * k;
            } else if (process == "rhmc" && k >= 1) {
                G(col, col) += -gamma;
            }
        }
    }
    gm.matrix = std::move(G);
    return gm;
}

}  // namespace liftlab

#endif
