#ifndef LIFTLAB_QUADRATURE_HPP
#define LIFTLAB_QUADRATURE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "liftlab/common.hpp"
#include "liftlab/polynomial.hpp"

namespace liftlab {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // normalized to total mass 1

    double integrate(const std::vector<double>& f_values) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f_values[i];
        return acc;
    }
};

// Probabilists' Gauss-Hermite rule (weight N(0,1)): nodes from the symmetric
// tridiagonal Jacobi matrix with off-diagonals sqrt(k), weights from the
// Christoffel function 1/sum_k p_k(x_i)^2. Eigenvector-based weights lose all
// relative accuracy in the tails (the first components sit at the eigensolver
// noise floor), which would break degree exactness for high-degree integrands.
inline QuadratureRule gauss_hermite(int n) {
    require(n >= 1, "gauss_hermite: node count must be >= 1");
    static std::map<int, QuadratureRule> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(n);
        if (it != cache.end()) return it->second;
    }
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = std::sqrt(static_cast<double>(k));
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
    OrthoBasis1D hermite = hermite_basis(n >= 2 ? n - 1 : 1);
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()(i);
        rule.nodes[static_cast<std::size_t>(i)] = x;
        std::vector<double> p = hermite.values(x, n - 1);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k)];
        // s overflows only when the true weight underflows double precision
        double w = std::isfinite(s) ? 1.0 / s : 0.0;
        rule.weights[static_cast<std::size_t>(i)] = w;
        mass += w;
    }
    for (double& w : rule.weights) w /= mass;
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(n, rule);
    return rule;
}

// Stieltjes procedure: recurrence coefficients of the polynomials orthonormal
// under the discrete measure sum_i w_i delta_{x_i}. Exact for the continuous
// measure as long as the rule integrates degree 2D+1 polynomials (times the
// weight ratio) accurately.
inline OrthoBasis1D stieltjes_basis(const QuadratureRule& rule, int D) {
    const std::size_t n = rule.nodes.size();
    require(static_cast<int>(n) > D, "stieltjes_basis: need more nodes than degrees");
    OrthoBasis1D b;
    b.alpha.assign(static_cast<std::size_t>(D), 0.0);
    b.beta.assign(static_cast<std::size_t>(D) + 1, 0.0);
    std::vector<double> pkm1(n, 0.0), pk(n, 1.0);
    double norm0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm0 += rule.weights[i];
    for (std::size_t i = 0; i < n; ++i) pk[i] /= std::sqrt(norm0);
    for (int k = 0; k < D; ++k) {
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) a += rule.weights[i] * rule.nodes[i] * pk[i] * pk[i];
        b.alpha[static_cast<std::size_t>(k)] = a;
        std::vector<double> q(n);
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = (rule.nodes[i] - a) * pk[i] - (k > 0 ? b.beta[static_cast<std::size_t>(k)] * pkm1[i] : 0.0);
        }
        double nrm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) nrm2 += rule.weights[i] * q[i] * q[i];
        double bt = std::sqrt(nrm2);
        require(bt > 0 && std::isfinite(bt), "stieltjes_basis: degenerate recurrence (degree too high for rule)");
        b.beta[static_cast<std::size_t>(k) + 1] = bt;
        pkm1 = pk;
        for (std::size_t i = 0; i < n; ++i) pk[i] = q[i] / bt;
    }
    return b;
}

}  // namespace liftlab

#endif
