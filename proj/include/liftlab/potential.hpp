#ifndef LIFTLAB_POTENTIAL_HPP
#define LIFTLAB_POTENTIAL_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "liftlab/common.hpp"
#include "liftlab/polynomial.hpp"
#include "liftlab/quadrature.hpp"

namespace liftlab {

// Confining potential with the data every other module consumes. For
// quadratic potentials quadratic_mass is set and unlocks exact flows and
// analytic ladder assembly; gradient_norm_bound(center, radius) bounds
// sup |grad U| over the closed ball and feeds the BPS thinning envelope.
struct Potential {
    int d = 1;
    std::function<double(const std::vector<double>&)> evaluate;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
    double hessian_lower_bound = 0.0;  // kappa_-
    std::optional<double> poincare_constant;
    std::optional<double> quadratic_mass;
    std::function<double(const std::vector<double>&, double)> gradient_norm_bound;
    std::string label;

    double evaluate1(double x) const { return evaluate(std::vector<double>{x}); }
    double gradient1(double x) const { return gradient(std::vector<double>{x})[0]; }
};

inline Potential quadratic_potential(double m, int d) {
    require(m > 0, "quadratic_potential: m must be positive");
    require(d >= 1, "quadratic_potential: dimension must be >= 1");
    Potential p;
    p.d = d;
    p.evaluate = [m](const std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) s += xi * xi;
        return 0.5 * m * s;
    };
    p.gradient = [m](const std::vector<double>& x) {
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = m * x[i];
        return g;
    };
    p.hessian_lower_bound = 0.0;
    p.poincare_constant = m;
    p.quadratic_mass = m;
    p.gradient_norm_bound = [m](const std::vector<double>& c, double r) {
        double nc = 0.0;
        for (double ci : c) nc += ci * ci;
        return m * (std::sqrt(nc) + r);
    };
    p.label = "quadratic";
    return p;
}

inline Potential double_well_potential(double beta) {
    require(beta > 0, "double_well_potential: beta must be positive");
    Potential p;
    p.d = 1;
    p.evaluate = [beta](const std::vector<double>& x) {
        double s = x[0] * x[0] - 1.0;
        return beta * s * s;
    };
    p.gradient = [beta](const std::vector<double>& x) {
        return std::vector<double>{4.0 * beta * x[0] * (x[0] * x[0] - 1.0)};
    };
    // U''(x) = beta(12x^2 - 4) has minimum -4beta at x = 0.
    p.hessian_lower_bound = 4.0 * beta;
    p.gradient_norm_bound = [beta](const std::vector<double>& c, double r) {
        double X = std::abs(c[0]) + r;
        return 4.0 * beta * X * (X * X + 1.0);
    };
    p.label = "double_well";
    return p;
}

// Target measure: position marginal mu with density exp(-U)/Z, optionally
// extended to phase space as mu ⊗ N(0, I_d).
struct TargetMeasure {
    Potential potential;
    bool phase_space = false;
    bool exact_sampling = false;  // true iff mu is Gaussian

    static TargetMeasure position(const Potential& pot) {
        return TargetMeasure{pot, false, pot.quadratic_mass.has_value()};
    }
    static TargetMeasure phase(const Potential& pot) {
        return TargetMeasure{pot, true, pot.quadratic_mass.has_value()};
    }
};

// Deterministic quadrature against mu (d = 1): Gauss-Hermite nodes reweighted
// by exp(x^2/2 - U(x)), normalized by the same rule. Weight arithmetic is in
// log domain; nodes whose Gaussian weight underflows are dropped.
class MeasureQuadrature {
  public:
    MeasureQuadrature(const Potential& pot, int nodes = 200) {
        require(pot.d == 1, "MeasureQuadrature: implemented for d = 1");
        require(nodes >= 2, "MeasureQuadrature: node count must be >= 2");
        QuadratureRule gh = gauss_hermite(nodes);
        std::vector<double> logw(gh.nodes.size(), -std::numeric_limits<double>::infinity());
        double logmax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
            if (gh.weights[i] <= 0.0) continue;
            double x = gh.nodes[i];
            logw[i] = std::log(gh.weights[i]) + 0.5 * x * x - pot.evaluate({x});
            logmax = std::max(logmax, logw[i]);
        }
        require(std::isfinite(logmax), "MeasureQuadrature: measure not normalizable on the rule");
        double z = 0.0;
        for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
            if (!std::isfinite(logw[i])) continue;
            double w = std::exp(logw[i] - logmax);
            if (w == 0.0) continue;
            rule_.nodes.push_back(gh.nodes[i]);
            rule_.weights.push_back(w);
            z += w;
        }
        for (double& w : rule_.weights) w /= z;
        // log of ∫ e^{-U} dx relative to the N(0,1) reference mass.
        log_normalizer_ = logmax + std::log(z);
    }

    const QuadratureRule& rule() const { return rule_; }
    double log_normalizer() const { return log_normalizer_; }

    double integrate(const std::function<double(double)>& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < rule_.nodes.size(); ++i) acc += rule_.weights[i] * f(rule_.nodes[i]);
        return acc;
    }

    double moment(int k) const {
        return integrate([k](double x) {
            double t = 1.0;
            for (int i = 0; i < k; ++i) t *= x;
            return t;
        });
    }

  private:
    QuadratureRule rule_;
    double log_normalizer_ = 0.0;
};

// Dirichlet form E(f,g) = 1/2 ∫ ∇f·∇g dmu by deterministic quadrature
// (d = 1; exact for polynomial integrands against Gaussian mu).
inline double dirichlet_form(const TestFunction& f, const TestFunction& g, const TargetMeasure& mu,
                             int quadrature_nodes = 200) {
    require(!mu.phase_space, "dirichlet_form: measure must be position-only");
    require(f.dimension() == 1 && g.dimension() == 1, "dirichlet_form: implemented for d = 1");
    require(quadrature_nodes >= 2, "dirichlet_form: quadrature resolution unset");
    TestFunction df = f.partial(0);
    TestFunction dg = g.partial(0);
    MeasureQuadrature q(mu.potential, quadrature_nodes);
    return 0.5 * q.integrate([&](double x) { return df.evaluate(x) * dg.evaluate(x); });
}

// Position basis orthonormal under mu: analytic Hermite ladder for Gaussian
// targets, Stieltjes otherwise.
inline OrthoBasis1D position_basis(const Potential& pot, int D, int quadrature_nodes = 200) {
    if (pot.quadratic_mass) return hermite_basis(D, *pot.quadratic_mass);
    MeasureQuadrature q(pot, quadrature_nodes);
    return stieltjes_basis(q.rule(), D);
}

// Dictionary of mu-orthonormal polynomials as explicit TestFunctions,
// degrees 0..max_degree.
inline std::vector<TestFunction> polynomial_dictionary(const Potential& pot, int max_degree,
                                                       int quadrature_nodes = 200) {
    OrthoBasis1D basis = position_basis(pot, max_degree, quadrature_nodes);
    std::vector<TestFunction> dict;
    dict.reserve(static_cast<std::size_t>(max_degree) + 1);
    for (int k = 0; k <= max_degree; ++k) dict.push_back(basis.polynomial(k));
    return dict;
}

}  // namespace liftlab

#endif
