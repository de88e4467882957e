#ifndef LIFTLAB_POLYNOMIAL_HPP
#define LIFTLAB_POLYNOMIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "liftlab/common.hpp"

namespace liftlab {

// Multivariate polynomial observable in the position variable, stored as an
// exact coefficient table keyed by exponent tuples. Gradients are term-wise,
// so polynomial identities hold at coefficient level, not just pointwise.
class TestFunction {
  public:
    using Exponents = std::vector<int>;

    TestFunction() : d_(1) {}
    explicit TestFunction(int d) : d_(d) { require(d >= 1, "TestFunction: dimension must be >= 1"); }

    static TestFunction constant(double c, int d = 1) {
        TestFunction f(d);
        f.add_term(Exponents(static_cast<std::size_t>(d), 0), c);
        return f;
    }

    static TestFunction coordinate(int i, int d = 1) {
        TestFunction f(d);
        Exponents e(static_cast<std::size_t>(d), 0);
        e[static_cast<std::size_t>(i)] = 1;
        f.add_term(e, 1.0);
        return f;
    }

    // 1-d polynomial from dense monomial coefficients c[0] + c[1] x + ...
    static TestFunction from_coeffs(const std::vector<double>& c) {
        TestFunction f(1);
        for (std::size_t k = 0; k < c.size(); ++k)
            if (c[k] != 0.0) f.add_term({static_cast<int>(k)}, c[k]);
        return f;
    }

    int dimension() const { return d_; }

    void add_term(const Exponents& e, double coeff) {
        require(static_cast<int>(e.size()) == d_, "TestFunction: exponent arity mismatch");
        if (coeff == 0.0) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, coeff);
        } else {
            it->second += coeff;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    int degree() const {
        int deg = 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int k : e) s += k;
            deg = std::max(deg, s);
        }
        return deg;
    }

    bool is_constant() const { return degree() == 0; }
    bool is_zero() const { return terms_.empty(); }

    double evaluate(const std::vector<double>& x) const {
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c;
            for (int i = 0; i < d_; ++i)
                for (int k = 0; k < e[static_cast<std::size_t>(i)]; ++k) t *= x[static_cast<std::size_t>(i)];
            acc += t;
        }
        return acc;
    }

    double evaluate(double x) const { return evaluate(std::vector<double>{x}); }

    // Term-wise exact partial derivative.
    TestFunction partial(int i) const {
        TestFunction g(d_);
        for (const auto& [e, c] : terms_) {
            int k = e[static_cast<std::size_t>(i)];
            if (k == 0) continue;
            Exponents de = e;
            de[static_cast<std::size_t>(i)] = k - 1;
            g.add_term(de, c * k);
        }
        return g;
    }

    std::vector<TestFunction> gradient() const {
        std::vector<TestFunction> g;
        g.reserve(static_cast<std::size_t>(d_));
        for (int i = 0; i < d_; ++i) g.push_back(partial(i));
        return g;
    }

    std::vector<double> gradient_at(const std::vector<double>& x) const {
        std::vector<double> g(static_cast<std::size_t>(d_));
        for (int i = 0; i < d_; ++i) g[static_cast<std::size_t>(i)] = partial(i).evaluate(x);
        return g;
    }

    TestFunction operator+(const TestFunction& other) const {
        TestFunction r = *this;
        for (const auto& [e, c] : other.terms_) r.add_term(e, c);
        return r;
    }

    TestFunction operator*(double s) const {
        TestFunction r(d_);
        for (const auto& [e, c] : terms_) r.add_term(e, c * s);
        return r;
    }

    const std::map<Exponents, double>& terms() const { return terms_; }

    bool operator==(const TestFunction& other) const {
        return d_ == other.d_ && terms_ == other.terms_;
    }

  private:
    int d_;
    std::map<Exponents, double> terms_;
};

// Orthonormal 1-d polynomial family given by its three-term recurrence
//   p_{k+1}(x) = ((x - alpha_k) p_k(x) - beta_k p_{k-1}(x)) / beta_{k+1},
// with p_0 = 1, beta_0 unused. Values and derivatives are always produced by
// the recurrence; monomial coefficient tables are exposed only for the small
// degrees used in test-function dictionaries.
struct OrthoBasis1D {
    std::vector<double> alpha;  // alpha_0 .. alpha_{D-1}
    std::vector<double> beta;   // beta_1 .. beta_D at indices 1..D; beta[0] unused

    int max_degree() const { return static_cast<int>(alpha.size()); }

    // p_0..p_D at x.
    std::vector<double> values(double x, int D) const {
        std::vector<double> p(static_cast<std::size_t>(D) + 1);
        p[0] = 1.0;
        if (D >= 1) p[1] = (x - alpha[0]) / beta[1];
        for (int k = 1; k < D; ++k)
            p[static_cast<std::size_t>(k) + 1] =
                ((x - alpha[static_cast<std::size_t>(k)]) * p[static_cast<std::size_t>(k)] -
                 beta[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(k) - 1]) /
                beta[static_cast<std::size_t>(k) + 1];
        return p;
    }

    // p_0..p_D and p_0'..p_D' at x; derivative recurrence differentiates the
    // value recurrence term by term.
    void values_and_derivatives(double x, int D, std::vector<double>& p, std::vector<double>& dp) const {
        p.assign(static_cast<std::size_t>(D) + 1, 0.0);
        dp.assign(static_cast<std::size_t>(D) + 1, 0.0);
        p[0] = 1.0;
        dp[0] = 0.0;
        if (D >= 1) {
            p[1] = (x - alpha[0]) / beta[1];
            dp[1] = 1.0 / beta[1];
        }
        for (int k = 1; k < D; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            p[ku + 1] = ((x - alpha[ku]) * p[ku] - beta[ku] * p[ku - 1]) / beta[ku + 1];
            dp[ku + 1] = ((x - alpha[ku]) * dp[ku] + p[ku] - beta[ku] * dp[ku - 1]) / beta[ku + 1];
        }
    }

    // Monomial coefficients of p_k; stable only for small k (dictionary use).
    std::vector<double> coefficients(int k) const {
        std::vector<std::vector<double>> c(static_cast<std::size_t>(k) + 1);
        c[0] = {1.0};
        if (k >= 1) {
            c[1] = {-alpha[0] / beta[1], 1.0 / beta[1]};
        }
        for (int j = 1; j < k; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            std::vector<double> next(ju + 2, 0.0);
            for (std::size_t i = 0; i < c[ju].size(); ++i) {
                next[i + 1] += c[ju][i] / beta[ju + 1];
                next[i] -= alpha[ju] * c[ju][i] / beta[ju + 1];
            }
            for (std::size_t i = 0; i < c[ju - 1].size(); ++i)
                next[i] -= beta[ju] * c[ju - 1][i] / beta[ju + 1];
            c[ju + 1] = std::move(next);
        }
        return c[static_cast<std::size_t>(k)];
    }

    TestFunction polynomial(int k) const { return TestFunction::from_coeffs(coefficients(k)); }
};

// Probabilists' Hermite family orthonormal under N(0, 1/m): alpha_k = 0,
// beta_k = sqrt(k/m). Ladder identities used across the Galerkin assembly:
//   x p_k = sqrt((k+1)/m) p_{k+1} + sqrt(k/m) p_{k-1},  p_k' = sqrt(k m) p_{k-1}.
inline OrthoBasis1D hermite_basis(int D, double variance_inverse_m = 1.0) {
    require(variance_inverse_m > 0, "hermite_basis: m must be positive");
    OrthoBasis1D b;
    b.alpha.assign(static_cast<std::size_t>(D), 0.0);
    b.beta.assign(static_cast<std::size_t>(D) + 1, 0.0);
    for (int k = 1; k <= D; ++k)
        b.beta[static_cast<std::size_t>(k)] = std::sqrt(static_cast<double>(k) / variance_inverse_m);
    return b;
}

}  // namespace liftlab

#endif
