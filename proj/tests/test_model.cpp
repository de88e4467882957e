#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "liftlab/potential.hpp"

using namespace liftlab;

namespace {

double fd_gradient(const Potential& pot, double x, double h = 1e-5) {
    return (pot.evaluate1(x + h) - pot.evaluate1(x - h)) / (2.0 * h);
}

// E[x^{2j}] under N(0,1).
double gaussian_even_moment(int two_j) {
    double m = 1.0;
    for (int k = 1; k < two_j; k += 2) m *= static_cast<double>(k);
    return m;
}

double gram_defect(const Potential& pot, int D, int nodes) {
    MeasureQuadrature quad(pot, nodes);
    OrthoBasis1D basis = position_basis(pot, D, nodes);
    const auto& rule = quad.rule();
    std::vector<std::vector<double>> gram(static_cast<std::size_t>(D) + 1,
                                          std::vector<double>(static_cast<std::size_t>(D) + 1, 0.0));
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        std::vector<double> p = basis.values(rule.nodes[i], D);
        for (int a = 0; a <= D; ++a)
            for (int b = 0; b <= D; ++b)
                gram[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                    rule.weights[i] * p[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(b)];
    }
    double worst = 0.0;
    for (int a = 0; a <= D; ++a)
        for (int b = 0; b <= D; ++b)
            worst = std::max(worst, std::abs(gram[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] -
                                             (a == b ? 1.0 : 0.0)));
    return worst;
}

}  // namespace

TEST_CASE("quadratic potential values and derivatives") {
    Potential pot = quadratic_potential(2.0, 1);
    REQUIRE(pot.d == 1);
    REQUIRE(pot.quadratic_mass.has_value());
    REQUIRE(*pot.quadratic_mass == 2.0);
    REQUIRE(pot.poincare_constant.has_value());
    REQUIRE(*pot.poincare_constant == 2.0);
    REQUIRE(pot.hessian_lower_bound == 0.0);
    REQUIRE(pot.evaluate1(3.0) == 9.0);
    REQUIRE(pot.gradient1(3.0) == 6.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    for (int i = 0; i < 100; ++i) {
        double x = unif(rng);
        REQUIRE(std::abs(pot.gradient1(x) - fd_gradient(pot, x)) < 1e-6);
    }

    Potential pot3 = quadratic_potential(1.5, 3);
    std::vector<double> x{1.0, -2.0, 0.5};
    REQUIRE(std::abs(pot3.evaluate(x) - 0.75 * (1.0 + 4.0 + 0.25)) < 1e-14);
    std::vector<double> grad = pot3.gradient(x);
    REQUIRE(grad.size() == 3);
    REQUIRE(grad[1] == -3.0);

    REQUIRE_THROWS_AS(quadratic_potential(0.0, 1), ConfigError);
    REQUIRE_THROWS_AS(quadratic_potential(1.0, 0), ConfigError);
}

TEST_CASE("double well potential values, derivatives and convexity defect") {
    double beta = 0.7;
    Potential pot = double_well_potential(beta);
    REQUIRE(pot.evaluate1(0.0) == beta);
    REQUIRE(pot.evaluate1(1.0) == 0.0);
    REQUIRE(pot.evaluate1(-1.0) == 0.0);
    REQUIRE(pot.hessian_lower_bound == 4.0 * beta);
    REQUIRE_FALSE(pot.quadratic_mass.has_value());

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unif(-2.5, 2.5);
    for (int i = 0; i < 100; ++i) {
        double x = unif(rng);
        REQUIRE(std::abs(pot.gradient1(x) - fd_gradient(pot, x)) < 1e-6);
    }
    // U'' = beta(12x^2 - 4) >= -4 beta everywhere, with equality at x = 0
    double h = 1e-4;
    auto hess = [&](double x) {
        return (pot.gradient1(x + h) - pot.gradient1(x - h)) / (2.0 * h);
    };
    for (int i = 0; i < 50; ++i) REQUIRE(hess(unif(rng)) >= -pot.hessian_lower_bound - 1e-6);
    REQUIRE(std::abs(hess(0.0) + 4.0 * beta) < 1e-6);

    REQUIRE_THROWS_AS(double_well_potential(0.0), ConfigError);
}

TEST_CASE("gradient norm bounds dominate over the stated ball") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (const Potential& pot : {quadratic_potential(3.0, 1), double_well_potential(1.2)}) {
        for (double c : {-1.7, 0.0, 2.4}) {
            for (double r : {0.1, 1.0, 3.0}) {
                double bound = pot.gradient_norm_bound({c}, r);
                for (int i = 0; i < 200; ++i) {
                    double y = c + r * unif(rng);
                    REQUIRE(std::abs(pot.gradient1(y)) <= bound + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("gauss hermite rule: mass, moments, degree exactness") {
    QuadratureRule tiny = gauss_hermite(1);
    REQUIRE(tiny.nodes.size() == 1);
    REQUIRE(std::abs(tiny.nodes[0]) < 1e-14);
    REQUIRE(std::abs(tiny.weights[0] - 1.0) < 1e-14);

    for (int n : {20, 60, 200}) {
        QuadratureRule rule = gauss_hermite(n);
        double mass = 0.0;
        for (double w : rule.weights) {
            REQUIRE(w >= 0.0);
            mass += w;
        }
        REQUIRE(std::abs(mass - 1.0) < 1e-14);
        // symmetry of the weight makes odd moments vanish
        for (int k : {1, 3, 5, 7}) {
            double m = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                m += rule.weights[i] * std::pow(rule.nodes[i], k);
            REQUIRE(std::abs(m) < 1e-12);
        }
        for (int k : {2, 4, 6, 8, 10, 12}) {
            double m = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                m += rule.weights[i] * std::pow(rule.nodes[i], k);
            REQUIRE(std::abs(m / gaussian_even_moment(k) - 1.0) < 1e-12);
        }
    }

    // degree exactness deep into the tails: E[x^32] = 31!! needs accurate
    // weights at nodes where the Gaussian density underflows relative accuracy
    QuadratureRule rule = gauss_hermite(200);
    double m32 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        m32 += rule.weights[i] * std::pow(rule.nodes[i], 32);
    REQUIRE(std::abs(m32 / gaussian_even_moment(32) - 1.0) < 1e-12);

    OrthoBasis1D hermite = hermite_basis(16);
    double p16_sq = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        std::vector<double> p = hermite.values(rule.nodes[i], 16);
        p16_sq += rule.weights[i] * p[16] * p[16];
    }
    REQUIRE(std::abs(p16_sq - 1.0) < 1e-6);

    REQUIRE_THROWS_AS(gauss_hermite(0), ConfigError);
}

TEST_CASE("stieltjes basis on the gaussian rule reproduces hermite") {
    QuadratureRule rule = gauss_hermite(200);
    OrthoBasis1D b = stieltjes_basis(rule, 16);
    for (int k = 0; k < 16; ++k) REQUIRE(std::abs(b.alpha[static_cast<std::size_t>(k)]) < 1e-10);
    for (int k = 1; k <= 16; ++k)
        REQUIRE(std::abs(b.beta[static_cast<std::size_t>(k)] - std::sqrt(static_cast<double>(k))) < 1e-10);

    QuadratureRule small = gauss_hermite(3);
    REQUIRE_THROWS_AS(stieltjes_basis(small, 3), ConfigError);
    REQUIRE_NOTHROW(stieltjes_basis(small, 2));
}

TEST_CASE("position bases stay orthonormal to high degree under the measure") {
    REQUIRE(gram_defect(quadratic_potential(1.0, 1), 16, 200) < 1e-8);
    REQUIRE(gram_defect(quadratic_potential(4.0, 1), 16, 200) < 1e-8);
    REQUIRE(gram_defect(double_well_potential(0.5), 16, 200) < 1e-8);
    REQUIRE(gram_defect(double_well_potential(2.0), 16, 300) < 1e-8);
}

TEST_CASE("measure quadrature normalizes and reproduces moments") {
    MeasureQuadrature gauss(quadratic_potential(2.0, 1), 200);
    REQUIRE(std::abs(gauss.integrate([](double) { return 1.0; }) - 1.0) < 1e-14);
    REQUIRE(std::abs(gauss.moment(1)) < 1e-13);
    REQUIRE(std::abs(gauss.moment(2) - 0.5) < 1e-12);
    REQUIRE(std::abs(gauss.moment(4) - 0.75) < 1e-12);

    MeasureQuadrature well(double_well_potential(2.0), 200);
    REQUIRE(std::abs(well.moment(1)) < 1e-13);
    REQUIRE(well.moment(2) > 0.5);
    // resolution stability: the reweighted rule converges root-exponentially
    // for the non-polynomial weight ratio, so the refinement drift only needs
    // to sit far below the Monte Carlo tolerances used downstream
    MeasureQuadrature fine(double_well_potential(2.0), 400);
    REQUIRE(std::abs(well.moment(2) - fine.moment(2)) < 1e-4);
    REQUIRE(std::abs(well.moment(4) - fine.moment(4)) < 1e-4);

    REQUIRE_THROWS_AS(MeasureQuadrature(quadratic_potential(1.0, 2), 50), ConfigError);
    REQUIRE_THROWS_AS(MeasureQuadrature(quadratic_potential(1.0, 1), 1), ConfigError);
}

TEST_CASE("dirichlet form on the standard gaussian") {
    Potential pot = quadratic_potential(1.0, 1);
    TargetMeasure mu = TargetMeasure::position(pot);
    TestFunction x = TestFunction::coordinate(0);
    TestFunction one = TestFunction::constant(1.0);
    TestFunction x2 = TestFunction::from_coeffs({0.0, 0.0, 1.0});
    TestFunction x3 = TestFunction::from_coeffs({0.0, 0.0, 0.0, 1.0});

    REQUIRE(std::abs(dirichlet_form(x, x, mu) - 0.5) < 1e-12);
    REQUIRE(std::abs(dirichlet_form(x, one, mu)) < 1e-14);
    REQUIRE(std::abs(dirichlet_form(x2, x2, mu) - 2.0) < 1e-12);
    // E(x^3, x^3) = 1/2 E[9 x^4] = 13.5
    REQUIRE(std::abs(dirichlet_form(x3, x3, mu) - 13.5) < 1e-11);
    REQUIRE(std::abs(dirichlet_form(x, x2, mu)) < 1e-13);

    // symmetry and bilinearity
    REQUIRE(std::abs(dirichlet_form(x2, x3, mu) - dirichlet_form(x3, x2, mu)) < 1e-12);
    double lhs = dirichlet_form(x + x2 * 2.0, x3, mu);
    double rhs = dirichlet_form(x, x3, mu) + 2.0 * dirichlet_form(x2, x3, mu);
    REQUIRE(std::abs(lhs - rhs) < 1e-11);
    REQUIRE(dirichlet_form(x3, x3, mu) > 0.0);

    TargetMeasure phase = TargetMeasure::phase(pot);
    REQUIRE_THROWS_AS(dirichlet_form(x, x, phase), ConfigError);
}

TEST_CASE("polynomial dictionaries are orthonormal under their targets") {
    for (const Potential& pot : {quadratic_potential(1.0, 1), double_well_potential(0.5)}) {
        std::vector<TestFunction> dict = polynomial_dictionary(pot, 4);
        REQUIRE(dict.size() == 5);
        REQUIRE(dict[0].is_constant());
        MeasureQuadrature quad(pot, 200);
        for (std::size_t i = 0; i < dict.size(); ++i) {
            for (std::size_t j = 0; j < dict.size(); ++j) {
                double ip = quad.integrate(
                    [&](double x) { return dict[i].evaluate(x) * dict[j].evaluate(x); });
                REQUIRE(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-8);
            }
        }
    }
}

TEST_CASE("target measure flags") {
    Potential gauss = quadratic_potential(1.0, 1);
    Potential well = double_well_potential(1.0);
    REQUIRE(TargetMeasure::position(gauss).exact_sampling);
    REQUIRE_FALSE(TargetMeasure::position(gauss).phase_space);
    REQUIRE(TargetMeasure::phase(gauss).phase_space);
    REQUIRE_FALSE(TargetMeasure::phase(well).exact_sampling);
}

TEST_CASE("test function algebra") {
    TestFunction f = TestFunction::from_coeffs({1.0, 0.0, 3.0});  // 1 + 3x^2
    REQUIRE(f.degree() == 2);
    REQUIRE_FALSE(f.is_constant());
    REQUIRE(std::abs(f.evaluate(2.0) - 13.0) < 1e-14);

    TestFunction df = f.partial(0);
    REQUIRE(df.degree() == 1);
    REQUIRE(std::abs(df.evaluate(2.0) - 12.0) < 1e-14);

    TestFunction g = f + df * (-0.5);  // 1 + 3x^2 - 3x
    REQUIRE(std::abs(g.evaluate(1.0) - 1.0) < 1e-14);

    TestFunction zero = f + f * (-1.0);
    REQUIRE(zero.is_zero());
    REQUIRE(zero.partial(0).is_zero());

    TestFunction h(2);
    h.add_term({2, 1}, 1.0);  // x0^2 x1
    REQUIRE(h.degree() == 3);
    std::vector<double> grad = h.gradient_at({1.0, 2.0});
    REQUIRE(std::abs(grad[0] - 4.0) < 1e-14);
    REQUIRE(std::abs(grad[1] - 1.0) < 1e-14);
    REQUIRE(h.gradient().size() == 2);

    REQUIRE(TestFunction::constant(5.0).is_constant());
    REQUIRE(TestFunction::constant(5.0).partial(0).is_zero());
    REQUIRE(TestFunction::coordinate(1, 3).partial(1).is_constant());
    REQUIRE_THROWS_AS(TestFunction(0), ConfigError);
}
