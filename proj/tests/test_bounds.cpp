#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "liftlab/bounds.hpp"

using namespace liftlab;

TEST_CASE("divergence constants: floating and exact paths agree") {
    DivergenceConstants c = divergence_constants(1.0, 1.0, 0.0);
    REQUIRE(std::abs(c.c0 - 89.0) < 1e-12);
    REQUIRE(std::abs(c.c1 - 2149.0) < 1e-12);
    auto [C0, C1] = stpi_constants(c);
    REQUIRE(std::abs(C0 - 178.0) < 1e-12);
    REQUIRE(std::abs(C1 - 8599.0) < 1e-12);

    DivergenceConstantsExact e = divergence_constants_exact(Rational(1), Rational(1), Rational(0));
    REQUIRE(e.c0 == Rational(89));
    REQUIRE(e.c1 == Rational(2149));
    auto [eC0, eC1] = stpi_constants_exact(e);
    REQUIRE(eC0 == Rational(178));
    REQUIRE(eC1 == Rational(8599));

    // kappa enters through max(1/sqrt(m), T/pi)^2 = 1/m here
    DivergenceConstants ck = divergence_constants(1.0, 1.0, 2.0);
    REQUIRE(std::abs(ck.c1 - 2299.0) < 1e-12);
    DivergenceConstantsExact ek = divergence_constants_exact(Rational(1), Rational(1), Rational(2));
    REQUIRE(ek.c1 == Rational(2299));

    REQUIRE(std::abs(to_double(e.c0) - c.c0) < 1e-12);
    REQUIRE(to_string(Rational(6373, 3)) == "6373/3");

    REQUIRE_THROWS_AS(divergence_constants(0.0, 1.0, 0.0), ConfigError);
    REQUIRE_THROWS_AS(divergence_constants(1.0, -1.0, 0.0), ConfigError);
    REQUIRE_THROWS_AS(divergence_constants(1.0, 1.0, -1.0), ConfigError);
}

TEST_CASE("T = 3/sqrt(m) gives (241/m, 1591/3 + 75 kappa/m) exactly") {
    for (long long mi : {1, 2, 4, 9}) {
        for (long long ki : {0, 1, 6}) {
            Rational m(mi), kappa(ki);
            DivergenceConstantsExact e = divergence_constants_exact(Rational(9) / m, m, kappa);
            REQUIRE(e.c0 == Rational(241) / m);
            REQUIRE(e.c1 == Rational(1591, 3) + Rational(75) * kappa / m);
        }
    }
    // T^2 m above the pi^2 bracket resolves the max() to T/pi: irrational
    REQUIRE_THROWS_AS(divergence_constants_exact(Rational(16), Rational(1), Rational(0)), ConfigError);
}

TEST_CASE("c0 grows and c1 shrinks with the window length") {
    double prev_c0 = 0.0, prev_c1 = 1e18;
    for (double T : {0.5, 1.0, 2.0, 3.0}) {
        DivergenceConstants c = divergence_constants(T, 1.0, 1.0);
        REQUIRE(c.c0 > prev_c0);
        REQUIRE(c.c1 < prev_c1);
        prev_c0 = c.c0;
        prev_c1 = c.c1;
    }
}

TEST_CASE("contraction rate is maximized at gamma* = sqrt(C1/C0)") {
    double C0 = 482.0, C1 = 6373.0 / 3.0;
    double gstar = optimal_gamma_for_rate(C0, C1);
    double nustar = contraction_rate(gstar, C0, C1);
    REQUIRE(std::abs(nustar - 1.0 / (2.0 * std::sqrt(C0 * C1))) < 1e-15);
    for (double g : {0.5 * gstar, 0.9 * gstar, 1.1 * gstar, 2.0 * gstar})
        REQUIRE(contraction_rate(g, C0, C1) < nustar);
    REQUIRE_THROWS_AS(contraction_rate(0.0, C0, C1), ConfigError);
}

TEST_CASE("optimal refresh rate and the strict 2024 bound") {
    RhmcOptimal opt = rhmc_optimal_gamma(1.0, 0.0);
    REQUIRE(std::abs(opt.gamma - 2.0993643245234033) < 1e-12);
    REQUIRE(std::abs(opt.inv_nu - 2023.7872088405607) < 1e-9);
    REQUIRE(opt.bound == 2024.0);
    REQUIRE(opt.inv_nu < opt.bound);

    RhmcOptimal opt6 = rhmc_optimal_gamma(1.0, 6.0);
    REQUIRE(std::abs(opt6.bound - 2024.0 * std::sqrt(1.0 + 6.0 / 7.0)) < 1e-9);
    REQUIRE(opt6.inv_nu < opt6.bound);

    // the strict inequality in exact arithmetic, and the m-coefficient
    // comparison 1928 * 6373/3 < 2024^2 that drives it
    REQUIRE(Rational(1928) * Rational(6373, 3) < Rational(2024LL * 2024LL));
    for (long long num : {1, 2, 5, 16}) {
        for (long long den : {1, 2, 4}) {
            for (long long k : {0, 1, 10, 100}) {
                REQUIRE(rhmc_rate_bound_strict(Rational(num, den), Rational(k)));
            }
        }
    }
    REQUIRE_THROWS_AS(rhmc_optimal_gamma(0.0, 0.0), ConfigError);
}

TEST_CASE("relaxation-time bounds and optimality constants") {
    REQUIRE(std::abs(trel_upper_bound(3.0, 482.0, 6373.0 / 3.0, std::exp(-1.0)) -
                     (3.0 + 2.0 * std::sqrt(482.0 * 6373.0 / 3.0))) < 1e-9);
    REQUIRE_THROWS_AS(trel_upper_bound(3.0, 482.0, 2124.0, 1.0), ConfigError);

    REQUIRE(trel_lower_from_sing(0.25) == 2.0);
    REQUIRE_THROWS_AS(trel_lower_from_sing(0.0), ConfigError);

    REQUIRE(std::abs(lift_lower_bound(2.0) - std::sqrt(2.0) / (2.0 * std::sqrt(2.0))) < 1e-15);
    REQUIRE(std::abs(optimality_constant(2.7291, 2.0) - 2.7291 * 2.0 * std::sqrt(2.0) / std::sqrt(2.0)) <
            1e-12);

    REQUIRE(std::abs(corollary_optimality(0.0) - 2.0 * std::sqrt(2.0) * 2027.0) < 1e-9);
    REQUIRE(std::abs(corollary_optimality(7.0) - 2.0 * std::sqrt(2.0) * (2024.0 * std::sqrt(2.0) + 3.0)) <
            1e-9);
    REQUIRE(std::abs(corollary_optimality(0.0, 1.0) - 2.0 * std::sqrt(2.0) * 2895.0) < 1e-9);
    REQUIRE_THROWS_AS(corollary_optimality(-1.0), ConfigError);
    REQUIRE_THROWS_AS(corollary_optimality(0.0, 0.5), ConfigError);
}

TEST_CASE("sandwich certificate on closed-form curves") {
    TimeGrid grid{0.0, 10.0, 0.01};
    DecayCurve critical = curve_from_function(critical_norm_closed_form, grid);
    DecayCurve exponential = curve_from_function([](double t) { return std::exp(-0.5 * t); }, grid);
    for (double eps : {0.5, std::exp(-1.0), 0.1}) {
        SandwichResult sc = sandwich_t0(critical, eps);
        REQUIRE(sc.t_rel <= sc.t0);
        REQUIRE(sc.t0 <= 2.0 * sc.t_rel);
        SandwichResult se = sandwich_t0(exponential, eps);
        REQUIRE(se.t_rel <= se.t0);
        // a pure exponential admits a certificate with T = 0: t0 is tight
        REQUIRE(se.t0 <= 1.01 * se.t_rel);
    }
    REQUIRE(sandwich_t0(critical, 1.0).t0 == 0.0);
    REQUIRE_THROWS_AS(sandwich_t0(critical, 0.0), ConfigError);
}

TEST_CASE("delayed contractivity certificate on the galerkin semigroup") {
    Potential pot = quadratic_potential(1.0, 1);
    double gamma = rhmc_optimal_gamma(1.0, 0.0).gamma;
    GeneratorMatrix G = assemble_galerkin("rhmc", pot, gamma, 16);
    TimeGrid grid{0.0, 50.0, 0.5};
    ContractivityCertificate good = certify_delayed_contractivity(G, 1.0 / 2023.8, 3.0, grid);
    REQUIRE(good.pass);
    REQUIRE(good.sup <= 1.0 + 1e-6);
    ContractivityCertificate bad = certify_delayed_contractivity(G, 10.0, 3.0, grid);
    REQUIRE_FALSE(bad.pass);
    REQUIRE(bad.sup > 1.0);
    REQUIRE_THROWS_AS(certify_delayed_contractivity(G, 0.0, 3.0, grid), ConfigError);
}

TEST_CASE("full pipeline on the standard gaussian reproduces every headline number") {
    BoundsReport rep = run_bounds_pipeline(quadratic_potential(1.0, 1));
    REQUIRE(rep.m == 1.0);
    REQUIRE_FALSE(rep.m_estimated);
    REQUIRE(rep.kappa == 0.0);
    REQUIRE(rep.T == 3.0);
    REQUIRE(std::abs(rep.C0 - 482.0) < 1e-10);
    REQUIRE(std::abs(rep.C1 - 6373.0 / 3.0) < 1e-9);
    REQUIRE(rep.C0_exact == "482/1");
    REQUIRE(rep.C1_exact == "6373/3");
    REQUIRE(std::abs(rep.gamma - 2.0993643245234033) < 1e-12);
    REQUIRE(std::abs(1.0 / rep.nu - 2023.7872088405607) < 1e-8);
    REQUIRE(std::abs(rep.trel_upper - (3.0 + 2023.7872088405607)) < 1e-8);
    REQUIRE(std::abs(rep.trel_base_measured - 2.0) < 1e-3);
    REQUIRE(std::abs(rep.trel_lift_measured - 2.7733) < 5e-3);
    REQUIRE(std::abs(rep.sing_lift - 0.40009) < 1e-4);
    REQUIRE(std::abs(rep.trel_lower_sing - 0.5 / rep.sing_lift) < 1e-12);
    REQUIRE(std::abs(rep.lift_lower - lift_lower_bound(rep.trel_base_measured)) < 1e-12);
    REQUIRE(std::abs(rep.optimality_C_measured - 5.5466) < 5e-3);
    REQUIRE(std::abs(rep.corollary_C - 2.0 * std::sqrt(2.0) * 2027.0) < 1e-9);
    REQUIRE(rep.contractivity_pass);
    REQUIRE(rep.contractivity_sup <= 1.0);
}

TEST_CASE("pipeline honors explicit T and gamma") {
    BoundsOptions opt;
    opt.T = 1.0;
    opt.gamma = 2.0;
    opt.degree = 12;
    BoundsReport rep = run_bounds_pipeline(quadratic_potential(1.0, 1), opt);
    REQUIRE(rep.T == 1.0);
    REQUIRE(std::abs(rep.C0 - 178.0) < 1e-10);
    REQUIRE(std::abs(rep.C1 - 8599.0) < 1e-10);
    REQUIRE(rep.C0_exact.empty());
    REQUIRE(rep.gamma == 2.0);
    REQUIRE(std::abs(rep.nu - contraction_rate(2.0, 178.0, 8599.0)) < 1e-15);
}

TEST_CASE("relaxation scaling in the mass: doubling sqrt(m) halves t_rel") {
    // at the critical friction 2 sqrt(m), t_rel(m) = t_rel(1)/sqrt(m)
    GeneratorMatrix G4 = assemble_galerkin("langevin", quadratic_potential(4.0, 1), 4.0, 16);
    DecayCurve curve = operator_norm_decay(G4, TimeGrid{0.0, 4.0, 0.02});
    double t4 = relaxation_time(curve, std::exp(-1.0)).t;
    REQUIRE(std::abs(t4 - scale_relaxation(2.72912, 4.0)) < 1e-3);
}
