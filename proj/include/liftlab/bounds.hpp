#ifndef LIFTLAB_BOUNDS_HPP
#define LIFTLAB_BOUNDS_HPP

#include <boost/rational.hpp>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "liftlab/common.hpp"
#include "liftlab/galerkin.hpp"
#include "liftlab/linalg.hpp"
#include "liftlab/potential.hpp"
#include "liftlab/spectral.hpp"

namespace liftlab {

using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

inline std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Divergence constants c0(T) = 19T^2 + 70/m and
// c1(T) = 328 + 75 kappa * max(1/sqrt(m), T/pi)^2 + 1821/(m T^2).
struct DivergenceConstants {
    double T = 0.0;
    double m = 0.0;
    double kappa = 0.0;
    double c0 = 0.0;
    double c1 = 0.0;
};

inline DivergenceConstants divergence_constants(double T, double m, double kappa) {
    require(T > 0, "divergence_constants: T must be positive");
    require(m > 0, "divergence_constants: m must be positive");
    require(kappa >= 0, "divergence_constants: kappa must be nonnegative");
    DivergenceConstants c;
    c.T = T;
    c.m = m;
    c.kappa = kappa;
    c.c0 = 19.0 * T * T + 70.0 / m;
    double mx = std::max(1.0 / std::sqrt(m), T / M_PI);
    c.c1 = 328.0 + 75.0 * kappa * mx * mx + 1821.0 / (m * T * T);
    return c;
}

// Exact-rational path, parameterized by T^2 so that T = 3/sqrt(m) stays
// rational. The max branch is decided by comparing T^2 m against a rational
// bracketing of pi^2; inputs inside the bracket are rejected rather than
// silently rounded.
struct DivergenceConstantsExact {
    Rational T_squared;
    Rational m;
    Rational kappa;
    Rational c0;
    Rational c1;
};

inline DivergenceConstantsExact divergence_constants_exact(const Rational& T_squared, const Rational& m,
                                                           const Rational& kappa) {
    require(T_squared > 0, "divergence_constants_exact: T^2 must be positive");
    require(m > 0, "divergence_constants_exact: m must be positive");
    require(kappa >= 0, "divergence_constants_exact: kappa must be nonnegative");
    DivergenceConstantsExact c;
    c.T_squared = T_squared;
    c.m = m;
    c.kappa = kappa;
    c.c0 = Rational(19) * T_squared + Rational(70) / m;
    const Rational pi2_lo(9869604401089358LL, 1000000000000000LL);
    const Rational pi2_hi(9869604401089359LL, 1000000000000000LL);
    Rational cmp = T_squared * m;
    Rational max_sq;  // max(1/sqrt(m), T/pi)^2
    if (cmp < pi2_lo) {
        max_sq = Rational(1) / m;
    } else {
        // The T/pi branch (or a tie inside the bracket) makes c1 irrational.
        throw ConfigError("divergence_constants_exact: max() resolves to T/pi, which is irrational; use the floating path");
    }
    c.c1 = Rational(328) + Rational(75) * kappa * max_sq + Rational(1821) / (m * T_squared);
    return c;
}

// Space-time Poincare constants C0 = 2 c0, C1 = 3 + 4 c1.
inline std::pair<double, double> stpi_constants(const DivergenceConstants& c) {
    return {2.0 * c.c0, 3.0 + 4.0 * c.c1};
}

inline std::pair<Rational, Rational> stpi_constants_exact(const DivergenceConstantsExact& c) {
    return {Rational(2) * c.c0, Rational(3) + Rational(4) * c.c1};
}

// nu = gamma / (gamma^2 C0 + C1); maximized at gamma* = sqrt(C1/C0) with
// nu(gamma*) = 1/(2 sqrt(C0 C1)).
inline double contraction_rate(double gamma, double C0, double C1) {
    require(gamma > 0, "contraction_rate: gamma must be positive");
    return gamma / (gamma * gamma * C0 + C1);
}

inline double optimal_gamma_for_rate(double C0, double C1) { return std::sqrt(C1 / C0); }

struct RhmcOptimal {
    double gamma = 0.0;
    double inv_nu = 0.0;
    double bound = 0.0;  // strict upper bound 2024/sqrt(m) sqrt(1 + kappa/(7m))
};

// Optimal refresh rate at T = 3/sqrt(m): gamma = sqrt((2124 1/3 m + 300 kappa)/482)
// and 1/nu = 2 * 482 gamma / m. The strict bound 1/nu < 2024/sqrt(m) *
// sqrt(1 + kappa/(7m)) is asserted by exact rational comparison of squares.
inline RhmcOptimal rhmc_optimal_gamma(double m, double kappa) {
    require(m > 0, "rhmc_optimal_gamma: m must be positive");
    require(kappa >= 0, "rhmc_optimal_gamma: kappa must be nonnegative");
    RhmcOptimal out;
    double gamma_sq = (6373.0 / 3.0 * m + 300.0 * kappa) / 482.0;
    out.gamma = std::sqrt(gamma_sq);
    out.inv_nu = 2.0 * 482.0 * out.gamma / m;
    out.bound = 2024.0 / std::sqrt(m) * std::sqrt(1.0 + kappa / (7.0 * m));
    require(out.inv_nu < out.bound, "rhmc_optimal_gamma: strict rate bound violated in floating point");
    return out;
}

// Exact form of the strict inequality above for rational (m, kappa):
// (2*482*gamma/m)^2 = 1928 (6373 m/3 + 300 kappa)/m^2 and
// (2024/sqrt(m) sqrt(1+kappa/(7m)))^2 = 2024^2 (1 + kappa/(7m))/m.
inline bool rhmc_rate_bound_strict(const Rational& m, const Rational& kappa) {
    require(m > 0 && kappa >= 0, "rhmc_rate_bound_strict: need m > 0, kappa >= 0");
    Rational lhs2 = Rational(1928) * (Rational(6373, 3) * m + Rational(300) * kappa) / (m * m);
    Rational rhs2 = Rational(2024LL * 2024LL) * (Rational(1) + kappa / (Rational(7) * m)) / m;
    return lhs2 < rhs2;
}

// t_rel(eps) <= T + 2 sqrt(C0 C1) log(1/eps).
inline double trel_upper_bound(double T, double C0, double C1, double eps) {
    require(eps > 0 && eps < 1, "trel_upper_bound: eps must lie in (0,1)");
    require(T >= 0 && C0 > 0 && C1 > 0, "trel_upper_bound: invalid constants");
    return T + 2.0 * std::sqrt(C0 * C1) * std::log(1.0 / eps);
}

// t_rel >= 1/(2 sing(L)).
inline double trel_lower_from_sing(double sing) {
    require(sing > 0, "trel_lower_from_sing: sing must be positive");
    return 0.5 / sing;
}

// Square-root lower bound for every second-order lift.
inline double lift_lower_bound(double t_rel_base) {
    require(t_rel_base > 0, "lift_lower_bound: base relaxation time must be positive");
    return std::sqrt(t_rel_base) / (2.0 * std::sqrt(2.0));
}

// Smallest C with t_rel(lift) <= C * (1/(2 sqrt 2)) sqrt(t_rel(base)).
inline double optimality_constant(double t_rel_lift, double t_rel_base) {
    require(t_rel_lift > 0 && t_rel_base > 0, "optimality_constant: inputs must be positive");
    return t_rel_lift * 2.0 * std::sqrt(2.0) / std::sqrt(t_rel_base);
}

// Certified optimality constants for the RHMC class with kappa <= c m:
// C = 2 sqrt2 (2024 sqrt(1+c/7) + 3), and for refresh rates with
// 1/A <= gamma/sqrt(m) <= A, C(A) = 2 sqrt2 (482 (6 + 5c/7) A + 3).
inline double corollary_optimality(double c, std::optional<double> A = std::nullopt) {
    require(c >= 0, "corollary_optimality: c must be nonnegative");
    if (!A) return 2.0 * std::sqrt(2.0) * (2024.0 * std::sqrt(1.0 + c / 7.0) + 3.0);
    require(*A >= 1, "corollary_optimality: A must be >= 1");
    return 2.0 * std::sqrt(2.0) * (482.0 * (6.0 + 5.0 * c / 7.0) * *A + 3.0);
}

struct SandwichResult {
    double t_rel = 0.0;
    double t0 = 0.0;
};

// t0(eps) = min over (nu, T) certificates of log(1/eps)/nu + T, with nu per T
// fitted on the curve grid. The fitted rate is shrunk by nu_slack so the
// certificate stays valid under grid refinement; the sandwich
// t_rel <= t0 <= 2 t_rel is then asserted, not assumed.
inline SandwichResult sandwich_t0(const DecayCurve& curve, double eps, int T_count = 400,
                                  double nu_slack = 1e-5) {
    require(eps > 0 && eps <= 1, "sandwich_t0: eps must lie in (0,1]");
    if (eps == 1.0) return {0.0, 0.0};
    RelaxationTime rt = relaxation_time(curve, eps);
    double t_rel = rt.t;
    double best = std::numeric_limits<double>::infinity();
    const double log_inv_eps = std::log(1.0 / eps);
    for (int j = 0; j < T_count; ++j) {
        double T = 2.0 * t_rel * j / (T_count - 1);
        double nu = std::numeric_limits<double>::infinity();
        bool feasible = false;
        for (std::size_t i = 0; i < curve.t.size(); ++i) {
            if (curve.t[i] <= T + 1e-12) continue;
            double val = std::min(curve.value[i], 1.0);
            double rate = -std::log(val) / (curve.t[i] - T);
            nu = std::min(nu, rate);
            feasible = true;
        }
        if (!feasible || !(nu > 0)) continue;
        nu *= 1.0 - nu_slack;
        best = std::min(best, log_inv_eps / nu + T);
    }
    if (!std::isfinite(best))
        throw ConvergenceError("sandwich_t0: no feasible (nu, T) certificate on the grid");
    if (!(t_rel <= best && best <= 2.0 * t_rel))
        throw TheoremViolation("sandwich_t0: sandwich t_rel <= t0 <= 2 t_rel violated: t_rel = " +
                               std::to_string(t_rel) + ", t0 = " + std::to_string(best));
    return {t_rel, best};
}

struct ContractivityCertificate {
    bool pass = false;
    double sup = 0.0;  // sup over the grid of ||exp(tG)|| e^{nu (t - T)}
};

// Checks the T-delayed bound ||exp(tG)|| <= e^{-nu(t-T)} on a uniform grid up
// to a truncation tolerance.
inline ContractivityCertificate certify_delayed_contractivity(const GeneratorMatrix& G, double nu, double T,
                                                              const TimeGrid& grid, double tol = 1e-6) {
    grid.validate();
    require(nu > 0 && T >= 0, "certify_delayed_contractivity: need nu > 0, T >= 0");
    Propagator prop(G.matrix);
    int n = grid.count();
    std::vector<double> norms = prop.norms_on_grid(grid.start, grid.step, n);
    ContractivityCertificate out;
    for (int k = 0; k < n; ++k) {
        double t = grid.at(k);
        out.sup = std::max(out.sup, norms[static_cast<std::size_t>(k)] * std::exp(nu * (t - T)));
    }
    out.pass = out.sup <= 1.0 + tol;
    return out;
}

// Full constants-and-certificates pipeline for one target. Measured
// quantities come from Galerkin ground truth; every stated ordering is
// asserted and a violation raises TheoremViolation (the headline regression
// signal).
struct BoundsReport {
    double m = 0.0;
    bool m_estimated = false;  // true when m is the Galerkin gap of the collapsed process
    double kappa = 0.0;
    double T = 0.0;
    double C0 = 0.0, C1 = 0.0;
    std::string C0_exact, C1_exact;  // set when (T^2, m, kappa) are rational
    double gamma = 0.0;
    double nu = 0.0;
    double eps = 0.0;
    double trel_upper = 0.0;
    double trel_lift_measured = 0.0;
    double sing_lift = 0.0;
    double trel_lower_sing = 0.0;
    double trel_base_measured = 0.0;
    double lift_lower = 0.0;
    double optimality_C_measured = 0.0;
    double corollary_C = 0.0;
    bool contractivity_pass = false;
    double contractivity_sup = 0.0;
    bool truncation_converged = true;
};

struct BoundsOptions {
    double eps = std::exp(-1.0);
    int degree = 16;
    int quadrature_nodes = 200;
    std::optional<double> T;      // default: auto, T = 3/sqrt(m)
    std::optional<double> gamma;  // default: auto, gamma = sqrt(C1/C0)
    bool check_truncation = false;
};

inline BoundsReport run_bounds_pipeline(const Potential& pot, const BoundsOptions& opt = {}) {
    require(pot.d == 1, "run_bounds_pipeline: implemented for d = 1");
    BoundsReport rep;
    rep.eps = opt.eps;
    rep.kappa = pot.hessian_lower_bound;

    GeneratorMatrix base = assemble_galerkin("overdamped", pot, 0.0, opt.degree, opt.quadrature_nodes);
    if (pot.poincare_constant) {
        rep.m = *pot.poincare_constant;
    } else {
        // Poincare constant of the position marginal estimated as twice the
        // Galerkin gap of the collapsed generator (gap equals m/2).
        rep.m = 2.0 * spectral_gap_of_generator(base.matrix);
        rep.m_estimated = true;
    }
    require(rep.m > 0, "run_bounds_pipeline: nonpositive Poincare constant");

    rep.T = opt.T ? *opt.T : 3.0 / std::sqrt(rep.m);
    DivergenceConstants dc = divergence_constants(rep.T, rep.m, rep.kappa);
    auto [C0, C1] = stpi_constants(dc);
    rep.C0 = C0;
    rep.C1 = C1;
    if (!opt.T) {
        // T = 3/sqrt(m) keeps T^2 rational whenever m is; expose the exact
        // constants when the conversion is faithful.
        Rational m_rat;
        bool rational_m = std::abs(rep.m - std::round(rep.m)) < 1e-12 && rep.m < 1e6;
        if (rational_m) {
            m_rat = Rational(static_cast<long long>(std::llround(rep.m)));
            bool rational_kappa = std::abs(rep.kappa - std::round(rep.kappa)) < 1e-12 && rep.kappa < 1e6;
            if (rational_kappa) {
                DivergenceConstantsExact ec = divergence_constants_exact(
                    Rational(9) / m_rat, m_rat, Rational(static_cast<long long>(std::llround(rep.kappa))));
                auto [eC0, eC1] = stpi_constants_exact(ec);
                rep.C0_exact = to_string(eC0);
                rep.C1_exact = to_string(eC1);
            }
        }
    }

    rep.gamma = opt.gamma ? *opt.gamma : optimal_gamma_for_rate(rep.C0, rep.C1);
    require(rep.gamma > 0, "run_bounds_pipeline: gamma must be positive");
    rep.nu = contraction_rate(rep.gamma, rep.C0, rep.C1);
    rep.trel_upper = trel_upper_bound(rep.T, rep.C0, rep.C1, rep.eps);

    // Galerkin ground truth for the lift and the collapsed base process.
    GeneratorMatrix lift = assemble_galerkin("rhmc", pot, rep.gamma, opt.degree, opt.quadrature_nodes);
    rep.sing_lift = singular_value_gap(lift);
    rep.trel_lower_sing = trel_lower_from_sing(rep.sing_lift);

    double horizon_base = 4.0 * std::log(1.0 / rep.eps) / rep.m + 1.0;
    TimeGrid base_grid{0.0, horizon_base, horizon_base / 400.0};
    DecayCurve base_curve = operator_norm_decay(base, base_grid);
    rep.trel_base_measured = relaxation_time(base_curve, rep.eps).t;

    double horizon_lift = 8.0;
    TimeGrid lift_grid{0.0, horizon_lift, 0.05};
    DecayCurve lift_curve = operator_norm_decay(lift, lift_grid, opt.check_truncation,
                                                opt.check_truncation ? &pot : nullptr, opt.quadrature_nodes);
    rep.truncation_converged = lift_curve.truncation_converged;
    while (true) {
        bool crossed = false;
        for (double v : lift_curve.value)
            if (v <= rep.eps) crossed = true;
        if (crossed) break;
        horizon_lift *= 2.0;
        require(horizon_lift <= 1024.0, "run_bounds_pipeline: lift curve does not cross eps");
        lift_grid = TimeGrid{0.0, horizon_lift, horizon_lift / 160.0};
        lift_curve = operator_norm_decay(lift, lift_grid);
    }
    rep.trel_lift_measured = relaxation_time(lift_curve, rep.eps).t;

    rep.lift_lower = lift_lower_bound(rep.trel_base_measured);
    rep.optimality_C_measured = optimality_constant(rep.trel_lift_measured, rep.trel_base_measured);
    rep.corollary_C = corollary_optimality(rep.kappa / rep.m);

    TimeGrid cert_grid{0.0, 50.0, 0.5};
    ContractivityCertificate cert = certify_delayed_contractivity(lift, rep.nu, rep.T, cert_grid);
    rep.contractivity_pass = cert.pass;
    rep.contractivity_sup = cert.sup;

    // Ordering chain; failures are theorem violations, the headline signal.
    if (!(rep.trel_lower_sing <= rep.trel_lift_measured + 1e-9))
        throw TheoremViolation("bounds: sing lower bound exceeds measured lift relaxation time");
    if (!(rep.trel_lift_measured <= rep.trel_upper + 1e-9))
        throw TheoremViolation("bounds: measured lift relaxation time exceeds the certified upper bound");
    if (!(rep.lift_lower <= rep.trel_lift_measured + 1e-9))
        throw TheoremViolation("bounds: square-root lower bound exceeds measured lift relaxation time");
    if (!(rep.corollary_C >= rep.optimality_C_measured))
        throw TheoremViolation("bounds: certified optimality constant is below the measured one");
    if (!rep.contractivity_pass)
        throw TheoremViolation("bounds: certified delayed contractivity fails on the Galerkin semigroup");
    return rep;
}

}  // namespace liftlab

#endif
