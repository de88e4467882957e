#ifndef LIFTLAB_SPECTRAL_HPP
#define LIFTLAB_SPECTRAL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "liftlab/common.hpp"
#include "liftlab/galerkin.hpp"
#include "liftlab/linalg.hpp"
#include "liftlab/potential.hpp"
#include "liftlab/rng.hpp"
#include "liftlab/samplers.hpp"

namespace liftlab {

struct TimeGrid {
    double start = 0.0;
    double stop = 5.0;
    double step = 0.01;

    void validate() const {
        require(step > 0, "TimeGrid: step must be positive");
        require(stop >= start && start >= 0, "TimeGrid: need 0 <= start <= stop");
    }
    int count() const { return static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1; }
    double at(int k) const { return start + k * step; }
};

// Operator-norm decay ||P_t|| on mean-zero functions along a time grid.
// evaluator, when set, computes the norm at arbitrary t and backs crossing
// refinement.
struct DecayCurve {
    std::vector<double> t;
    std::vector<double> value;
    std::string provenance;  // closed-form | galerkin | empirical
    std::function<double(double)> evaluator;
    std::vector<double> standard_error;  // empirical curves only
    bool truncation_converged = true;

    void check_invariants() const {
        require(!t.empty() && t.size() == value.size(), "DecayCurve: grid/value size mismatch");
        for (std::size_t i = 1; i < t.size(); ++i)
            require(t[i] > t[i - 1], "DecayCurve: time grid must be strictly increasing");
        // Monte Carlo curves satisfy the t=0 identity only within their SE.
        if (t.front() == 0.0 && provenance != "empirical")
            require(std::abs(value.front() - 1.0) <= 1e-10, "DecayCurve: value at t=0 must be 1");
    }
};

// ||exp(-tA)|| with A = [[0,-1],[1,gamma]]; equals the phase-space propagator
// norm for the standard Gaussian target.
inline double gaussian_propagator_norm(double gamma, double t) {
    require(gamma >= 0 && t >= 0, "gaussian_propagator_norm: gamma, t must be nonnegative");
    Eigen::MatrixXd A(2, 2);
    A << 0.0, -1.0, 1.0, gamma;
    return operator_norm(expm(-t * A));
}

// Closed form of the gamma = 2 (critical) norm curve.
inline double critical_norm_closed_form(double t) {
    return std::sqrt(1.0 + 2.0 * t * t + 2.0 * t * std::sqrt(1.0 + t * t)) * std::exp(-t);
}

// Spectral gap of the Gaussian kinetic Langevin generator at unit mass.
inline double langevin_gap(double gamma) {
    require(gamma >= 0, "langevin_gap: gamma must be nonnegative");
    if (gamma <= 2.0) return 0.5 * gamma;
    return 0.5 * (gamma - std::sqrt(gamma * gamma - 4.0));
}

// Relaxation-time scaling t_rel(P^(m)) = m^{-1/2} t_rel(P).
inline double scale_relaxation(double t_rel_at_unit_mass, double m) {
    require(m > 0, "scale_relaxation: m must be positive");
    return t_rel_at_unit_mass / std::sqrt(m);
}

inline DecayCurve curve_from_function(const std::function<double(double)>& norm_fn, const TimeGrid& grid,
                                      const std::string& provenance = "closed-form") {
    grid.validate();
    DecayCurve c;
    c.provenance = provenance;
    c.evaluator = norm_fn;
    int n = grid.count();
    c.t.reserve(static_cast<std::size_t>(n));
    c.value.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        c.t.push_back(grid.at(k));
        c.value.push_back(norm_fn(grid.at(k)));
    }
    c.check_invariants();
    return c;
}

// Norm decay of exp(tG) for a Galerkin matrix. check_truncation re-assembles
// at degree+4 and flags divergence above 1e-3 anywhere on the grid.
inline DecayCurve operator_norm_decay(const GeneratorMatrix& G, const TimeGrid& grid,
                                      bool check_truncation = false, const Potential* pot = nullptr,
                                      int quadrature_nodes = 200) {
    grid.validate();
    auto prop = std::make_shared<Propagator>(G.matrix);
    DecayCurve c;
    c.provenance = "galerkin";
    int n = grid.count();
    c.t.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) c.t[static_cast<std::size_t>(k)] = grid.at(k);
    c.value = prop->norms_on_grid(grid.start, grid.step, n);
    c.evaluator = [prop](double t) { return prop->norm_at(t); };
    if (check_truncation) {
        require(pot != nullptr, "operator_norm_decay: truncation check needs the potential");
        GeneratorMatrix refined =
            assemble_galerkin(G.process, *pot, G.gamma, G.degree_x + 4, quadrature_nodes);
        Propagator rp(refined.matrix);
        std::vector<double> rv = rp.norms_on_grid(grid.start, grid.step, n);
        double worst = 0.0;
        for (int k = 0; k < n; ++k)
            worst = std::max(worst, std::abs(rv[static_cast<std::size_t>(k)] - c.value[static_cast<std::size_t>(k)]));
        c.truncation_converged = worst < 1e-3;
    }
    c.check_invariants();
    return c;
}

struct RelaxationTime {
    double t = 0.0;
    bool persistent = true;  // norm stays below eps on the rest of the grid
};

// First eps-crossing of the decay curve, bracketed on the grid and refined by
// bisection on the evaluator to 1e-6 in t.
inline RelaxationTime relaxation_time(const DecayCurve& curve, double eps, double refine_tol = 1e-6) {
    require(eps > 0 && eps <= 1, "relaxation_time: eps must lie in (0, 1]");
    curve.check_invariants();
    if (eps == 1.0) return {0.0, true};
    std::size_t cross = curve.value.size();
    for (std::size_t i = 0; i < curve.value.size(); ++i) {
        if (curve.value[i] <= eps) {
            cross = i;
            break;
        }
    }
    if (cross == curve.value.size())
        throw ConvergenceError("relaxation_time: curve never crosses eps = " + std::to_string(eps) +
                               " within the grid");
    RelaxationTime out;
    for (std::size_t i = cross; i < curve.value.size(); ++i)
        if (curve.value[i] > eps) out.persistent = false;
    if (cross == 0) {
        out.t = curve.t.front();
        return out;
    }
    double lo = curve.t[cross - 1];
    double hi = curve.t[cross];
    if (curve.evaluator) {
        while (hi - lo > refine_tol) {
            double mid = 0.5 * (lo + hi);
            if (curve.evaluator(mid) <= eps) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.t = 0.5 * (lo + hi);
    } else {
        double v0 = curve.value[cross - 1];
        double v1 = curve.value[cross];
        out.t = v1 == v0 ? hi : lo + (v0 - eps) / (v0 - v1) * (hi - lo);
    }
    return out;
}

inline double singular_value_gap(const GeneratorMatrix& G) { return smallest_singular_value(G.matrix); }

// Cross-check of the galerkin-vs-refined truncation gate for scalar
// quantities (gap, sing, t_rel): |a - b| < 1e-3.
inline bool truncation_gate(double at_degree, double at_refined) {
    return std::abs(at_degree - at_refined) < 1e-3;
}

struct MixingTime {
    long steps = 0;
    bool mixed = false;
};

// Smallest k with max_x TV(delta_x P^k, target) <= tol, by doubling on stored
// binary powers and binary search; the cap turns a periodic or stuck chain
// into an explicit "no mixing" flag.
inline MixingTime tv_mixing_time(const Eigen::MatrixXd& P, const Eigen::VectorXd& target, double tol = 0.25,
                                 long cap = 1000000) {
    require(P.rows() == P.cols(), "tv_mixing_time: matrix must be square");
    require(P.rows() == target.size(), "tv_mixing_time: target size mismatch");
    require(P.minCoeff() >= -1e-14, "tv_mixing_time: negative transition probability");
    for (Eigen::Index i = 0; i < P.rows(); ++i)
        require(std::abs(P.row(i).sum() - 1.0) <= 1e-12, "tv_mixing_time: matrix must be row-stochastic");
    double tmass = target.sum();
    require(std::abs(tmass - 1.0) <= 1e-12 && target.minCoeff() >= -1e-14,
            "tv_mixing_time: target must be a distribution");

    auto distance = [&](const Eigen::MatrixXd& Pk) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < Pk.rows(); ++i)
            worst = std::max(worst, 0.5 * (Pk.row(i).transpose() - target).cwiseAbs().sum());
        return worst;
    };

    if (distance(P) <= tol) return {1, true};
    std::vector<Eigen::MatrixXd> powers{P};  // powers[j] = P^(2^j)
    long k = 1;
    while (2 * k <= cap) {
        Eigen::MatrixXd next = powers.back() * powers.back();
        powers.push_back(next);
        k *= 2;
        if (distance(next) <= tol) {
            // first crossing lies in (k/2, k]: binary search with the stored powers
            long lo = k / 2, hi = k;
            while (hi - lo > 1) {
                long mid = lo + (hi - lo) / 2;
                Eigen::MatrixXd Pm = Eigen::MatrixXd::Identity(P.rows(), P.cols());
                long bits = mid;
                std::size_t j = 0;
                while (bits > 0) {
                    if (bits & 1) Pm = Pm * powers[j];
                    bits >>= 1;
                    ++j;
                }
                if (distance(Pm) <= tol) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return {hi, true};
        }
    }
    return {cap, false};
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]);
        double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ||P_t f|| / ||f|| by nested Monte Carlo: outer stationary starts, inner
// conditional replicas; the pair estimator (sum^2 - sum of squares) makes the
// squared conditional mean unbiased.
struct EmpiricalDecayOptions {
    int outer = 200;
    int inner = 64;
    double step = 1e-3;
    std::uint64_t seed = 1;
    int quadrature_nodes = 200;
    int burn_in_steps = 200000;  // MCMC stationary starts for non-Gaussian targets
};

inline DecayCurve empirical_decay(const std::string& process, const Potential& pot, double gamma,
                                  const TestFunction& f, const TimeGrid& grid,
                                  const EmpiricalDecayOptions& opt = {}) {
    grid.validate();
    require(pot.d == 1, "empirical_decay: implemented for d = 1");
    require(process == "overdamped" || process == "langevin" || process == "rhmc" || process == "bps",
            "empirical_decay: unknown process");
    require(!f.is_constant(), "empirical_decay: f must be mean-zero and nonconstant");
    MeasureQuadrature quad(pot, opt.quadrature_nodes);
    TestFunction fc = f + TestFunction::constant(-quad.integrate([&](double x) { return f.evaluate(x); }));
    double norm2 = quad.integrate([&](double x) { return fc.evaluate(x) * fc.evaluate(x); });
    require(norm2 > 0, "empirical_decay: f has zero variance under the target");

    const bool phase = process != "overdamped";
    int n = grid.count();
    std::vector<double> sum_m2(static_cast<std::size_t>(n), 0.0);
    std::vector<double> sum_m2sq(static_cast<std::size_t>(n), 0.0);

    for (int o = 0; o < opt.outer; ++o) {
        std::mt19937_64 rng = chain_rng(opt.seed, static_cast<std::uint64_t>(o));
        std::normal_distribution<double> normal(0.0, 1.0);
        PhaseState start;
        if (pot.quadratic_mass) {
            start.x = {normal(rng) / std::sqrt(*pot.quadratic_mass)};
        } else {
            PhaseState s{{0.0}, {}};
            std::vector<double> xi(1);
            for (int k = 0; k < opt.burn_in_steps; ++k) {
                xi[0] = normal(rng);
                s = overdamped_step(s, pot, opt.step, xi);
            }
            start.x = s.x;
        }
        if (phase) start.v = {normal(rng)};

        std::vector<std::vector<double>> fvals(static_cast<std::size_t>(n),
                                               std::vector<double>(static_cast<std::size_t>(opt.inner)));
        for (int r = 0; r < opt.inner; ++r) {
            std::mt19937_64 rrng =
                chain_rng(opt.seed ^ 0xabcdef1234567891ULL,
                          static_cast<std::uint64_t>(o) * static_cast<std::uint64_t>(opt.inner) +
                              static_cast<std::uint64_t>(r));
            std::normal_distribution<double> rnormal(0.0, 1.0);
            PhaseState s = start;
            double current = 0.0;
            for (int k = 0; k < n; ++k) {
                double tk = grid.at(k);
                double dt = tk - current;
                if (dt > 0) {
                    if (process == "overdamped") {
                        int steps = static_cast<int>(std::ceil(dt / opt.step));
                        double hh = dt / steps;
                        std::vector<double> xi(1);
                        for (int q = 0; q < steps; ++q) {
                            xi[0] = rnormal(rrng);
                            s = overdamped_step(s, pot, hh, xi);
                        }
                    } else if (process == "langevin") {
                        int steps = static_cast<int>(std::ceil(dt / opt.step));
                        double hh = dt / steps;
                        std::vector<double> xi(1);
                        for (int q = 0; q < steps; ++q) {
                            xi[0] = rnormal(rrng);
                            s = langevin_step(s, pot, gamma, hh, xi);
                        }
                    } else if (process == "rhmc") {
                        s = rhmc_trajectory(s, pot, gamma, dt, opt.step, rrng).state;
                    } else {
                        s = bps_trajectory(s, pot, gamma, dt, rrng).state;
                    }
                    current = tk;
                }
                fvals[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = fc.evaluate(s.x[0]);
            }
        }
        for (int k = 0; k < n; ++k) {
            double sum = 0.0, sumsq = 0.0;
            for (double fv : fvals[static_cast<std::size_t>(k)]) {
                sum += fv;
                sumsq += fv * fv;
            }
            double R = opt.inner;
            double m2 = (sum * sum - sumsq) / (R * (R - 1.0));
            sum_m2[static_cast<std::size_t>(k)] += m2;
            sum_m2sq[static_cast<std::size_t>(k)] += m2 * m2;
        }
    }

    DecayCurve c;
    c.provenance = "empirical";
    c.t.resize(static_cast<std::size_t>(n));
    c.value.resize(static_cast<std::size_t>(n));
    c.standard_error.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        auto ku = static_cast<std::size_t>(k);
        c.t[ku] = grid.at(k);
        double O = opt.outer;
        double mean = sum_m2[ku] / O;
        double var = std::max(0.0, sum_m2sq[ku] / O - mean * mean) / std::max(1.0, O - 1.0);
        double se_m2 = std::sqrt(var);
        double val = std::sqrt(std::max(0.0, mean) / norm2);
        c.value[ku] = val;
        // delta method on sqrt; floor keeps the SE meaningful near zero
        c.standard_error[ku] = val > 1e-12 ? se_m2 / (2.0 * val * norm2) : std::sqrt(se_m2 / norm2);
    }
    double first_signal = c.value.size() > 1 ? c.value[1] : c.value[0];
    double first_se = c.standard_error.size() > 1 ? c.standard_error[1] : c.standard_error[0];
    if (first_signal > 0 && first_se > 0.2 * first_signal)
        throw ConvergenceError("empirical_decay: inner replica count too small (SE " +
                               std::to_string(first_se) + " exceeds 20% of estimate " +
                               std::to_string(first_signal) + ")");
    return c;
}

}  // namespace liftlab

#endif
