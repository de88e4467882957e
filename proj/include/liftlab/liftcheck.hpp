#ifndef LIFTLAB_LIFTCHECK_HPP
#define LIFTLAB_LIFTCHECK_HPP

#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "liftlab/common.hpp"
#include "liftlab/polynomial.hpp"
#include "liftlab/potential.hpp"
#include "liftlab/rng.hpp"
#include "liftlab/samplers.hpp"

namespace liftlab {

// Lifted generator applied to a position observable: L(f∘π)(x,v) = v·∇f(x).
// The same function serves Hamiltonian flow, Langevin, RHMC and BPS because
// their velocity-only parts annihilate position observables.
inline double apply_lifted_generator(const TestFunction& f, const PhaseState& s) {
    std::vector<double> g = f.gradient_at(s.x);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * s.v[i];
    return acc;
}

struct LiftCheckOptions {
    long samples = 1000000;
    int chains = 16;
    std::uint64_t seed = 1;
    double k_sigma = 4.0;
    long burn_in_steps = 1000000;
    int thinning = 10;
    double step = 1e-3;
    int quadrature_nodes = 200;
    int threads = 1;  // chains are split across threads; estimates do not depend on the split
};

struct LiftPairResult {
    int f_index = 0;
    int g_index = 0;
    double first_estimate = 0.0;
    double first_se = 0.0;
    double second_estimate = 0.0;
    double second_se = 0.0;
    double dirichlet_target = 0.0;
    bool first_pass = true;
    bool second_pass = true;
    bool trivial = false;  // both gradients vanish identically
};

struct LiftReport {
    std::string process;
    std::string dictionary_label;
    long samples = 0;
    double k_sigma = 4.0;
    bool stationarity_ok = true;
    bool all_pass = true;
    std::vector<LiftPairResult> pairs;
    double position_mean = 0.0, position_mean_se = 0.0;
    double position_second = 0.0, position_second_se = 0.0;
};

namespace detail {

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSE across_chain_mean(const std::vector<double>& chain_means) {
    MeanSE out;
    auto C = static_cast<double>(chain_means.size());
    for (double m : chain_means) out.mean += m;
    out.mean /= C;
    double var = 0.0;
    for (double m : chain_means) var += (m - out.mean) * (m - out.mean);
    var /= std::max(1.0, C - 1.0);
    out.se = std::sqrt(var / C);
    return out;
}

}  // namespace detail

// Monte Carlo verification of the lift identities over an explicit
// dictionary: first-order estimates of ∫ L(f_i∘π) f_j∘π dμ̂ target 0,
// second-order estimates of 1/2 ∫ L(f_i∘π) L(f_j∘π) dμ̂ target the Dirichlet
// form, both judged at k_sigma across-chain standard errors. Exact sampling
// for Gaussian targets; overdamped MCMC with burn-in, thinning and a
// moments-vs-quadrature stationarity gate otherwise. The estimator depends
// only on the μ̂ stream, never on the named process: the lifted action on
// position observables is the same function for every implemented lift.
inline LiftReport check_dictionary(const std::string& process, const TargetMeasure& mu_hat,
                                   const std::vector<TestFunction>& dict, const LiftCheckOptions& opt = {}) {
    require(mu_hat.phase_space, "check_dictionary: measure must be the phase-space target");
    require(!dict.empty(), "check_dictionary: dictionary is empty");
    require(opt.samples >= opt.chains && opt.chains >= 2, "check_dictionary: need samples >= chains >= 2");
    require(process == "hamiltonian" || process == "langevin" || process == "rhmc" || process == "bps",
            "check_dictionary: process must be hamiltonian | langevin | rhmc | bps");
    const Potential& pot = mu_hat.potential;
    require(pot.d == 1, "check_dictionary: implemented for d = 1");

    const int D = static_cast<int>(dict.size());
    std::vector<TestFunction> grads;
    grads.reserve(dict.size());
    for (const auto& f : dict) grads.push_back(f.partial(0));

    const bool exact = pot.quadratic_mass.has_value();
    const long per_chain = opt.samples / opt.chains;
    const std::size_t stride = static_cast<std::size_t>(D) * static_cast<std::size_t>(D);
    std::vector<double> first_means(static_cast<std::size_t>(opt.chains) * stride);
    std::vector<double> second_means(static_cast<std::size_t>(opt.chains) * stride);
    std::vector<double> x_means(static_cast<std::size_t>(opt.chains));
    std::vector<double> x2_means(static_cast<std::size_t>(opt.chains));

    auto run_chain = [&](int c) {
        std::mt19937_64 rng = chain_rng(opt.seed, static_cast<std::uint64_t>(c));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> s_first(stride, 0.0), s_second(stride, 0.0);
        double s_x = 0.0, s_x2 = 0.0;
        std::vector<double> gvals(static_cast<std::size_t>(D)), dvals(static_cast<std::size_t>(D));
        PhaseState s{{0.0}, {}};
        std::vector<double> xi(1);
        if (!exact) {
            for (long k = 0; k < opt.burn_in_steps; ++k) {
                xi[0] = normal(rng);
                s = overdamped_step(s, pot, opt.step, xi);
            }
        }
        const double inv_sqrt_m = exact ? 1.0 / std::sqrt(*pot.quadratic_mass) : 0.0;
        for (long n = 0; n < per_chain; ++n) {
            double x;
            if (exact) {
                x = inv_sqrt_m * normal(rng);
            } else {
                for (int th = 0; th < opt.thinning; ++th) {
                    xi[0] = normal(rng);
                    s = overdamped_step(s, pot, opt.step, xi);
                }
                x = s.x[0];
            }
            double v = normal(rng);
            for (int i = 0; i < D; ++i) {
                gvals[static_cast<std::size_t>(i)] = dict[static_cast<std::size_t>(i)].evaluate(x);
                dvals[static_cast<std::size_t>(i)] = grads[static_cast<std::size_t>(i)].evaluate(x);
            }
            for (int i = 0; i < D; ++i) {
                double zi = v * dvals[static_cast<std::size_t>(i)];
                for (int j = 0; j < D; ++j) {
                    s_first[static_cast<std::size_t>(i * D + j)] += zi * gvals[static_cast<std::size_t>(j)];
                    s_second[static_cast<std::size_t>(i * D + j)] +=
                        0.5 * zi * v * dvals[static_cast<std::size_t>(j)];
                }
            }
            s_x += x;
            s_x2 += x * x;
        }
        auto base = static_cast<std::size_t>(c) * stride;
        for (std::size_t q = 0; q < stride; ++q) {
            first_means[base + q] = s_first[q] / static_cast<double>(per_chain);
            second_means[base + q] = s_second[q] / static_cast<double>(per_chain);
        }
        x_means[static_cast<std::size_t>(c)] = s_x / static_cast<double>(per_chain);
        x2_means[static_cast<std::size_t>(c)] = s_x2 / static_cast<double>(per_chain);
    };

    int workers = std::max(1, std::min(opt.threads, opt.chains));
    if (workers == 1) {
        for (int c = 0; c < opt.chains; ++c) run_chain(c);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                try {
                    for (int c = w; c < opt.chains; c += workers) run_chain(c);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    LiftReport report;
    report.process = process;
    report.dictionary_label = exact ? "hermite" : "stieltjes-orthonormal";
    report.samples = per_chain * opt.chains;
    report.k_sigma = opt.k_sigma;

    MeasureQuadrature quad(pot, opt.quadrature_nodes);
    detail::MeanSE mx = detail::across_chain_mean(x_means);
    detail::MeanSE mx2 = detail::across_chain_mean(x2_means);
    report.position_mean = mx.mean;
    report.position_mean_se = mx.se;
    report.position_second = mx2.mean;
    report.position_second_se = mx2.se;
    report.stationarity_ok = std::abs(mx.mean - quad.moment(1)) <= opt.k_sigma * mx.se &&
                             std::abs(mx2.mean - quad.moment(2)) <= opt.k_sigma * mx2.se;
    if (!exact && !report.stationarity_ok)
        throw ConvergenceError("check_dictionary: sampler failed the stationarity diagnostic (moments vs quadrature)");

    TargetMeasure mu_pos = TargetMeasure::position(pot);
    std::vector<double> chain_slot(static_cast<std::size_t>(opt.chains));
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            LiftPairResult pr;
            pr.f_index = i;
            pr.g_index = j;
            auto off = static_cast<std::size_t>(i * D + j);
            for (int c = 0; c < opt.chains; ++c)
                chain_slot[static_cast<std::size_t>(c)] = first_means[static_cast<std::size_t>(c) * stride + off];
            detail::MeanSE first = detail::across_chain_mean(chain_slot);
            for (int c = 0; c < opt.chains; ++c)
                chain_slot[static_cast<std::size_t>(c)] = second_means[static_cast<std::size_t>(c) * stride + off];
            detail::MeanSE second = detail::across_chain_mean(chain_slot);
            pr.first_estimate = first.mean;
            pr.first_se = first.se;
            pr.second_estimate = second.mean;
            pr.second_se = second.se;
            pr.dirichlet_target = dirichlet_form(dict[static_cast<std::size_t>(i)],
                                                 dict[static_cast<std::size_t>(j)], mu_pos, opt.quadrature_nodes);
            pr.trivial = grads[static_cast<std::size_t>(i)].is_zero() && grads[static_cast<std::size_t>(j)].is_zero();
            if (pr.trivial) {
                pr.first_pass = pr.first_estimate == 0.0;
                pr.second_pass = pr.second_estimate == pr.dirichlet_target;
            } else {
                pr.first_pass = std::abs(pr.first_estimate) <= opt.k_sigma * pr.first_se;
                pr.second_pass = std::abs(pr.second_estimate - pr.dirichlet_target) <= opt.k_sigma * pr.second_se;
            }
            report.all_pass = report.all_pass && pr.first_pass && pr.second_pass;
            report.pairs.push_back(pr);
        }
    }
    return report;
}

// Dictionary of target-orthonormal polynomials up to max_degree (Hermite for
// Gaussian targets).
inline LiftReport run_dictionary(const std::string& process, const TargetMeasure& mu_hat, int max_degree,
                                 const LiftCheckOptions& opt = {}) {
    require(max_degree >= 0, "run_dictionary: degree must be nonnegative");
    std::vector<TestFunction> dict =
        polynomial_dictionary(mu_hat.potential, max_degree, opt.quadrature_nodes);
    return check_dictionary(process, mu_hat, dict, opt);
}

struct LiftEntry {
    double estimate = 0.0;
    double se = 0.0;
    double target = 0.0;
    bool pass = true;
};

inline LiftEntry check_first_order(const TestFunction& f, const TestFunction& g, const TargetMeasure& mu_hat,
                                   long samples, LiftCheckOptions opt = {}) {
    opt.samples = samples;
    LiftReport rep = check_dictionary("langevin", mu_hat, {f, g}, opt);
    const LiftPairResult& pr = rep.pairs[1];  // (f_index 0, g_index 1)
    return {pr.first_estimate, pr.first_se, 0.0, pr.first_pass};
}

inline LiftEntry check_second_order(const TestFunction& f, const TestFunction& g, const TargetMeasure& mu_hat,
                                    long samples, LiftCheckOptions opt = {}) {
    opt.samples = samples;
    LiftReport rep = check_dictionary("langevin", mu_hat, {f, g}, opt);
    const LiftPairResult& pr = rep.pairs[1];
    return {pr.second_estimate, pr.second_se, pr.dirichlet_target, pr.second_pass};
}

}  // namespace liftlab

#endif
