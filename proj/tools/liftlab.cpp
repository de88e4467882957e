// liftlab: simulate second-order lifts of reversible diffusions, verify the
// lift identities by Monte Carlo, and compute relaxation times, spectral and
// singular value gaps, and contraction-rate certificates.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liftlab/bounds.hpp"
#include "liftlab/config.hpp"
#include "liftlab/galerkin.hpp"
#include "liftlab/liftcheck.hpp"
#include "liftlab/polynomial.hpp"
#include "liftlab/potential.hpp"
#include "liftlab/report.hpp"
#include "liftlab/samplers.hpp"
#include "liftlab/spectral.hpp"

using namespace liftlab;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string out;
    int threads = 1;
    bool timings = false;
};

using Clock = std::chrono::steady_clock;

void emit_report(json report, const std::string& path, Clock::time_point start, const GlobalOpts& g) {
    if (g.timings) {
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        report["timings"] = {{"wall_seconds", secs}};
    }
    write_json(path, report);
    std::cout << "wrote " << path << "\n";
}

Potential make_potential(const std::string& name, double m, double beta) {
    if (name == "quadratic") return quadratic_potential(m, 1);
    if (name == "double_well") return double_well_potential(beta);
    throw ConfigError("unknown potential `" + name + "` (known: quadratic, double_well)");
}

std::string chain_file(const std::string& out, int chain, int chains) {
    if (chains == 1) return out;
    std::size_t dot = out.find_last_of('.');
    std::string stem = dot == std::string::npos ? out : out.substr(0, dot);
    std::string ext = dot == std::string::npos ? "" : out.substr(dot);
    return stem + ".chain" + std::to_string(chain) + ext;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string process;
    std::string potential = "quadratic";
    double m = 1.0;
    double beta = 0.5;
    double gamma = 1.0;
    double horizon = 10.0;
    double step = 1e-3;
    int chains = 1;
    long record_every = 10;
};

void run_simulate(const SimulateOpts& o, const GlobalOpts& g) {
    require(o.horizon >= 0, "simulate: horizon must be nonnegative");
    require(o.step > 0, "simulate: step must be positive");
    require(o.chains >= 1, "simulate: chains must be positive");
    require(o.record_every >= 1, "simulate: record-every must be positive");
    Potential pot = make_potential(o.potential, o.m, o.beta);
    std::string out = g.out.empty() ? "samples.csv" : g.out;
    const bool phase = o.process != "overdamped";

    for (int c = 0; c < o.chains; ++c) {
        std::mt19937_64 rng = chain_rng(g.seed, static_cast<std::uint64_t>(c));
        std::normal_distribution<double> normal(0.0, 1.0);
        PhaseState s{{0.0}, {0.0}};
        if (pot.quadratic_mass) s.x[0] = normal(rng) / std::sqrt(*pot.quadratic_mass);
        if (phase) s.v[0] = normal(rng);

        std::string path = chain_file(out, c, o.chains);
        std::ofstream f(path);
        require(f.good(), "cannot open output file " + path);
        f.precision(17);
        f << "t,x,v,event\n";
        long rows = 0;
        auto row = [&](double t, const PhaseState& st, const std::string& ev) {
            f << t << "," << st.x[0] << "," << (phase ? st.v[0] : 0.0) << "," << ev << "\n";
            ++rows;
        };
        row(0.0, s, "");
        if (o.process == "overdamped" || o.process == "langevin") {
            long n = static_cast<long>(std::ceil(o.horizon / o.step));
            std::vector<double> xi(1);
            for (long k = 0; k < n; ++k) {
                xi[0] = normal(rng);
                s = o.process == "overdamped" ? overdamped_step(s, pot, o.step, xi)
                                              : langevin_step(s, pot, o.gamma, o.step, xi);
                if ((k + 1) % o.record_every == 0 || k + 1 == n)
                    row(static_cast<double>(k + 1) * o.step, s, "");
            }
        } else {
            require(o.gamma > 0 || o.process == "bps", "simulate: " + o.process + " needs gamma > 0");
            TrajectoryResult r = o.process == "rhmc" ? rhmc_trajectory(s, pot, o.gamma, o.horizon, o.step, rng)
                                                     : bps_trajectory(s, pot, o.gamma, o.horizon, rng);
            for (const auto& ev : r.events) row(ev.time, PhaseState{ev.x, ev.v_post}, event_kind_name(ev.kind));
            row(o.horizon, r.state, "");
        }
        std::cout << "wrote " << rows << " rows to " << path << "\n";
    }
}

// ---------------------------------------------------------------- liftcheck

struct LiftcheckOpts {
    std::string process;
    std::string potential = "quadratic";
    double m = 1.0;
    double beta = 0.5;
    int degree = 4;
    long samples = 1000000;
    int chains = 16;
    double k_sigma = 4.0;
    int nodes = 200;
};

void run_liftcheck(const LiftcheckOpts& o, const GlobalOpts& g) {
    auto start = Clock::now();
    Potential pot = make_potential(o.potential, o.m, o.beta);
    TargetMeasure mu = TargetMeasure::phase(pot);
    LiftCheckOptions lco;
    lco.samples = o.samples;
    lco.chains = o.chains;
    lco.seed = g.seed;
    lco.k_sigma = o.k_sigma;
    lco.quadrature_nodes = o.nodes;
    lco.threads = g.threads;
    LiftReport rep = run_dictionary(o.process, mu, o.degree, lco);

    json results;
    results["process"] = rep.process;
    results["dictionary"] = rep.dictionary_label;
    results["samples"] = rep.samples;
    results["k_sigma"] = rep.k_sigma;
    results["stationarity"] = {{"position_mean", tagged_with_se(rep.position_mean, rep.position_mean_se)},
                               {"position_second_moment", tagged_with_se(rep.position_second, rep.position_second_se)},
                               {"pass", rep.stationarity_ok}};
    json pairs = json::array();
    for (const auto& pr : rep.pairs) {
        json first = {{"estimate", tagged_with_se(pr.first_estimate, pr.first_se)},
                      {"target", tagged(0.0, "exact")},
                      {"pass", pr.first_pass}};
        json second = {{"estimate", tagged_with_se(pr.second_estimate, pr.second_se)},
                       {"target", tagged(pr.dirichlet_target, "exact")},
                       {"pass", pr.second_pass}};
        pairs.push_back({{"f", pr.f_index},
                         {"g", pr.g_index},
                         {"trivial", pr.trivial},
                         {"first_order", first},
                         {"second_order", second}});
    }
    results["pairs"] = pairs;
    results["all_pass"] = rep.all_pass;

    json echo = {{"process", o.process}, {"potential", o.potential},      {"degree", o.degree},
                 {"samples", o.samples}, {"chains", o.chains},            {"k_sigma", o.k_sigma},
                 {"m", o.m},             {"beta", o.beta}};
    std::string out = g.out.empty() ? "liftcheck.json" : g.out;
    emit_report(make_report("liftcheck", g.seed, echo, results), out, start, g);
    if (!rep.all_pass)
        throw TheoremViolation("lift identity estimates left the " + std::to_string(o.k_sigma) +
                               "-sigma band; see " + out);
}

// ----------------------------------------------------------------- spectral

struct SpectralOpts {
    std::string process = "langevin";
    std::string potential = "quadratic";
    double m = 1.0;
    double beta = 0.5;
    double gamma = 2.0;
    int degree = 16;
    bool degree_given = false;
    bool grid_given = false;
    std::string grid = "0:10:0.01";
    std::string eps = "0.36787944117144233";
    std::string sweep;
    std::string curve_out;
    bool check_truncation = false;
    int nodes = 200;
};

void run_spectral_sweep(const SpectralOpts& o, const GlobalOpts& g) {
    double a, b, c;
    require(parse_grid_spec(o.sweep, a, b, c), "spectral: --sweep-gamma expects start:stop:step");
    require(a > 0 && b > a && c > 0, "spectral: sweep grid must satisfy 0 < start < stop, step > 0");
    require(o.potential == "quadratic", "spectral: the gamma sweep targets the Gaussian Langevin generator");
    Potential pot = make_potential(o.potential, o.m, o.beta);
    int deg = o.degree_given ? o.degree : 1;  // degree 1 is the exact 2x2 block for the gap
    long count = static_cast<long>(std::floor((b - a) / c + 1e-9)) + 1;
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        double gamma = a + static_cast<double>(i) * c;
        GeneratorMatrix G = assemble_galerkin("langevin", pot, gamma, deg, o.nodes);
        rows.push_back({gamma, spectral_gap_of_generator(G.matrix)});
    }
    std::string out = g.out.empty() ? "gap_curve.csv" : g.out;
    write_csv(out, "gamma,gap", rows);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i][1] > rows[best][1]) best = i;
    std::cout << "wrote " << rows.size() << " rows to " << out << "; max gap " << rows[best][1] << " at gamma "
              << rows[best][0] << "\n";
}

void run_spectral(const SpectralOpts& o, const GlobalOpts& g) {
    if (!o.sweep.empty()) {
        run_spectral_sweep(o, g);
        return;
    }
    auto start = Clock::now();
    Potential pot = make_potential(o.potential, o.m, o.beta);
    std::string grid_spec = o.grid;
    if (o.process == "bps" && !o.grid_given) grid_spec = "0:6:0.5";  // Monte Carlo curve: keep the grid coarse
    double a, b, c;
    require(parse_grid_spec(grid_spec, a, b, c), "spectral: --grid expects start:stop:step");
    TimeGrid grid{a, b, c};
    grid.validate();
    std::vector<double> eps_list = parse_double_list(o.eps);
    for (double e : eps_list) require(e > 0 && e <= 1, "spectral: eps values must lie in (0, 1]");

    json results;
    results["process"] = o.process;
    results["gamma"] = o.gamma;
    DecayCurve curve;
    std::string value_tag;
    if (o.process == "bps") {
        // No Galerkin assembly for the jump process: estimate the decay of a
        // single observable, which lower-bounds the operator norm.
        EmpiricalDecayOptions eo;
        eo.seed = g.seed;
        eo.quadrature_nodes = o.nodes;
        curve = empirical_decay("bps", pot, o.gamma, TestFunction::coordinate(0, 1), grid, eo);
        value_tag = "monte-carlo";
        results["note"] = "single-observable Monte Carlo decay; relaxation values are lower bounds";
    } else {
        GeneratorMatrix G = assemble_galerkin(o.process, pot, o.gamma, o.degree, o.nodes);
        curve = operator_norm_decay(G, grid, o.check_truncation, &pot, o.nodes);
        value_tag = "galerkin";
        results["degree"] = o.degree;
        results["gram_error"] = G.gram_error;
        results["gap"] = tagged(spectral_gap_of_generator(G.matrix), "galerkin");
        results["sing"] = tagged(singular_value_gap(G), "galerkin");
        if (o.process == "langevin" && pot.quadratic_mass && *pot.quadratic_mass == 1.0)
            results["closed_form_gap"] = tagged(langevin_gap(o.gamma), "exact");
        results["truncation_converged"] = curve.truncation_converged;
    }
    json rel = json::array();
    for (double e : eps_list) {
        RelaxationTime rt = relaxation_time(curve, e);
        rel.push_back({{"eps", e}, {"t", tagged(rt.t, value_tag)}, {"persistent", rt.persistent}});
    }
    results["relaxation"] = rel;
    results["grid"] = grid_spec;

    if (!o.curve_out.empty()) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < curve.t.size(); ++i) rows.push_back({curve.t[i], curve.value[i]});
        write_csv(o.curve_out, "t,norm", rows);
    }
    json echo = {{"process", o.process}, {"potential", o.potential}, {"gamma", o.gamma},
                 {"degree", o.degree},   {"grid", grid_spec},        {"eps", o.eps},
                 {"m", o.m},             {"beta", o.beta}};
    std::string out = g.out.empty() ? "spectral.json" : g.out;
    emit_report(make_report("spectral", g.seed, echo, results), out, start, g);
}

// ------------------------------------------------------------------- circle

struct CircleOpts {
    std::string n_list = "9,17,33,65";
    std::string eps_rule = "1/n";
    double eps_fixed = -1.0;
    double tol = 0.25;
    long cap = 1000000;
    std::string summary_out;
};

void run_circle(const CircleOpts& o, const GlobalOpts& g) {
    auto start = Clock::now();
    require(o.tol > 0 && o.tol < 1, "circle: --tol must lie in (0, 1)");
    require(o.eps_rule == "1/n" || o.eps_fixed >= 0, "circle: --eps-rule must be `1/n` unless --eps is given");
    std::vector<long> ns = parse_long_list(o.n_list);
    std::vector<std::vector<double>> rows;
    std::vector<double> mixed_n_base, mixed_t_base, mixed_n_lift, mixed_t_lift;
    for (long n : ns) {
        require(n >= 2, "circle: n must be >= 2");
        // eps is the velocity-flip probability of the lifted walk; both chains
        // are measured at the same TV tolerance.
        double eps = o.eps_fixed >= 0 ? o.eps_fixed : 1.0 / static_cast<double>(n);
        CircleChains chains = circle_chains(static_cast<int>(n), eps);
        Eigen::VectorXd ub = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        Eigen::VectorXd ul = Eigen::VectorXd::Constant(2 * n, 0.5 / static_cast<double>(n));
        MixingTime base = tv_mixing_time(chains.base, ub, o.tol, o.cap);
        MixingTime lift = tv_mixing_time(chains.lift, ul, o.tol, o.cap);
        rows.push_back({static_cast<double>(n), eps, static_cast<double>(base.steps), base.mixed ? 1.0 : 0.0,
                        static_cast<double>(lift.steps), lift.mixed ? 1.0 : 0.0});
        if (base.mixed) {
            mixed_n_base.push_back(static_cast<double>(n));
            mixed_t_base.push_back(static_cast<double>(base.steps));
        }
        if (lift.mixed) {
            mixed_n_lift.push_back(static_cast<double>(n));
            mixed_t_lift.push_back(static_cast<double>(lift.steps));
        }
    }
    std::string out = g.out.empty() ? "circle.csv" : g.out;
    write_csv(out, "n,eps,base_steps,base_mixed,lift_steps,lift_mixed", rows);
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";

    json results;
    if (mixed_n_base.size() >= 2)
        results["base_slope"] = tagged(loglog_slope(mixed_n_base, mixed_t_base), "exact");
    if (mixed_n_lift.size() >= 2)
        results["lift_slope"] = tagged(loglog_slope(mixed_n_lift, mixed_t_lift), "exact");
    json jrows = json::array();
    for (const auto& r : rows)
        jrows.push_back({{"n", static_cast<long>(r[0])},
                         {"eps", r[1]},
                         {"base_steps", static_cast<long>(r[2])},
                         {"base_mixed", r[3] != 0.0},
                         {"lift_steps", static_cast<long>(r[4])},
                         {"lift_mixed", r[5] != 0.0}});
    results["rows"] = jrows;
    if (!o.summary_out.empty()) {
        json echo = {{"n", o.n_list}, {"eps_rule", o.eps_rule}, {"tol", o.tol}, {"cap", o.cap}};
        emit_report(make_report("circle", g.seed, echo, results), o.summary_out, start, g);
    } else if (results.contains("base_slope") && results.contains("lift_slope")) {
        std::cout << "base slope " << results["base_slope"]["value"].get<double>() << ", lift slope "
                  << results["lift_slope"]["value"].get<double>() << "\n";
    }
}

// ------------------------------------------------------------------- bounds

struct BoundsCliOpts {
    double m = 1.0;
    double kappa = 0.0;
    bool kappa_given = false;
    std::string T = "auto";
    bool auto_T = false;
    std::string gamma = "auto";
    double eps = std::exp(-1.0);
    int degree = 16;
    std::string potential = "quadratic";
    double beta = 0.5;
    int nodes = 200;
    bool check_truncation = false;
};

json bounds_results(const BoundsReport& rep) {
    json results;
    results["m"] = tagged(rep.m, rep.m_estimated ? "estimated" : "exact");
    results["kappa_minus"] = tagged(rep.kappa, "exact");
    results["T"] = tagged(rep.T, "exact");
    results["C0"] = rep.C0_exact.empty() ? tagged(rep.C0, "exact") : tagged(rep.C0, "exact", rep.C0_exact);
    results["C1"] = rep.C1_exact.empty() ? tagged(rep.C1, "exact") : tagged(rep.C1, "exact", rep.C1_exact);
    results["gamma"] = tagged(rep.gamma, "exact");
    results["nu"] = tagged(rep.nu, "exact");
    results["eps"] = rep.eps;
    results["trel_upper_bound"] = tagged(rep.trel_upper, "exact");
    results["trel_lift"] = tagged(rep.trel_lift_measured, "galerkin");
    results["sing_lift"] = tagged(rep.sing_lift, "galerkin");
    results["trel_lower_from_sing"] = tagged(rep.trel_lower_sing, "galerkin");
    results["trel_base"] = tagged(rep.trel_base_measured, "galerkin");
    results["lift_lower_bound"] = tagged(rep.lift_lower, "galerkin");
    results["optimality_C"] = tagged(rep.optimality_C_measured, "galerkin");
    results["corollary_C"] = tagged(rep.corollary_C, "exact");
    results["delayed_contractivity"] = {{"nu", rep.nu},
                                        {"T", rep.T},
                                        {"pass", rep.contractivity_pass},
                                        {"sup", tagged(rep.contractivity_sup, "galerkin")}};
    results["truncation_converged"] = rep.truncation_converged;
    return results;
}

void run_bounds(const BoundsCliOpts& o, const GlobalOpts& g) {
    auto start = Clock::now();
    Potential pot = make_potential(o.potential, o.m, o.beta);
    if (o.kappa_given) {
        require(o.kappa >= pot.hessian_lower_bound,
                "bounds: --kappa-minus must dominate the potential's convexity defect (" +
                    std::to_string(pot.hessian_lower_bound) + ")");
        pot.hessian_lower_bound = o.kappa;
    }
    BoundsOptions bo;
    bo.eps = o.eps;
    bo.degree = o.degree;
    bo.quadrature_nodes = o.nodes;
    bo.check_truncation = o.check_truncation;
    if (o.T != "auto") {
        require(!o.auto_T, "bounds: pass either --T or --auto-T, not both");
        double tval;
        require(detail::parse_double(o.T, tval) && tval > 0, "bounds: --T must be positive or `auto`");
        bo.T = tval;
    }
    if (o.gamma != "auto") {
        double gval;
        require(detail::parse_double(o.gamma, gval) && gval > 0, "bounds: --gamma must be positive or `auto`");
        bo.gamma = gval;
    }
    BoundsReport rep = run_bounds_pipeline(pot, bo);

    json echo = {{"potential", o.potential}, {"m", o.m},         {"kappa_minus", o.kappa},
                 {"T", o.T},                 {"gamma", o.gamma}, {"eps", o.eps},
                 {"degree", o.degree},       {"beta", o.beta}};
    std::string out = g.out.empty() ? "bounds.json" : g.out;
    emit_report(make_report("bounds", g.seed, echo, bounds_results(rep)), out, start, g);
}

// ---------------------------------------------------------------- reproduce

void run_reproduce(const std::string& target, const std::string& data_out, const GlobalOpts& g) {
    auto start = Clock::now();
    std::string out = g.out.empty() ? "reproduce_" + target + ".json" : g.out;
    json echo = {{"target", target}};
    json results;

    if (target == "fig1") {
        Potential pot = quadratic_potential(1.0, 1);
        std::vector<std::vector<double>> rows;
        std::size_t best = 0;
        for (int i = 2; i <= 120; ++i) {
            double gamma = static_cast<double>(i) / 20.0;  // hits gamma = 2 exactly
            GeneratorMatrix G = assemble_galerkin("langevin", pot, gamma, 1);
            rows.push_back({gamma, spectral_gap_of_generator(G.matrix)});
            if (rows.back()[1] > rows[best][1]) best = rows.size() - 1;
        }
        std::string csv = data_out.empty() ? "fig1.csv" : data_out;
        write_csv(csv, "gamma,gap", rows);
        bool mono = true;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            bool ok = i <= best ? rows[i][1] >= rows[i - 1][1] - 1e-12 : rows[i][1] <= rows[i - 1][1] + 1e-12;
            mono = mono && ok;
        }
        results["csv"] = csv;
        results["max_gamma"] = tagged(rows[best][0], "galerkin");
        results["max_gap"] = tagged(rows[best][1], "galerkin");
        results["unimodal"] = mono;
    } else if (target == "gaussian-trel") {
        TimeGrid grid{0.0, 6.0, 0.01};
        DecayCurve curve = curve_from_function(critical_norm_closed_form, grid);
        RelaxationTime rt = relaxation_time(curve, std::exp(-1.0));
        results["gamma"] = 2.0;
        results["eps"] = std::exp(-1.0);
        results["t_rel"] = tagged(rt.t, "exact");
        results["within_2_73"] = rt.t <= 2.73;
    } else if (target == "circle-scaling") {
        CircleOpts co;
        GlobalOpts gc = g;
        gc.out = data_out.empty() ? "circle_scaling.csv" : data_out;
        co.summary_out = out;
        run_circle(co, gc);
        return;  // run_circle already wrote the report
    } else if (target == "constants-table") {
        json rowsj = json::array();
        for (auto [mi, ki] : {std::pair<long long, long long>{1, 0}, {1, 1}, {1, 6}, {4, 0}, {4, 2}}) {
            Rational m(mi), kappa(ki);
            DivergenceConstantsExact ec = divergence_constants_exact(Rational(9) / m, m, kappa);
            auto [C0, C1] = stpi_constants_exact(ec);
            double c0d = to_double(ec.c0), c1d = to_double(ec.c1);
            double C0d = to_double(C0), C1d = to_double(C1);
            double gamma_star = optimal_gamma_for_rate(C0d, C1d);
            rowsj.push_back({{"m", mi},
                             {"kappa_minus", ki},
                             {"T", tagged(3.0 / std::sqrt(static_cast<double>(mi)), "exact")},
                             {"c0", tagged(c0d, "exact", to_string(ec.c0))},
                             {"c1", tagged(c1d, "exact", to_string(ec.c1))},
                             {"C0", tagged(C0d, "exact", to_string(C0))},
                             {"C1", tagged(C1d, "exact", to_string(C1))},
                             {"gamma_star", tagged(gamma_star, "exact")},
                             {"inv_nu_star", tagged(1.0 / contraction_rate(gamma_star, C0d, C1d), "exact")}});
        }
        results["rows"] = rowsj;
        results["note"] = "T = 3/sqrt(m); constants are exact rationals";
    } else if (target == "optimality") {
        double eps = std::exp(-1.0);
        TimeGrid grid{0.0, 6.0, 0.01};
        DecayCurve curve = curve_from_function(critical_norm_closed_form, grid);
        double trel_lift = relaxation_time(curve, eps).t;
        double trel_base = 2.0 * std::log(1.0 / eps);  // overdamped Gaussian, unit mass
        results["critical_langevin"] = {{"t_rel_lift", tagged(trel_lift, "exact")},
                                        {"t_rel_base", tagged(trel_base, "exact")},
                                        {"C", tagged(optimality_constant(trel_lift, trel_base), "exact")}};
        results["corollary_C_convex"] = tagged(corollary_optimality(0.0), "exact");
        BoundsReport rep = run_bounds_pipeline(quadratic_potential(1.0, 1));
        results["rhmc_pipeline"] = bounds_results(rep);
    } else {
        throw ConfigError("unknown reproduce target `" + target +
                          "` (known: fig1, gaussian-trel, circle-scaling, constants-table, optimality)");
    }
    emit_report(make_report("reproduce", g.seed, echo, results), out, start, g);
}

// ------------------------------------------------------------- config entry

void run_from_config(const ExperimentConfig& cfg, GlobalOpts g) {
    if (cfg.has("seed")) g.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 1));
    if (cfg.has("out")) g.out = cfg.get("out");
    if (cfg.has("threads")) g.threads = static_cast<int>(cfg.get_long("threads", 1));

    if (cfg.subcommand == "simulate") {
        SimulateOpts o;
        o.process = cfg.get("process");
        o.potential = cfg.get("potential", o.potential);
        o.m = cfg.get_double("m", o.m);
        o.beta = cfg.get_double("beta", o.beta);
        o.gamma = cfg.get_double("gamma", o.gamma);
        o.horizon = cfg.get_double("horizon", o.horizon);
        o.step = cfg.get_double("step", o.step);
        o.chains = static_cast<int>(cfg.get_long("chains", o.chains));
        o.record_every = cfg.get_long("record_every", o.record_every);
        run_simulate(o, g);
    } else if (cfg.subcommand == "liftcheck") {
        LiftcheckOpts o;
        o.process = cfg.get("process");
        o.potential = cfg.get("potential", o.potential);
        o.m = cfg.get_double("m", o.m);
        o.beta = cfg.get_double("beta", o.beta);
        o.degree = static_cast<int>(cfg.get_long("degree", o.degree));
        o.samples = cfg.get_long("samples", o.samples);
        o.chains = static_cast<int>(cfg.get_long("chains", o.chains));
        o.k_sigma = cfg.get_double("k_sigma", o.k_sigma);
        run_liftcheck(o, g);
    } else if (cfg.subcommand == "spectral") {
        SpectralOpts o;
        o.process = cfg.get("process", o.process);
        o.potential = cfg.get("potential", o.potential);
        o.m = cfg.get_double("m", o.m);
        o.beta = cfg.get_double("beta", o.beta);
        o.gamma = cfg.get_double("gamma", o.gamma);
        o.degree = static_cast<int>(cfg.get_long("degree", o.degree));
        o.degree_given = cfg.has("degree");
        o.grid = cfg.get("grid", o.grid);
        o.grid_given = cfg.has("grid");
        o.eps = cfg.get("eps", o.eps);
        o.sweep = cfg.get("sweep_gamma", "");
        o.curve_out = cfg.get("curve_out", "");
        run_spectral(o, g);
    } else if (cfg.subcommand == "circle") {
        CircleOpts o;
        o.n_list = cfg.get("n", o.n_list);
        o.eps_rule = cfg.get("eps_rule", o.eps_rule);
        o.eps_fixed = cfg.get_double("eps", o.eps_fixed);
        o.tol = cfg.get_double("tol", o.tol);
        o.cap = cfg.get_long("cap", o.cap);
        o.summary_out = cfg.get("summary_out", "");
        run_circle(o, g);
    } else if (cfg.subcommand == "bounds") {
        BoundsCliOpts o;
        o.potential = cfg.get("potential", o.potential);
        o.m = cfg.get_double("m", o.m);
        o.beta = cfg.get_double("beta", o.beta);
        o.kappa = cfg.get_double("kappa_minus", o.kappa);
        o.kappa_given = cfg.has("kappa_minus");
        o.T = cfg.get("T", o.T);
        o.gamma = cfg.get("gamma", o.gamma);
        o.eps = cfg.get_double("eps", o.eps);
        o.degree = static_cast<int>(cfg.get_long("degree", o.degree));
        run_bounds(o, g);
    } else if (cfg.subcommand == "reproduce") {
        run_reproduce(cfg.get("target"), cfg.get("data_out", ""), g);
    } else {
        throw ConfigError("config subcommand `" + cfg.subcommand + "` is not runnable");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"second-order lifts of reversible diffusions: simulation, lift checks, spectra, certificates"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "base RNG seed (chains derive independent streams)");
    app.add_option("--out", g.out, "output file (default depends on the subcommand)");
    app.add_option("--threads", g.threads, "worker threads for chain-parallel estimators")
        ->envname("LIFTLAB_THREADS");
    app.add_flag("--timings", g.timings, "include wall-clock timings in reports (breaks byte-identity)");

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "integrate one process and write a trajectory/event CSV");
    sim->fallthrough();
    sim->add_option("--process", so.process, "overdamped | langevin | rhmc | bps")
        ->required()
        ->check(CLI::IsMember({"overdamped", "langevin", "rhmc", "bps"}));
    sim->add_option("--potential", so.potential)->check(CLI::IsMember({"quadratic", "double_well"}));
    sim->add_option("--m", so.m, "quadratic potential curvature");
    sim->add_option("--beta", so.beta, "double-well inverse temperature");
    sim->add_option("--gamma", so.gamma, "friction / refresh rate");
    sim->add_option("--horizon", so.horizon);
    sim->add_option("--step", so.step, "integrator step size");
    sim->add_option("--chains", so.chains);
    sim->add_option("--record-every", so.record_every, "record every K steps (discretized processes)");
    sim->callback([&]() { run_simulate(so, g); });

    LiftcheckOpts lo;
    auto* lc = app.add_subcommand("liftcheck", "Monte Carlo verification of the lift identities");
    lc->fallthrough();
    lc->add_option("--process", lo.process, "hamiltonian | langevin | rhmc | bps")
        ->required()
        ->check(CLI::IsMember({"hamiltonian", "langevin", "rhmc", "bps"}));
    lc->add_option("--potential", lo.potential)->check(CLI::IsMember({"quadratic", "double_well"}));
    lc->add_option("--m", lo.m);
    lc->add_option("--beta", lo.beta);
    lc->add_option("--degree", lo.degree, "dictionary of orthonormal polynomials up to this degree");
    lc->add_option("--samples", lo.samples);
    lc->add_option("--chains", lo.chains);
    lc->add_option("--k-sigma", lo.k_sigma, "pass band half-width in standard errors");
    lc->callback([&]() { run_liftcheck(lo, g); });

    SpectralOpts sp;
    auto* spc = app.add_subcommand("spectral", "Galerkin spectra, decay curves and relaxation times");
    spc->fallthrough();
    spc->add_option("--process", sp.process, "overdamped | langevin | rhmc | bps")
        ->check(CLI::IsMember({"overdamped", "langevin", "rhmc", "bps"}));
    spc->add_option("--potential", sp.potential)->check(CLI::IsMember({"quadratic", "double_well"}));
    spc->add_option("--m", sp.m);
    spc->add_option("--beta", sp.beta);
    spc->add_option("--gamma", sp.gamma);
    auto* dopt = spc->add_option("--degree", sp.degree, "Galerkin truncation degree");
    auto* gopt = spc->add_option("--grid", sp.grid, "time grid start:stop:step");
    spc->add_option("--eps", sp.eps, "comma-separated accuracy levels in (0, 1]");
    spc->add_option("--sweep-gamma", sp.sweep, "sweep start:stop:step; writes a gamma,gap CSV and exits");
    spc->add_option("--curve-out", sp.curve_out, "also write the decay curve as CSV");
    spc->add_flag("--check-truncation", sp.check_truncation, "re-assemble at degree+4 and compare curves");
    spc->callback([&]() {
        sp.degree_given = dopt->count() > 0;
        sp.grid_given = gopt->count() > 0;
        run_spectral(sp, g);
    });

    CircleOpts co;
    auto* cir = app.add_subcommand("circle", "TV mixing of the circle walk and its lift");
    cir->fallthrough();
    cir->add_option("--n", co.n_list, "comma-separated circle sizes");
    cir->add_option("--eps-rule", co.eps_rule, "accuracy rule for the lifted walk (`1/n`)");
    cir->add_option("--eps", co.eps_fixed, "fixed accuracy for the lifted walk (overrides the rule)");
    cir->add_option("--tol", co.tol, "TV tolerance for the base walk");
    cir->add_option("--cap", co.cap, "step cap; exceeding it reports mixed=false");
    cir->add_option("--summary-out", co.summary_out, "also write a JSON summary with slopes");
    cir->callback([&]() { run_circle(co, g); });

    BoundsCliOpts bo;
    auto* bnd = app.add_subcommand("bounds", "divergence-constant pipeline and optimality certificates");
    bnd->fallthrough();
    bnd->add_option("--potential", bo.potential)->check(CLI::IsMember({"quadratic", "double_well"}));
    bnd->add_option("--m", bo.m, "Poincare constant (quadratic targets)");
    auto* kopt = bnd->add_option("--kappa-minus", bo.kappa, "convexity defect bound");
    bnd->add_option("--T", bo.T, "certificate delay, or `auto` for 3/sqrt(m)");
    bnd->add_flag("--auto-T", bo.auto_T, "force T = 3/sqrt(m)");
    bnd->add_option("--gamma", bo.gamma, "refresh rate, or `auto` for sqrt(C1/C0)");
    bnd->add_option("--eps", bo.eps);
    bnd->add_option("--degree", bo.degree);
    bnd->add_option("--beta", bo.beta);
    bnd->add_flag("--check-truncation", bo.check_truncation);
    bnd->callback([&]() {
        bo.kappa_given = kopt->count() > 0;
        run_bounds(bo, g);
    });

    std::string target, data_out;
    auto* rep = app.add_subcommand("reproduce", "headline quantities end to end");
    rep->fallthrough();
    rep->add_option("target", target, "fig1 | gaussian-trel | circle-scaling | constants-table | optimality")
        ->required()
        ->check(CLI::IsMember({"fig1", "gaussian-trel", "circle-scaling", "constants-table", "optimality"}));
    rep->add_option("--data-out", data_out, "CSV path for targets that also emit data");
    rep->callback([&]() { run_reproduce(target, data_out, g); });

    std::string cfg_path;
    auto* val = app.add_subcommand("validate", "check a flat key=value config file, reporting all violations");
    val->fallthrough();
    val->add_option("--config", cfg_path)->required();
    val->callback([&]() {
        ExperimentConfig cfg = validate_config(cfg_path);
        std::cout << "config ok: " << cfg_path << "\n" << echo_config(cfg).dump(2) << "\n";
    });

    auto* run = app.add_subcommand("run", "execute the experiment described by a config file");
    run->fallthrough();
    run->add_option("--config", cfg_path)->required();
    run->callback([&]() { run_from_config(validate_config(cfg_path), g); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return kExitNonConvergence;
    } catch (const TheoremViolation& e) {
        std::cerr << "theorem violation: " << e.what() << "\n";
        return kExitTheoremViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
