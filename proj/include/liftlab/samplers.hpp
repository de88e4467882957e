#ifndef LIFTLAB_SAMPLERS_HPP
#define LIFTLAB_SAMPLERS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "liftlab/common.hpp"
#include "liftlab/potential.hpp"
#include "liftlab/rng.hpp"

namespace liftlab {

struct PhaseState {
    std::vector<double> x;
    std::vector<double> v;  // empty for the overdamped process

    bool finite() const {
        for (double xi : x)
            if (!std::isfinite(xi)) return false;
        for (double vi : v)
            if (!std::isfinite(vi)) return false;
        return true;
    }
};

struct ChainConfig {
    double h = 1e-3;
    double gamma = 1.0;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    int chains = 1;

    void validate() const {
        require(h > 0, "ChainConfig: step size must be positive");
        require(horizon >= 0, "ChainConfig: horizon must be nonnegative");
        require(chains >= 1, "ChainConfig: chain count must be positive");
    }
};

enum class EventKind { bounce, refresh, flip };

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::bounce: return "bounce";
        case EventKind::refresh: return "refresh";
        case EventKind::flip: return "flip";
    }
    return "?";
}

struct EventRecord {
    double time;
    EventKind kind;
    std::vector<double> x;
    std::vector<double> v_pre;
    std::vector<double> v_post;
};

// Euler-Maruyama update of dZ = -1/2 grad U dt + dB.
inline PhaseState overdamped_step(const PhaseState& s, const Potential& pot, double h,
                                  const std::vector<double>& noise) {
    require(h > 0, "overdamped_step: step size must be positive");
    std::vector<double> g = pot.gradient(s.x);
    PhaseState out = s;
    double sq = std::sqrt(h);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        require(std::isfinite(g[i]), "overdamped_step: non-finite gradient");
        out.x[i] = s.x[i] - 0.5 * h * g[i] + sq * noise[i];
    }
    return out;
}

namespace detail {

inline void kick_half(PhaseState& s, const Potential& pot, double h) {
    std::vector<double> g = pot.gradient(s.x);
    for (std::size_t i = 0; i < s.v.size(); ++i) {
        require(std::isfinite(g[i]), "kick: non-finite force");
        s.v[i] -= 0.5 * h * g[i];
    }
}

inline void drift_half(PhaseState& s, double h) {
    for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] += 0.5 * h * s.v[i];
}

}  // namespace detail

// One BAOAB step of kinetic Langevin dynamics; the velocity update is the
// exact Ornstein-Uhlenbeck transition, so gamma = 0 reduces bitwise to one
// velocity-Verlet step (the A stage is two half drifts in both).
inline PhaseState langevin_step(const PhaseState& s, const Potential& pot, double gamma, double h,
                                const std::vector<double>& noise) {
    require(gamma >= 0, "langevin_step: gamma must be nonnegative");
    require(h > 0, "langevin_step: step size must be positive");
    PhaseState out = s;
    detail::kick_half(out, pot, h);
    detail::drift_half(out, h);
    double decay = std::exp(-gamma * h);
    double diffuse = std::sqrt(1.0 - decay * decay);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = decay * out.v[i] + diffuse * noise[i];
    detail::drift_half(out, h);
    detail::kick_half(out, pot, h);
    return out;
}

inline PhaseState leapfrog_step(const PhaseState& s, const Potential& pot, double h) {
    PhaseState out = s;
    detail::kick_half(out, pot, h);
    detail::drift_half(out, h);
    detail::drift_half(out, h);
    detail::kick_half(out, pot, h);
    return out;
}

// Hamiltonian flow for duration t: exact rotation by angle sqrt(m) t in the
// (x, v/sqrt(m)) coordinates for quadratic potentials, leapfrog otherwise.
inline PhaseState hamiltonian_flow(const PhaseState& s, const Potential& pot, double t, double h) {
    require(t >= 0, "hamiltonian_flow: duration must be nonnegative");
    if (t == 0.0) return s;
    if (pot.quadratic_mass) {
        double m = *pot.quadratic_mass;
        double sm = std::sqrt(m);
        double c = std::cos(sm * t);
        double sn = std::sin(sm * t);
        PhaseState out = s;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double xi = s.x[i];
            double vi = s.v[i];
            out.x[i] = c * xi + (sn / sm) * vi;
            out.v[i] = -sm * sn * xi + c * vi;
        }
        return out;
    }
    require(h > 0, "hamiltonian_flow: leapfrog requested with nonpositive step");
    int n = static_cast<int>(std::ceil(t / h));
    double dt = t / n;
    PhaseState out = s;
    for (int k = 0; k < n; ++k) out = leapfrog_step(out, pot, dt);
    return out;
}

inline double hamiltonian_energy(const PhaseState& s, const Potential& pot) {
    double k = 0.0;
    for (double vi : s.v) k += vi * vi;
    return pot.evaluate(s.x) + 0.5 * k;
}

struct TrajectoryResult {
    PhaseState state;
    std::vector<EventRecord> events;
};

// Randomised HMC: Hamiltonian flow over Exp(gamma) flight times, complete
// velocity refreshment at each event.
inline TrajectoryResult rhmc_trajectory(PhaseState s, const Potential& pot, double gamma, double horizon,
                                        double h, std::mt19937_64& rng) {
    require(gamma > 0, "rhmc_trajectory: gamma must be positive");
    require(horizon >= 0, "rhmc_trajectory: horizon must be nonnegative");
    std::exponential_distribution<double> exp_gamma(gamma);
    std::normal_distribution<double> normal(0.0, 1.0);
    TrajectoryResult out;
    double t = 0.0;
    while (true) {
        double tau = exp_gamma(rng);
        if (t + tau >= horizon) {
            s = hamiltonian_flow(s, pot, horizon - t, h);
            break;
        }
        s = hamiltonian_flow(s, pot, tau, h);
        t += tau;
        EventRecord ev{t, EventKind::refresh, s.x, s.v, {}};
        for (double& vi : s.v) vi = normal(rng);
        ev.v_post = s.v;
        out.events.push_back(std::move(ev));
    }
    out.state = std::move(s);
    return out;
}

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// First arrival of an inhomogeneous Poisson process with rate (a + b s)_+,
// b >= 0, by inversion of the integrated rate against e ~ Exp(1).
inline double affine_rate_arrival(double a, double b, double e) {
    if (b <= 0.0) {
        if (a <= 0.0) return std::numeric_limits<double>::infinity();
        return e / a;
    }
    if (a >= 0.0) return (-a + std::sqrt(a * a + 2.0 * b * e)) / b;
    return -a / b + std::sqrt(2.0 * e / b);
}

}  // namespace detail

// Specular reflection of v in the level set of U: v - 2 (v.g / |g|^2) g.
inline std::vector<double> reflect_velocity(const std::vector<double>& v, const std::vector<double>& g) {
    double gn2 = detail::dot(g, g);
    require(gn2 > 0, "reflect_velocity: gradient must be nonzero");
    double scale = 2.0 * detail::dot(g, v) / gn2;
    std::vector<double> out = v;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= scale * g[i];
    return out;
}

// Bouncy particle sampler: straight-line flights, reflections at rate
// (v . grad U)_+ (exact inversion for quadratic U, Poisson thinning with the
// potential's gradient bound otherwise), refreshes at rate gamma.
inline TrajectoryResult bps_trajectory(PhaseState s, const Potential& pot, double gamma, double horizon,
                                       std::mt19937_64& rng) {
    require(gamma >= 0, "bps_trajectory: gamma must be nonnegative");
    require(horizon >= 0, "bps_trajectory: horizon must be nonnegative");
    std::normal_distribution<double> normal(0.0, 1.0);
    std::exponential_distribution<double> exp1(1.0);
    TrajectoryResult out;
    double t = 0.0;
    const bool quadratic = pot.quadratic_mass.has_value();
    if (!quadratic)
        require(static_cast<bool>(pot.gradient_norm_bound),
                "bps_trajectory: non-quadratic potential needs a gradient norm bound for thinning");

    auto advance = [&](double dt) {
        for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] += dt * s.v[i];
        t += dt;
    };
    auto reflect = [&]() {
        std::vector<double> g = pot.gradient(s.x);
        if (detail::dot(g, g) == 0.0) return false;  // vanishing gradient: reflection is a no-op, no event
        EventRecord ev{t, EventKind::bounce, s.x, s.v, {}};
        s.v = reflect_velocity(s.v, g);
        ev.v_post = s.v;
        out.events.push_back(std::move(ev));
        return true;
    };
    auto refresh = [&]() {
        EventRecord ev{t, EventKind::refresh, s.x, s.v, {}};
        for (double& vi : s.v) vi = normal(rng);
        ev.v_post = s.v;
        out.events.push_back(std::move(ev));
    };

    double next_refresh = gamma > 0 ? exp1(rng) / gamma : std::numeric_limits<double>::infinity();
    while (t < horizon) {
        double to_refresh = next_refresh - t;
        double to_horizon = horizon - t;
        if (quadratic) {
            double m = *pot.quadratic_mass;
            double a = m * detail::dot(s.v, s.x);
            double b = m * detail::dot(s.v, s.v);
            double tau = detail::affine_rate_arrival(a, b, exp1(rng));
            if (tau <= to_refresh && tau <= to_horizon) {
                advance(tau);
                reflect();
            } else if (to_refresh <= to_horizon) {
                advance(to_refresh);
                refresh();
                next_refresh = t + exp1(rng) / gamma;
            } else {
                advance(to_horizon);
                break;
            }
        } else {
            double speed = detail::norm(s.v);
            double seg = std::min(speed > 0 ? std::min(1.0, 1.0 / speed) : 1.0, std::min(to_refresh, to_horizon));
            double bound = speed > 0 ? speed * pot.gradient_norm_bound(s.x, speed * seg) : 0.0;
            bool bounced = false;
            if (bound > 0.0) {
                double sprop = exp1(rng) / bound;
                while (sprop <= seg) {
                    std::vector<double> xp = s.x;
                    for (std::size_t i = 0; i < xp.size(); ++i) xp[i] += sprop * s.v[i];
                    std::vector<double> g = pot.gradient(xp);
                    double rate = std::max(0.0, detail::dot(s.v, g));
                    if (rate > bound * (1.0 + 1e-12))
                        throw ConvergenceError("bps_trajectory: thinning envelope violated (rate " +
                                               std::to_string(rate) + " > bound " + std::to_string(bound) + ")");
                    std::uniform_real_distribution<double> unif(0.0, 1.0);
                    if (unif(rng) * bound <= rate) {
                        advance(sprop);
                        reflect();
                        bounced = true;
                        break;
                    }
                    sprop += exp1(rng) / bound;
                }
            }
            if (bounced) continue;
            advance(seg);
            if (t >= horizon) break;
            if (t >= next_refresh) {
                refresh();
                next_refresh = t + exp1(rng) / gamma;
            }
        }
    }
    out.state = std::move(s);
    return out;
}

// One step of the base walk and the lifted walk on Z/nZ as row-stochastic
// matrices. Lifted state index: 2x + (v == +1 ? 0 : 1); the velocity flip
// happens after the move.
struct CircleChains {
    Eigen::MatrixXd base;
    Eigen::MatrixXd lift;
};

inline CircleChains circle_chains(int n, double eps) {
    require(n >= 2, "circle_chains: n must be >= 2");
    require(eps >= 0.0 && eps <= 1.0, "circle_chains: flip probability must be in [0,1]");
    CircleChains c;
    c.base = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        c.base(x, (x + 1) % n) += 0.5;
        c.base(x, (x + n - 1) % n) += 0.5;
    }
    c.lift = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int x = 0; x < n; ++x) {
        for (int sv = 0; sv < 2; ++sv) {
            int v = sv == 0 ? 1 : -1;
            int xp = (x + v + n) % n;
            c.lift(2 * x + sv, 2 * xp + sv) += 1.0 - eps;
            c.lift(2 * x + sv, 2 * xp + (1 - sv)) += eps;
        }
    }
    return c;
}

}  // namespace liftlab

#endif
