#ifndef LIFTLAB_LINALG_HPP
#define LIFTLAB_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <vector>

#include "liftlab/common.hpp"

namespace liftlab {

// Scaling-and-squaring matrix exponential with diagonal Pade approximants of
// order 3/5/7/9/13 selected by the 1-norm thresholds of Higham (2005).
namespace detail {

inline Eigen::MatrixXd pade_solve(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V) {
    Eigen::MatrixXd P = V + U;
    Eigen::MatrixXd Q = V - U;
    return Q.partialPivLu().solve(P);
}

}  // namespace detail

inline Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
    require(A.rows() == A.cols(), "expm: matrix must be square");
    const Eigen::Index n = A.rows();
    const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
    require(std::isfinite(norm), "expm: non-finite input");
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

    const double theta3 = 1.495585217958292e-2;
    const double theta5 = 2.539398330063230e-1;
    const double theta7 = 9.504178996162932e-1;
    const double theta9 = 2.097847961257068e0;
    const double theta13 = 5.371920351148152e0;

    if (norm <= theta9) {
        Eigen::MatrixXd A2 = A * A;
        if (norm <= theta3) {
            Eigen::MatrixXd U = A * (A2 + 60.0 * I);
            Eigen::MatrixXd V = 12.0 * A2 + 120.0 * I;
            return detail::pade_solve(U, V);
        }
        Eigen::MatrixXd A4 = A2 * A2;
        if (norm <= theta5) {
            Eigen::MatrixXd U = A * (A4 + 420.0 * A2 + 15120.0 * I);
            Eigen::MatrixXd V = 30.0 * A4 + 3360.0 * A2 + 30240.0 * I;
            return detail::pade_solve(U, V);
        }
        Eigen::MatrixXd A6 = A4 * A2;
        if (norm <= theta7) {
            Eigen::MatrixXd U = A * (A6 + 1512.0 * A4 + 277200.0 * A2 + 8648640.0 * I);
            Eigen::MatrixXd V = 56.0 * A6 + 25200.0 * A4 + 1995840.0 * A2 + 17297280.0 * I;
            return detail::pade_solve(U, V);
        }
        Eigen::MatrixXd A8 = A6 * A2;
        Eigen::MatrixXd U = A * (A8 + 3960.0 * A6 + 2162160.0 * A4 + 302702400.0 * A2 + 8821612800.0 * I);
        Eigen::MatrixXd V = 90.0 * A8 + 110880.0 * A6 + 30270240.0 * A4 + 2075673600.0 * A2 + 17643225600.0 * I;
        return detail::pade_solve(U, V);
    }

    int s = 0;
    double scaled = norm;
    while (scaled > theta13) {
        scaled *= 0.5;
        ++s;
    }
    Eigen::MatrixXd As = A / std::ldexp(1.0, s);
    Eigen::MatrixXd A2 = As * As;
    Eigen::MatrixXd A4 = A2 * A2;
    Eigen::MatrixXd A6 = A4 * A2;
    const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
                        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
                        1323241920.0,        40840800.0,          960960.0,           16380.0,
                        182.0,               1.0};
    Eigen::MatrixXd U = As * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 +
                              b[1] * Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 +
                        b[0] * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd R = detail::pade_solve(U, V);
    for (int i = 0; i < s; ++i) R = R * R;
    require(R.allFinite(), "expm: overflow during squaring");
    return R;
}

// Largest singular value. Power iteration on M^T M with optional warm start
// (relative tolerance 1e-10); falls back to full SVD if it stalls.
inline double operator_norm(const Eigen::MatrixXd& M, Eigen::VectorXd* warm = nullptr) {
    if (M.rows() == 0) return 0.0;
    Eigen::VectorXd v;
    if (warm != nullptr && warm->size() == M.cols() && warm->norm() > 0) {
        v = *warm;
    } else {
        v = Eigen::VectorXd::Ones(M.cols());
    }
    v.normalize();
    double sigma = 0.0;
    const int max_iters = 500;
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd w = M.transpose() * (M * v);
        double lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
        double next = std::sqrt(lambda);
        if (it > 0 && std::abs(next - sigma) <= 1e-10 * next) {
            if (warm != nullptr) *warm = v;
            return next;
        }
        sigma = next;
    }
    double svd = M.bdcSvd().singularValues()(0);
    if (warm != nullptr) *warm = v;
    return svd;
}

inline double smallest_singular_value(const Eigen::MatrixXd& M) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

// min over eigenvalues of Re(-lambda): the spectral gap of the semigroup
// generated by G (eigenvalues of G have nonpositive real part for our models).
inline double spectral_gap_of_generator(const Eigen::MatrixXd& G) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(G, false);
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) gap = std::min(gap, -es.eigenvalues()(i).real());
    return gap;
}

inline double min_abs_eigenvalue(const Eigen::MatrixXd& G) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(G, false);
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) m = std::min(m, std::abs(es.eigenvalues()(i)));
    return m;
}

// exp(tG) evaluated along increasing times. Uniform grids advance by one
// multiply per point; arbitrary t anchors at the last grid product and applies
// a short Pade step, avoiding repeated from-scratch exponentials during
// crossing refinement.
class Propagator {
  public:
    explicit Propagator(Eigen::MatrixXd G) : G_(std::move(G)) {}

    const Eigen::MatrixXd& generator() const { return G_; }

    Eigen::MatrixXd at(double t) const {
        require(t >= 0, "Propagator: time must be nonnegative");
        if (t == 0.0) return Eigen::MatrixXd::Identity(G_.rows(), G_.cols());
        if (anchor_t_ >= 0.0 && t >= anchor_t_ && t - anchor_t_ <= anchor_span_)
            return anchor_E_ * expm((t - anchor_t_) * G_);
        return expm(t * G_);
    }

    double norm_at(double t) const {
        Eigen::MatrixXd E = at(t);
        Eigen::VectorXd warm = warm_;
        double s = operator_norm(E, &warm);
        warm_ = warm;
        return s;
    }

    // Norms on a uniform grid t0 + k*dt, k = 0..count-1.
    std::vector<double> norms_on_grid(double t0, double dt, int count) const {
        require(dt > 0 && count >= 1, "Propagator: bad grid");
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(count));
        Eigen::MatrixXd step = expm(dt * G_);
        Eigen::MatrixXd E = t0 == 0.0 ? Eigen::MatrixXd::Identity(G_.rows(), G_.cols()) : expm(t0 * G_);
        Eigen::VectorXd warm = warm_;
        for (int k = 0; k < count; ++k) {
            out.push_back(operator_norm(E, &warm));
            if (k + 1 < count) E = E * step;
        }
        warm_ = warm;
        return out;
    }

    void set_anchor(double t, double span) const {
        Eigen::MatrixXd E = at(t);  // evaluate before the anchor fields move
        anchor_t_ = t;
        anchor_span_ = span;
        anchor_E_ = std::move(E);
    }

  private:
    Eigen::MatrixXd G_;
    mutable Eigen::VectorXd warm_;
    mutable double anchor_t_ = -1.0;
    mutable double anchor_span_ = 0.0;
    mutable Eigen::MatrixXd anchor_E_;
};

}  // namespace liftlab

#endif
