#pragma once

// Small-amplitude theory: linear curvature response, time-averaged speed and
// work as quadratic forms in the modal forcing coefficients.

#include "rftswim/eigenbasis.hpp"
#include "rftswim/forcing.hpp"
#include "rftswim/geometry.hpp"
#include "rftswim/quadrature.hpp"

#include <string>

namespace rftswim {

struct ResponseCoeffs {
    MatrixX c, d;
};

namespace detail {

inline void check_coeffs(const ModalCoeffs& co, const EigenBasis& basis) {
    co.validate();
    if (co.k_max() > basis.k_max())
        throw ConfigError("coefficients use " + std::to_string(co.k_max()) + " spatial modes but the basis holds " +
                          std::to_string(basis.k_max()));
}

// omega^2 m^2 / (omega^2 m^2 + lambda^2)
inline double response_factor(double wm, double lambda) { return wm * wm / (wm * wm + lambda * lambda); }

}  // namespace detail

inline ResponseCoeffs response_coeffs(const ModalCoeffs& co, double omega, const EigenBasis& basis) {
    detail::check_coeffs(co, basis);
    ResponseCoeffs r{MatrixX(co.m_max(), co.k_max()), MatrixX(co.m_max(), co.k_max())};
    for (int m = 1; m <= co.m_max(); ++m) {
        const double wm = omega * m;
        for (int k = 1; k <= co.k_max(); ++k) {
            const double lam = basis.lambda(k);
            const double f = detail::response_factor(wm, lam);
            const double a = co.a(m - 1, k - 1), b = co.b(m - 1, k - 1);
            r.c(m - 1, k - 1) = f * (lam / wm * b - a);
            r.d(m - 1, k - 1) = f * (-lam / wm * a - b);
        }
    }
    return r;
}

/// Time-averaged swimming speed, evaluated as the literal double sum.
inline double avg_speed(const ModalCoeffs& co, double omega, double gamma, const EigenBasis& basis) {
    detail::check_coeffs(co, basis);
    const MatrixX& S = basis.coupling();
    double u = 0.0;
    for (int m = 1; m <= co.m_max(); ++m) {
        const double wm = omega * m;
        for (int k = 1; k <= co.k_max(); ++k) {
            const double lam = basis.lambda(k);
            const double f = detail::response_factor(wm, lam);
            const double ak = co.a(m - 1, k - 1), bk = co.b(m - 1, k - 1);
            for (int l = 1; l <= co.k_max(); ++l) {
                const double al = co.a(m - 1, l - 1), bl = co.b(m - 1, l - 1);
                u += f * (lam / wm * (ak * bl - bk * al) + ak * al + bk * bl) * S(k - 1, l - 1);
            }
        }
    }
    return 0.5 * gamma * u;
}

/// Time-averaged work of the linearized motion.
inline double avg_work(const ModalCoeffs& co, double omega, const EigenBasis& basis) {
    detail::check_coeffs(co, basis);
    double w = 0.0;
    for (int m = 1; m <= co.m_max(); ++m)
        for (int k = 1; k <= co.k_max(); ++k) {
            const double lam = basis.lambda(k);
            const double a = co.a(m - 1, k - 1), b = co.b(m - 1, k - 1);
            w += 0.5 * lam * detail::response_factor(omega * m, lam) * (a * a + b * b);
        }
    return w;
}

/// Speed and work as quadratic forms z^T U z and z^T diag(W) z over the stacked
/// vector z = (a_1, b_1, a_2, b_2, ...), each a_m/b_m of length k_max.
struct QuadraticForms {
    MatrixX U;      // symmetric
    VectorX W;      // diagonal of the work form, all entries > 0
    int m_max = 0, k_max = 0;

    int a_index(int m, int k) const { return 2 * k_max * (m - 1) + (k - 1); }
    int b_index(int m, int k) const { return 2 * k_max * (m - 1) + k_max + (k - 1); }

    VectorX stack(const ModalCoeffs& co) const {
        VectorX z(2 * m_max * k_max);
        for (int m = 1; m <= m_max; ++m)
            for (int k = 1; k <= k_max; ++k) {
                z[a_index(m, k)] = co.a(m - 1, k - 1);
                z[b_index(m, k)] = co.b(m - 1, k - 1);
            }
        return z;
    }
    ModalCoeffs unstack(const VectorX& z) const {
        ModalCoeffs co{MatrixX(m_max, k_max), MatrixX(m_max, k_max)};
        for (int m = 1; m <= m_max; ++m)
            for (int k = 1; k <= k_max; ++k) {
                co.a(m - 1, k - 1) = z[a_index(m, k)];
                co.b(m - 1, k - 1) = z[b_index(m, k)];
            }
        return co;
    }
    double speed(const VectorX& z) const { return z.dot(U * z); }
    double work(const VectorX& z) const { return z.dot(W.cwiseProduct(z)); }
};

inline QuadraticForms quadratic_forms(int m_max, int k_max, double omega, double gamma, const EigenBasis& basis) {
    if (m_max < 1) throw ConfigError("m_max must be at least 1");
    if (k_max < 1 || k_max > basis.k_max()) throw ConfigError("k_max outside the basis");
    QuadraticForms q;
    q.m_max = m_max;
    q.k_max = k_max;
    const int n = 2 * m_max * k_max;
    MatrixX G = MatrixX::Zero(n, n);
    q.W = VectorX(n);
    const MatrixX& S = basis.coupling();
    for (int m = 1; m <= m_max; ++m) {
        const double wm = omega * m;
        for (int k = 1; k <= k_max; ++k) {
            const double lam = basis.lambda(k);
            const double f = detail::response_factor(wm, lam);
            q.W[q.a_index(m, k)] = q.W[q.b_index(m, k)] = 0.5 * lam * f;
            for (int l = 1; l <= k_max; ++l) {
                const double s = 0.5 * gamma * f * S(k - 1, l - 1);
                G(q.a_index(m, k), q.a_index(m, l)) += s;
                G(q.b_index(m, k), q.b_index(m, l)) += s;
                G(q.a_index(m, k), q.b_index(m, l)) += s * lam / wm;
                G(q.b_index(m, k), q.a_index(m, l)) -= s * lam / wm;
            }
        }
    }
    q.U = 0.5 * (G + G.transpose());
    return q;
}

/// U(t) = -gamma int_0^1 (kappa0)_s (kappa - kappa0) ds, trapezoid over the
/// interior nodes with the end values kappa - kappa0 = 0 implied by the free ends.
inline double instantaneous_speed(const FilamentState& st, const ForcingSpec& f, double gamma) {
    const int n = st.n_segments();
    const VectorX kap = recover_curvature(st);
    const auto smp = f.sample(interior_nodes(n), st.time);
    return -gamma * smp.ks.dot(kap - smp.k) / n;
}

/// Time-trapezoid of the recorded U(t) over [t0, t1]; partial intervals at the
/// window edges are linearly interpolated.
inline double predicted_displacement(const Trajectory& traj, double t0, double t1) {
    if (traj.empty() || t0 < traj.records.front().state.time - 1e-12 ||
        t1 > traj.records.back().state.time + 1e-12 || t1 < t0)
        throw ConfigError("displacement window lies outside the trajectory");
    double acc = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double ta = traj.records[i - 1].state.time, tb = traj.records[i].state.time;
        const double ua = traj.records[i - 1].diag.speed, ub = traj.records[i].diag.speed;
        const double lo = std::max(ta, t0), hi = std::min(tb, t1);
        if (hi <= lo) continue;
        auto at = [&](double t) { return ua + (ub - ua) * (t - ta) / (tb - ta); };
        acc += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    return acc;
}

/// Linear interpolation of the basepoint x-coordinate at time t.
inline double basepoint_x(const Trajectory& traj, double t) {
    if (traj.empty() || t < traj.records.front().state.time - 1e-12 || t > traj.records.back().state.time + 1e-12)
        throw ConfigError("time outside the trajectory");
    const auto& r = traj.records;
    std::size_t i = 1;
    while (i < r.size() - 1 && r[i].state.time < t) ++i;
    if (r.size() == 1) return r[0].state.x0.x();
    const double ta = r[i - 1].state.time, tb = r[i].state.time;
    const double w = std::clamp((t - ta) / (tb - ta), 0.0, 1.0);
    return (1 - w) * r[i - 1].state.x0.x() + w * r[i].state.x0.x();
}

/// Time average of the recorded work rate over [t0, t1].
inline double mean_work_rate(const Trajectory& traj, double t0, double t1) {
    double acc = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double ta = traj.records[i - 1].state.time, tb = traj.records[i].state.time;
        if (ta < t0 - 1e-12 || tb > t1 + 1e-12) continue;
        acc += 0.5 * (tb - ta) * (traj.records[i - 1].diag.work_rate + traj.records[i].diag.work_rate);
    }
    return acc / (t1 - t0);
}

}  // namespace rftswim
