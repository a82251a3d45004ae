#pragma once

// Basepoint/tangent-angle scheme. Unknown velocities u = (xdot0, ydot0,
// thetadot_1..thetadot_{N-1}); theta_N is slaved to theta_{N-1} through the
// free-end condition theta_ss = (kappa0)_s at s = 1.

#include "rftswim/analytics.hpp"
#include "rftswim/forcing.hpp"
#include "rftswim/geometry.hpp"
#include "rftswim/types.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

namespace rftswim {

/// theta_N - theta_{N-1} and its time derivative at time t.
struct LastAngle {
    double offset = 0.0;
    double rate = 0.0;
};

inline LastAngle eliminate_last_angle(const ForcingSpec& f, int n, double t) {
    const auto r = f.eval(1.0, t);
    const double N = n;
    return {r[0] / N - r[1] / (2 * N * N), r[2] / N - r[3] / (2 * N * N)};
}

/// Dense (N+1)x(N+1) system matrix * u = rhs.
struct VelocitySystem {
    MatrixX matrix;
    VectorX rhs;
};

/// Midpoint velocity and force-density diagnostics for a solved velocity vector.
struct VelocityField {
    Points midpoint_velocity;  // Xdot_{i-1/2}, i = 1..N
    Points force_density;      // h_i = -M(theta_i) Xdot_{i-1/2}
};

struct AngleStepStats {
    int newton_iterations = 0;
    int halvings = 0;
    double velocity_residual = 0.0;  // ||(y'-y)/dt - V(y')||_inf of the last accepted step
};

class AngleSimulator {
public:
    AngleSimulator(SimConfig cfg, ForcingSpec f) : cfg_(std::move(cfg)), f_(std::move(f)) {
        cfg_.validate();
        n_ = cfg_.n_segments;
        closure_ = cfg_.closure_segments == 0 ? n_ : cfg_.closure_segments;
        s_mid_ = midpoints(n_);
        build_stiffness();
    }

    const SimConfig& config() const { return cfg_; }
    const ForcingSpec& forcing() const { return f_; }
    int unknowns() const { return n_ + 1; }

    /// Copy of st with theta_N set from the free-end relation at st.time.
    FilamentState constrain(FilamentState st) const {
        check_size(st);
        st.theta[n_ - 1] = st.theta[n_ - 2] + eliminate_last_angle(f_, n_, st.time).offset;
        return st;
    }

    VectorX reduced(const FilamentState& st) const {
        VectorX y(n_ + 1);
        y.head<2>() = st.x0;
        y.tail(n_ - 1) = st.theta.head(n_ - 1);
        return y;
    }

    FilamentState expand(const VectorX& y, double t) const {
        VectorX th(n_);
        th.head(n_ - 1) = y.tail(n_ - 1);
        th[n_ - 1] = th[n_ - 2] + eliminate_last_angle(f_, n_, t).offset;
        return FilamentState(y.head<2>(), th, t);
    }

    VelocitySystem assemble(const FilamentState& st) const {
        check_size(st);
        VelocitySystem sys{MatrixX::Zero(n_ + 1, n_ + 1), VectorX::Zero(n_ + 1)};
        assemble_into(st, sys.matrix, sys.rhs);
        return sys;
    }

    /// Solve the velocity system at st.
    VectorX velocities(const FilamentState& st) const {
        const auto sys = assemble(st);
        return solve_checked(sys.matrix, sys.rhs);
    }

    /// Expand u into the full thetadot vector (including thetadot_N).
    VectorX angle_rates(const VectorX& u, double t) const {
        VectorX td(n_);
        td.head(n_ - 1) = u.tail(n_ - 1);
        td[n_ - 1] = td[n_ - 2] + eliminate_last_angle(f_, n_, t).rate;
        return td;
    }

    VelocityField velocity_field(const FilamentState& st, const VectorX& u) const {
        const VectorX td = angle_rates(u, st.time);
        const double kw = cfg_.midpoint_sum == MidpointSum::Printed ? 1.5 : 0.5;
        const double m = cfg_.gamma / (1.0 + cfg_.gamma);
        VelocityField out{Points(2, n_), Points(2, n_)};
        Vec2 run = u.head<2>();
        for (int i = 0; i < n_; ++i) {
            const Vec2 nv(-std::sin(st.theta[i]), std::cos(st.theta[i]));
            const Vec2 et(nv.y(), -nv.x());
            out.midpoint_velocity.col(i) = run + kw / n_ * nv * td[i];
            run += nv * td[i] / n_;
            const Vec2 v = out.midpoint_velocity.col(i);
            out.force_density.col(i) = -(v - m * et * et.dot(v));
        }
        return out;
    }

    /// Power delivered to the fluid, -sum_i h_i . Xdot_{i-1/2} / N.
    double work_rate(const FilamentState& st, const VectorX& u) const {
        const auto vf = velocity_field(st, u);
        double w = 0.0;
        for (int i = 0; i < n_; ++i) w -= vf.force_density.col(i).dot(vf.midpoint_velocity.col(i)) / n_;
        return w;
    }

    /// (|int h ds|, |int (X - X0) x h ds|) by the midpoint rule.
    std::pair<double, double> force_torque_residuals(const FilamentState& st, const VectorX& u) const {
        const auto vf = velocity_field(st, u);
        const Points x = st.nodes();
        Vec2 force = Vec2::Zero();
        double torque = 0.0;
        for (int i = 0; i < n_; ++i) {
            const Vec2 h = vf.force_density.col(i);
            const Vec2 r = 0.5 * (x.col(i) + x.col(i + 1)) - x.col(0);
            force += h / n_;
            torque += (r.x() * h.y() - r.y() * h.x()) / n_;
        }
        return {force.norm(), std::abs(torque)};
    }

    Diagnostics diagnostics(const FilamentState& st, const VectorX& u) const {
        Diagnostics d;
        d.curvature = recover_curvature(st);
        d.speed = instantaneous_speed(st, f_, cfg_.gamma);
        d.work_rate = work_rate(st, u);
        std::tie(d.force_residual, d.torque_residual) = force_torque_residuals(st, u);
        return d;
    }

    /// One time step of size dt from st; halves the step on Newton failure.
    FilamentState step(const FilamentState& st, double dt, AngleStepStats* stats = nullptr) const {
        return step_impl(st, dt, 0, stats);
    }

    using Observer = std::function<void(const TrajectoryRecord&)>;

    /// Integrate from initial to cfg.t_end. Records every output_stride steps and
    /// at t_end; each record is passed to the observer and, when keep is true,
    /// stored in the returned trajectory.
    Trajectory run(const FilamentState& initial, const Observer& observer = {}, bool keep = true,
                   AngleStepStats* stats = nullptr) const {
        FilamentState st = constrain(initial);
        st.validate();
        Trajectory traj;
        traj.method = 'a';
        auto emit = [&](const FilamentState& s) {
            TrajectoryRecord rec{s, diagnostics(s, velocities(s))};
            if (observer) observer(rec);
            if (keep) traj.push_back(std::move(rec));
        };
        emit(st);
        const long steps = step_count(cfg_.t_end, cfg_.dt);
        const double t0 = st.time;
        for (long k = 1; k <= steps; ++k) {
            const double target = t0 + cfg_.t_end * static_cast<double>(k) / steps;
            st = step(st, target - st.time, stats);
            st.time = target;
            if (k % cfg_.output_stride == 0 || k == steps) emit(st);
        }
        return traj;
    }

    /// Right-hand side -theta_ss + (kappa0)_s of every projected row, plus zeros for
    /// the closure rows. Index j-1 belongs to row j.
    VectorX bending_rhs(const FilamentState& st) const {
        const double N = n_;
        VectorX rhs = VectorX::Zero(n_ + 1);
        const VectorX& th = st.theta;
        rhs[0] = -N * N * (2 * th[1] - 2 * th[0]) + 2 * N * f_.kappa0(0.0, st.time);
        for (int j = 2; j <= n_ - 1; ++j)
            rhs[j - 1] = -N * N * (th[j - 2] - 2 * th[j - 1] + th[j]) + f_.eval(s_mid_[j - 1], st.time)[1];
        return rhs;
    }

private:
    static long step_count(double t_end, double dt) {
        if (t_end <= 0.0) return 0;
        return std::max(1L, static_cast<long>(std::ceil(t_end / dt - 1e-9)));
    }

    void check_size(const FilamentState& st) const {
        if (st.n_segments() != n_)
            throw ConfigError("state has " + std::to_string(st.n_segments()) + " segments, simulator expects " +
                              std::to_string(n_));
    }

    int col(int k) const { return k < n_ ? 1 + k : n_; }  // k is 1-based

    void build_stiffness() {
        const double N2 = static_cast<double>(n_) * n_;
        stiff_ = MatrixX::Zero(n_ + 1, n_ + 1);
        stiff_(0, col(1)) = 2 * N2;
        stiff_(0, col(2)) = -2 * N2;
        for (int j = 2; j <= n_ - 1; ++j) {
            stiff_(j - 1, col(j - 1)) += -N2;
            stiff_(j - 1, col(j)) += 2 * N2;
            stiff_(j - 1, col(j + 1)) += -N2;  // for j = N-1 this lands on theta_{N-1} via theta_N
        }
    }

    void assemble_into(const FilamentState& st, MatrixX& a, VectorX& b) const {
        const double N = n_;
        const double m = cfg_.gamma / (1.0 + cfg_.gamma);
        const double kw = cfg_.midpoint_sum == MidpointSum::Printed ? 1.5 : 0.5;
        const double g_rate = eliminate_last_angle(f_, n_, st.time).rate;
        a.setZero();
        b = bending_rhs(st);

        Eigen::Matrix<double, 2, Eigen::Dynamic> run = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n_ + 1);
        Eigen::Matrix<double, 2, Eigen::Dynamic> cum = Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, n_ + 1);
        run(0, 0) = 1.0;
        run(1, 1) = 1.0;
        Vec2 known = Vec2::Zero();
        for (int i = 1; i <= n_; ++i) {
            const double th = st.theta[i - 1];
            const Vec2 nv(-std::sin(th), std::cos(th));
            const Vec2 et(nv.y(), -nv.x());
            const Mat2 M = Mat2::Identity() - m * et * et.transpose();
            const int c = col(i);
            const int width = std::min(c + 1, n_ + 1);
            // Xdot_{i-1/2} = run + kw/N n_i thetadot_i, run = Xdot_0 + (1/N) sum_{k<i} n_k thetadot_k
            cum.leftCols(width) += M * run.leftCols(width);
            cum.col(c) += M * (kw / N * nv);
            if (i == n_) known += M * (kw / N * nv * g_rate);
            run.col(c) += nv / N;

            if (i <= n_ - 1) {
                a.row(i - 1).head(width) = (nv.transpose() * cum.leftCols(width)) / N;
            }
            if (i == closure_) {
                a.block(n_ - 1, 0, 2, n_ + 1) = cum / N;
                b.segment<2>(n_ - 1) -= known / N;
            }
        }
    }

    static VectorX solve_checked(const MatrixX& a, const VectorX& b) {
        Eigen::PartialPivLU<MatrixX> lu(a);
        VectorX u = lu.solve(b);
        if (!u.allFinite()) throw NumericalError("velocity system is singular");
        const double scale = a.cwiseAbs().maxCoeff() * u.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
        if ((a * u - b).cwiseAbs().maxCoeff() > 1e-6 * std::max(scale, 1e-300))
            throw NumericalError("velocity system is singular to working precision");
        return u;
    }

    // Residual of the implicit step: A(y')((y'-y)/dt - (1-w) v_old) - w b(y').
    VectorX implicit_residual(const VectorX& y, const VectorX& yn, double t1, double dt, const VectorX& v_old,
                              double w, MatrixX& a, VectorX& b) const {
        assemble_into(expand(yn, t1), a, b);
        VectorX rate = (yn - y) / dt;
        if (w < 1.0) rate -= (1.0 - w) * v_old;
        return a * rate - w * b;
    }

    FilamentState step_impl(const FilamentState& st, double dt, int depth, AngleStepStats* stats) const {
        std::string why;
        if (auto res = try_step(st, dt, stats, why)) return *res;
        if (depth >= cfg_.max_halvings)
            throw NumericalError("angle scheme: Newton failed at t = " + std::to_string(st.time) + " after " +
                                 std::to_string(depth) + " step halvings (" + why + ")");
        if (stats) ++stats->halvings;
        FilamentState mid = step_impl(st, dt / 2, depth + 1, stats);
        mid.time = st.time + dt / 2;
        FilamentState out = step_impl(mid, dt / 2, depth + 1, stats);
        out.time = st.time + dt;
        return out;
    }

    std::optional<FilamentState> try_step(const FilamentState& st, double dt, AngleStepStats* stats,
                                          std::string& why) const {
        const int n1 = n_ + 1;
        const double t1 = st.time + dt;
        const double w = cfg_.scheme == TimeScheme::Trapezoidal ? 0.5 : 1.0;
        const VectorX y = reduced(st);
        VectorX v_old;
        if (w < 1.0) v_old = velocities(st);
        VectorX yn = y;
        MatrixX a(n1, n1);
        VectorX b(n1);
        Eigen::PartialPivLU<MatrixX> jac;
        double prev = std::numeric_limits<double>::infinity();
        bool fresh = false;
        for (int it = 1; it <= cfg_.max_newton_iter; ++it) {
            const VectorX h = implicit_residual(y, yn, t1, dt, v_old, w, a, b);
            if (!h.allFinite()) {
                why = "non-finite residual";
                return std::nullopt;
            }
            if (it == 1 || cfg_.jacobian == JacobianMode::FiniteDifference || !fresh) {
                jac.compute(jacobian(y, yn, t1, dt, v_old, w, a, h));
                fresh = true;
            }
            const VectorX delta = jac.solve(h);
            const double dn = delta.cwiseAbs().maxCoeff();
            if (!std::isfinite(dn) || dn > 10.0) {
                why = "diverging update";
                return std::nullopt;
            }
            yn -= delta;
            // Slow contraction: refresh the frozen Jacobian next time round.
            fresh = dn < 0.5 * prev;
            prev = dn;
            if (dn <= cfg_.newton_tol) {
                FilamentState out = expand(yn, t1);
                if (stats) {
                    stats->newton_iterations += it;
                    const VectorX v = velocities(out);
                    VectorX rate = (yn - y) / dt;
                    if (w < 1.0) rate = (rate - (1.0 - w) * v_old) / w;
                    stats->velocity_residual = (rate - v).cwiseAbs().maxCoeff();
                }
                return out;
            }
        }
        why = "no convergence in " + std::to_string(cfg_.max_newton_iter) + " iterations";
        return std::nullopt;
    }

    MatrixX jacobian(const VectorX& y, const VectorX& yn, double t1, double dt, const VectorX& v_old, double w,
                     const MatrixX& a, const VectorX& h) const {
        if (cfg_.jacobian == JacobianMode::FrozenMobility) return a / dt - w * stiff_;
        const int n1 = n_ + 1;
        MatrixX j(n1, n1), ap(n1, n1);
        VectorX bp(n1);
        for (int c = 0; c < n1; ++c) {
            VectorX yp = yn;
            const double step = 1e-7 * std::max(1.0, std::abs(yn[c]));
            yp[c] += step;
            j.col(c) = (implicit_residual(y, yp, t1, dt, v_old, w, ap, bp) - h) / step;
        }
        return j;
    }

    SimConfig cfg_;
    ForcingSpec f_;
    int n_ = 0;
    int closure_ = 0;
    VectorX s_mid_;
    MatrixX stiff_;
};

}  // namespace rftswim
