#pragma once

// Node-position scheme: backward Euler on X_0..X_N with midpoint tension
// multipliers tau_{i+1/2} and explicit segment-length constraints. Mobility
// frames and the preferred-curvature normal are frozen at the previous step.
//
// Unknown ordering (banded): x_i, y_i, tau_{i+1/2} for i = 0..N-1, then x_N, y_N.
// Equation ordering: F_{1/2} (2 rows), len_0, then momentum_i (2) and len_i for
// i = 1..N-1, then F_{N-1/2} (2). Momentum rows are multiplied by dt and the
// free-end rows by ds^3 so every row is O(|X|).

#include "rftswim/analytics.hpp"
#include "rftswim/forcing.hpp"
#include "rftswim/geometry.hpp"
#include "rftswim/linalg.hpp"
#include "rftswim/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rftswim {

struct ConstrainedState {
    Points nodes;   // X_0..X_N
    VectorX tau;    // tau_{1/2}..tau_{N-1/2}
    double time = 0.0;

    int n_segments() const { return static_cast<int>(nodes.cols()) - 1; }

    static ConstrainedState from(const FilamentState& st) {
        return {st.nodes(), VectorX::Zero(st.n_segments()), st.time};
    }
};

struct NewtonLog {
    std::vector<double> residuals;  // ||r||_inf before each update, then after the last
    int halvings = 0;
};

class NewtonSimulator {
public:
    static constexpr int kBand = 7;

    NewtonSimulator(SimConfig cfg, ForcingSpec f) : cfg_(std::move(cfg)), f_(std::move(f)) {
        cfg_.validate();
        n_ = cfg_.n_segments;
    }

    const SimConfig& config() const { return cfg_; }
    int unknowns() const { return 3 * n_ + 2; }

    static int ix(int i) { return 3 * i; }
    static int iy(int i) { return 3 * i + 1; }
    static int itau(int i) { return 3 * i + 2; }  // tau_{i+1/2}

    VectorX pack(const ConstrainedState& s) const {
        VectorX z(unknowns());
        for (int i = 0; i <= n_; ++i) {
            z[ix(i)] = s.nodes(0, i);
            z[iy(i)] = s.nodes(1, i);
            if (i < n_) z[itau(i)] = s.tau[i];
        }
        return z;
    }

    ConstrainedState unpack(const VectorX& z, double t) const {
        ConstrainedState s{Points(2, n_ + 1), VectorX(n_), t};
        for (int i = 0; i <= n_; ++i) {
            s.nodes(0, i) = z[ix(i)];
            s.nodes(1, i) = z[iy(i)];
            if (i < n_) s.tau[i] = z[itau(i)];
        }
        return s;
    }

    /// Frozen data of one step: node tangents from the previous positions and
    /// kappa0 at the new time.
    struct Frozen {
        Points et, en;  // column i for node i (only 1..N-1 used)
        VectorX kappa0;
        Points prev;
        double dt = 0.0;
    };

    Frozen freeze(const ConstrainedState& prev, double t_new, double dt) const {
        check(prev);
        Frozen fr{Points::Zero(2, n_ + 1), Points::Zero(2, n_ + 1), VectorX::Zero(n_ + 1), prev.nodes, dt};
        for (int i = 1; i < n_; ++i) {
            const Vec2 chord = prev.nodes.col(i + 1) - prev.nodes.col(i - 1);
            const double len = chord.norm();
            if (!(len > 0.0)) throw NumericalError("degenerate chord at node " + std::to_string(i));
            fr.et.col(i) = chord / len;
            fr.en.col(i) = Vec2(-fr.et(1, i), fr.et(0, i));
            fr.kappa0[i] = f_.kappa0(static_cast<double>(i) / n_, t_new);
        }
        return fr;
    }

    /// Scaled residual of the step equations at guess z.
    VectorX residual(const Frozen& fr, const VectorX& z) const {
        VectorX r(unknowns());
        evaluate(fr, z, r, nullptr, nullptr);
        return r;
    }

    MatrixX dense_jacobian(const Frozen& fr, const VectorX& z) const {
        VectorX r(unknowns());
        MatrixX j = MatrixX::Zero(unknowns(), unknowns());
        evaluate(fr, z, r, nullptr, &j);
        return j;
    }

    BandMatrix band_jacobian(const Frozen& fr, const VectorX& z) const {
        VectorX r(unknowns());
        BandMatrix j(unknowns(), kBand, kBand);
        evaluate(fr, z, r, &j, nullptr);
        return j;
    }

    /// Newton solve of one step of size dt from prev, starting at prev (tau warm-started).
    std::optional<ConstrainedState> newton_step(const ConstrainedState& prev, double dt, NewtonLog* log,
                                                std::string& why) const {
        const double t1 = prev.time + dt;
        const Frozen fr = freeze(prev, t1, dt);
        VectorX z = pack(prev);
        VectorX r(unknowns());
        BandMatrix jac(unknowns(), kBand, kBand);
        bool small_update = false;
        for (int it = 0; it <= cfg_.max_newton_iter; ++it) {
            jac.set_zero();
            evaluate(fr, z, r, &jac, nullptr);
            const double rn = r.cwiseAbs().maxCoeff();
            if (log) log->residuals.push_back(rn);
            if (!std::isfinite(rn)) {
                why = "non-finite residual";
                return std::nullopt;
            }
            if (rn < cfg_.newton_tol || (small_update && length_defect(r) < cfg_.newton_tol)) return unpack(z, t1);
            if (it == cfg_.max_newton_iter) break;
            try {
                jac.factor();
            } catch (const NumericalError& e) {
                why = e.what();
                return std::nullopt;
            }
            const VectorX delta = jac.solve(r);
            z -= delta;
            // Momentum rows carry roundoff of order dt N^4 eps; once the node update
            // itself is below tolerance the step is as converged as it can get.
            double move = 0.0;
            for (int i = 0; i <= n_; ++i) move = std::max({move, std::abs(delta[ix(i)]), std::abs(delta[iy(i)])});
            small_update = move < cfg_.newton_tol;
        }
        why = "no convergence in " + std::to_string(cfg_.max_newton_iter) + " iterations";
        return std::nullopt;
    }

    ConstrainedState step(const ConstrainedState& prev, double dt, NewtonLog* log = nullptr) const {
        return step_impl(prev, dt, 0, log);
    }

    /// Diagnostics for the common trajectory format; velocities from the last step.
    Diagnostics diagnostics(const ConstrainedState& s, const ConstrainedState* prev) const {
        const FilamentState fs = state_from_nodes(s.nodes, s.time);
        Diagnostics d;
        d.curvature = recover_curvature(fs);
        d.speed = instantaneous_speed(fs, f_, cfg_.gamma);
        if (prev) {
            const Frozen fr = freeze(*prev, s.time, s.time - prev->time);
            const auto forces = flux_values(fr, pack(s));
            Vec2 total = Vec2::Zero();
            double torque = 0.0, work = 0.0;
            for (int i = 1; i < n_; ++i) {
                const Vec2 h = forces.col(i) - forces.col(i - 1);  // F_{i+1/2} - F_{i-1/2}
                const Vec2 v = (s.nodes.col(i) - prev->nodes.col(i)) / fr.dt;
                const Vec2 rr = s.nodes.col(i) - s.nodes.col(0);
                total += h;
                torque += rr.x() * h.y() - rr.y() * h.x();
                work += h.dot(v);
            }
            d.work_rate = -work;
            d.force_residual = total.norm();
            d.torque_residual = std::abs(torque);
        }
        return d;
    }

    using Observer = std::function<void(const TrajectoryRecord&)>;

    Trajectory run(const FilamentState& initial, const Observer& observer = {}, bool keep = true,
                   NewtonLog* log = nullptr) const {
        initial.validate();
        if (initial.n_segments() != n_) throw ConfigError("initial state does not match n_segments");
        ConstrainedState cur = ConstrainedState::from(initial);
        Trajectory traj;
        traj.method = 'b';
        auto emit = [&](const ConstrainedState& s, const ConstrainedState* prev) {
            TrajectoryRecord rec{state_from_nodes(s.nodes, s.time), diagnostics(s, prev)};
            if (observer) observer(rec);
            if (keep) traj.push_back(std::move(rec));
        };
        emit(cur, nullptr);
        long steps = cfg_.t_end > 0.0 ? std::max(1L, static_cast<long>(std::ceil(cfg_.t_end / cfg_.dt - 1e-9))) : 0;
        const double t0 = cur.time;
        for (long k = 1; k <= steps; ++k) {
            const double target = t0 + cfg_.t_end * static_cast<double>(k) / steps;
            ConstrainedState next = step(cur, target - cur.time, log);
            next.time = target;
            if (k % cfg_.output_stride == 0 || k == steps) emit(next, &cur);
            cur = std::move(next);
        }
        return traj;
    }

private:
    double length_defect(const VectorX& r) const {
        double worst = 0.0;
        for (int i = 0; i < n_; ++i) worst = std::max(worst, std::abs(r[3 * i + 2]));
        return worst;
    }

    void check(const ConstrainedState& s) const {
        if (s.n_segments() != n_ || s.tau.size() != n_)
            throw ConfigError("constrained state does not match n_segments");
    }

    ConstrainedState step_impl(const ConstrainedState& prev, double dt, int depth, NewtonLog* log) const {
        std::string why;
        if (auto res = newton_step(prev, dt, log, why)) return *res;
        if (depth >= cfg_.max_halvings)
            throw NumericalError("node scheme: Newton failed at t = " + std::to_string(prev.time) + " after " +
                                 std::to_string(depth) + " step halvings (" + why + ")");
        if (log) ++log->halvings;
        ConstrainedState mid = step_impl(prev, dt / 2, depth + 1, log);
        mid.time = prev.time + dt / 2;
        ConstrainedState out = step_impl(mid, dt / 2, depth + 1, log);
        out.time = prev.time + dt;
        return out;
    }

    // F_{i+1/2} for i = 0..N-1 as columns.
    Points flux_values(const Frozen& fr, const VectorX& z) const {
        const double inv = static_cast<double>(n_);
        auto X = [&](int i) { return Vec2(z[ix(i)], z[iy(i)]); };
        Points q = Points::Zero(2, n_ + 1);
        for (int i = 1; i < n_; ++i)
            q.col(i) = (X(i + 1) - 2 * X(i) + X(i - 1)) * inv * inv - fr.kappa0[i] * fr.en.col(i);
        Points f(2, n_);
        for (int i = 0; i < n_; ++i)
            f.col(i) = (q.col(i + 1) - q.col(i)) * inv - z[itau(i)] * (X(i + 1) - X(i)) * inv;
        return f;
    }

    // Residual and, optionally, Jacobian (band or dense) in one pass.
    void evaluate(const Frozen& fr, const VectorX& z, VectorX& r, BandMatrix* band, MatrixX* dense) const {
        const double N = n_;
        const double ds = 1.0 / N;
        auto X = [&](int i) { return Vec2(z[ix(i)], z[iy(i)]); };
        auto put = [&](int row, int c, double v) {
            if (v == 0.0) return;
            if (band) band->add(row, c, v);
            if (dense) (*dense)(row, c) += v;
        };
        const bool jac = band || dense;
        const Points F = flux_values(fr, z);

        // dF_{i+1/2}/d(unknowns), scaled by `scale` and premultiplied by the 2x2 `P`,
        // accumulated into rows (row, row+1).
        auto flux_jac = [&](int row, int i, const Mat2& P, double scale) {
            // Q_j = (X_{j+1} - 2X_j + X_{j-1}) N^2 for 1 <= j <= N-1, else 0.
            // F_{i+1/2} = (Q_{i+1} - Q_i) N - tau (X_{i+1} - X_i) N
            auto add_q = [&](int j, double sign) {
                if (j < 1 || j > n_ - 1) return;
                const double c = sign * N * N * N;
                const int nodes[3] = {j - 1, j, j + 1};
                const double w[3] = {c, -2 * c, c};
                for (int a = 0; a < 3; ++a) {
                    const Mat2 blk = scale * w[a] * P;
                    for (int d = 0; d < 2; ++d) {
                        put(row + d, ix(nodes[a]), blk(d, 0));
                        put(row + d, iy(nodes[a]), blk(d, 1));
                    }
                }
            };
            add_q(i + 1, 1.0);
            add_q(i, -1.0);
            const double tau = z[itau(i)];
            const Mat2 bt = scale * tau * N * P;
            for (int d = 0; d < 2; ++d) {
                put(row + d, ix(i + 1), -bt(d, 0));
                put(row + d, iy(i + 1), -bt(d, 1));
                put(row + d, ix(i), bt(d, 0));
                put(row + d, iy(i), bt(d, 1));
            }
            const Vec2 dtau = -scale * N * (P * (X(i + 1) - X(i)));
            put(row, itau(i), dtau.x());
            put(row + 1, itau(i), dtau.y());
        };

        const double fscale = ds * ds * ds;
        const Mat2 I = Mat2::Identity();
        // F_{1/2} = 0
        r.segment<2>(0) = fscale * F.col(0);
        if (jac) flux_jac(0, 0, I, fscale);
        // length rows and momentum rows
        for (int i = 0; i < n_; ++i) {
            const Vec2 seg = X(i + 1) - X(i);
            const int lrow = 3 * i + 2;
            r[lrow] = seg.squaredNorm() * N * N - 1.0;
            if (jac) {
                const Vec2 g = 2 * N * N * seg;
                put(lrow, ix(i + 1), g.x());
                put(lrow, iy(i + 1), g.y());
                put(lrow, ix(i), -g.x());
                put(lrow, iy(i), -g.y());
            }
            if (i == 0) continue;
            const int mrow = 3 * i;
            const Vec2 et = fr.et.col(i);
            const Mat2 P = I + cfg_.gamma * et * et.transpose();
            const double c = fr.dt * N;
            r.segment<2>(mrow) = X(i) - fr.prev.col(i) + c * P * (F.col(i) - F.col(i - 1));
            if (jac) {
                put(mrow, ix(i), 1.0);
                put(mrow + 1, iy(i), 1.0);
                flux_jac(mrow, i, P, c);
                flux_jac(mrow, i - 1, P, -c);
            }
        }
        // F_{N-1/2} = 0
        r.segment<2>(3 * n_) = fscale * F.col(n_ - 1);
        if (jac) flux_jac(3 * n_, n_ - 1, I, fscale);
    }

    SimConfig cfg_;
    ForcingSpec f_;
    int n_ = 0;
};

}  // namespace rftswim
