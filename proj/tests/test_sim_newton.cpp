#include "rftswim/harness.hpp"
#include "rftswim/sim_newton.hpp"

#include <gtest/gtest.h>

using namespace rftswim;

namespace {

SimConfig config(int n, double dt = 1e-4, double t_end = 0.0) {
    SimConfig c;
    c.n_segments = n;
    c.dt = dt;
    c.t_end = t_end;
    c.newton_tol = 1e-11;
    return c;
}

ConstrainedState bent(int n, double amp = 0.6) {
    VectorX th(n);
    for (int i = 0; i < n; ++i) th[i] = amp * std::sin(kPi * (i + 0.5) / n) + 0.3 * (i + 0.5) / n;
    auto s = ConstrainedState::from(FilamentState(Vec2(0.2, 0.1), th));
    for (int i = 0; i < n; ++i) s.tau[i] = 0.1 * i - 0.3;
    return s;
}

// Step equations in their unscaled form, written out row by row:
// momentum (X_i - X_i^prev)/dt + N (I + gamma e_t e_t^T)(F_{i+1/2} - F_{i-1/2}) for i = 1..N-1,
// end fluxes F_{1/2}, F_{N-1/2}, and lengths N^2 |X_{i+1} - X_i|^2 - 1.
struct StepOracle {
    int n;
    double gamma;
    ForcingSpec f;

    struct Rows {
        std::vector<Vec2> momentum;  // index i-1
        Vec2 f_first, f_last;
        std::vector<double> length;
    };

    Rows eval(const Points& prev, const Points& x, const VectorX& tau, double t_new, double dt) const {
        const double N = n;
        std::vector<Vec2> et(n + 1, Vec2::Zero()), en(n + 1, Vec2::Zero()), q(n + 1, Vec2::Zero());
        for (int i = 1; i < n; ++i) {
            const Vec2 c = prev.col(i + 1) - prev.col(i - 1);
            et[i] = c / c.norm();
            en[i] = Vec2(-et[i].y(), et[i].x());
            q[i] = (x.col(i + 1) - 2 * x.col(i) + x.col(i - 1)) * N * N - f.kappa0(i / N, t_new) * en[i];
        }
        std::vector<Vec2> F(n);
        for (int i = 0; i < n; ++i) F[i] = (q[i + 1] - q[i]) * N - tau[i] * (x.col(i + 1) - x.col(i)) * N;
        Rows r;
        for (int i = 1; i < n; ++i) {
            const Mat2 P = Mat2::Identity() + gamma * et[i] * et[i].transpose();
            r.momentum.push_back((x.col(i) - prev.col(i)) / dt + N * P * (F[i] - F[i - 1]));
        }
        r.f_first = F[0];
        r.f_last = F[n - 1];
        for (int i = 0; i < n; ++i) r.length.push_back((x.col(i + 1) - x.col(i)).squaredNorm() * N * N - 1);
        return r;
    }
};

}  // namespace

TEST(Residual, VanishesAtStraightEquilibrium) {
    NewtonSimulator sim(config(16), ForcingSpec::zero());
    const auto s = ConstrainedState::from(FilamentState::straight(16));
    const auto fr = sim.freeze(s, 1e-4, 1e-4);
    EXPECT_EQ(sim.residual(fr, sim.pack(s)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Residual, LengthRowsVanishForInextensibleGuess) {
    const int n = 30;
    NewtonSimulator sim(config(n), make_case("case6"));
    const auto s = bent(n);
    const VectorX r = sim.residual(sim.freeze(s, 0.1, 1e-3), sim.pack(s));
    ASSERT_EQ(r.size(), 3 * n + 2);
    for (int i = 0; i < n; ++i) EXPECT_LT(std::abs(r[NewtonSimulator::itau(i)]), 1e-14);
}

TEST(Residual, MatchesRowOracleOnFourSegments) {
    const int n = 4;
    auto cfg = config(n);
    cfg.gamma = 0.8;
    const auto f = make_case("case7");
    NewtonSimulator sim(cfg, f);
    const auto prev = bent(n);
    auto guess = prev;
    guess.nodes.col(2) += Vec2(0.01, -0.02);
    guess.tau << 0.5, -0.25, 1.0, 0.75;
    const double dt = 2e-3, t_new = prev.time + dt;
    const VectorX r = sim.residual(sim.freeze(prev, t_new, dt), sim.pack(guess));
    const auto o = StepOracle{n, 0.8, f}.eval(prev.nodes, guess.nodes, guess.tau, t_new, dt);
    const double ds3 = 1.0 / (n * n * n);
    EXPECT_NEAR(r[0], ds3 * o.f_first.x(), 1e-12);
    EXPECT_NEAR(r[1], ds3 * o.f_first.y(), 1e-12);
    EXPECT_NEAR(r[3 * n], ds3 * o.f_last.x(), 1e-12);
    EXPECT_NEAR(r[3 * n + 1], ds3 * o.f_last.y(), 1e-12);
    for (int i = 1; i < n; ++i) {
        EXPECT_NEAR(r[3 * i], dt * o.momentum[i - 1].x(), 1e-12) << i;
        EXPECT_NEAR(r[3 * i + 1], dt * o.momentum[i - 1].y(), 1e-12) << i;
    }
    for (int i = 0; i < n; ++i) EXPECT_NEAR(r[3 * i + 2], o.length[i], 1e-13) << i;
}

TEST(Jacobian, MatchesFiniteDifferences) {
    const int n = 12;
    NewtonSimulator sim(config(n), make_case("case6"));
    const auto s = bent(n);
    const auto fr = sim.freeze(s, 0.05, 1e-3);
    VectorX z = sim.pack(s);
    z[NewtonSimulator::ix(5)] += 0.01;
    const MatrixX J = sim.dense_jacobian(fr, z);
    EXPECT_LT((J - sim.band_jacobian(fr, z).dense()).cwiseAbs().maxCoeff(), 1e-12);
    MatrixX fd(J.rows(), J.cols());
    for (int c = 0; c < z.size(); ++c) {
        const double h = 1e-6 * std::max(1.0, std::abs(z[c]));
        VectorX zp = z, zm = z;
        zp[c] += h;
        zm[c] -= h;
        fd.col(c) = (sim.residual(fr, zp) - sim.residual(fr, zm)) / (2 * h);
    }
    EXPECT_LT((J - fd).cwiseAbs().maxCoeff() / J.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Newton, EquilibriumConvergesWithoutUpdate) {
    NewtonSimulator sim(config(20), ForcingSpec::zero());
    const auto s = ConstrainedState::from(FilamentState::straight(20));
    NewtonLog log;
    const auto next = sim.step(s, 1e-3, &log);
    EXPECT_LE(log.residuals.size(), 2u);
    EXPECT_EQ((next.nodes - s.nodes).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Newton, QuadraticConvergenceOnGenericStep) {
    const int n = 50;
    NewtonSimulator sim(config(n), make_case("case6"));
    NewtonLog log;
    sim.step(bent(n, 1.0), 1e-3, &log);
    const auto& r = log.residuals;
    ASSERT_GE(r.size(), 4u);
    int checked = 0;
    for (std::size_t j = 1; j + 1 < r.size(); ++j) {
        if (r[j + 1] < 1e-10 || r[j] > 1e-2) continue;  // below 1e-10 the residual sits at roundoff
        EXPECT_LE(r[j + 1], 1e3 * r[j] * r[j]) << "iterate " << j;
        ++checked;
    }
    EXPECT_GE(checked, 1);
    EXPECT_LT(r.back(), 1e-11);
}

TEST(Newton, FramesFrozenFromPreviousChords) {
    const int n = 10;
    NewtonSimulator sim(config(n), make_case("case6"));
    const auto s = bent(n);
    const auto fr = sim.freeze(s, 0.1, 1e-3);
    for (int i = 1; i < n; ++i) {
        const Vec2 c = (s.nodes.col(i + 1) - s.nodes.col(i - 1)).normalized();
        EXPECT_NEAR((fr.et.col(i) - c).norm(), 0.0, 1e-15);
        EXPECT_NEAR(fr.en(0, i), -c.y(), 1e-15);
        EXPECT_NEAR(fr.en(1, i), c.x(), 1e-15);
    }
}

TEST(Newton, SymmetricShapeGivesSymmetricMultipliers) {
    const int n = 40;
    NewtonSimulator sim(config(n), ForcingSpec::zero());
    const auto next = sim.step(ConstrainedState::from(FilamentState::semicircle(n)), 1e-5);
    for (int i = 0; i < n / 2; ++i) EXPECT_NEAR(next.tau[i], next.tau[n - 1 - i], 1e-8 * next.tau.cwiseAbs().maxCoeff());
}

TEST(NodeRun, ZeroDurationKeepsInitialRecord) {
    const auto tr = NewtonSimulator(config(10), ForcingSpec::zero()).run(FilamentState::semicircle(10));
    ASSERT_EQ(tr.size(), 1u);
    EXPECT_EQ(tr.method, 'b');
}

TEST(NodeRun, SemicircleEnergyNeverIncreases) {
    const auto tr = NewtonSimulator(config(50, 1e-5, 1e-3), ForcingSpec::zero()).run(FilamentState::semicircle(50));
    EXPECT_LE(max_energy_increase(tr), 0.0);
}

TEST(NodeRun, LengthConstraintHeldEveryStep) {
    const int n = 40;
    NewtonSimulator sim(config(n), make_case("case6"));
    auto s = ConstrainedState::from(FilamentState::straight(n));
    for (int k = 0; k < 50; ++k) {
        s = sim.step(s, 1e-3);
        for (int i = 0; i < n; ++i)
            EXPECT_LT(std::abs((s.nodes.col(i + 1) - s.nodes.col(i)).squaredNorm() * n * n - 1), 1e-11);
    }
}

TEST(NodeRun, WorkRateIsDissipatedPower) {
    const auto tr = NewtonSimulator(config(30, 1e-3, 0.2), make_case("case6")).run(FilamentState::straight(30));
    for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GE(tr.records[i].diag.work_rate, 0.0);
}
