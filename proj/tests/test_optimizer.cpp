#include "rftswim/optimizer.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rftswim;

namespace {

const EigenBasis& basis() {
    static const EigenBasis b = EigenBasis::build(12);
    return b;
}

OptProblem problem(ConstraintSet c, int k_max, int restarts = 8) {
    OptProblem p;
    p.constraints = c;
    p.k_max = k_max;
    p.restarts = restarts;
    return p;
}

// z ordering for m_max = 1, k_max = 2: (a1, a2, b1, b2).
VectorX torus_point(double alpha, double beta) {
    VectorX z(4);
    z << std::cos(alpha), std::sin(alpha), std::cos(beta), std::sin(beta);
    return z;
}

}  // namespace

TEST(WorkConstrained, MatchesGridSearchOverThreeSphere) {
    const auto p = problem(ConstraintSet::Work, 2);
    const auto res = solve_work_constrained(p, basis());
    const auto q = quadratic_forms(1, 2, p.omega, p.gamma, basis());
    const VectorX winv = q.W.cwiseSqrt().cwiseInverse();
    // 10^6 directions on S^3 in work-whitened coordinates.
    const int n = 100;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double p1 = kPi * (i + 0.5) / n, p2 = kPi * (j + 0.5) / n, p3 = 2 * kPi * k / n;
                VectorX y(4);
                y << std::cos(p1), std::sin(p1) * std::cos(p2), std::sin(p1) * std::sin(p2) * std::cos(p3),
                    std::sin(p1) * std::sin(p2) * std::sin(p3);
                best = std::min(best, q.speed(winv.cwiseProduct(y)));
            }
    EXPECT_LE(res.speed, best + 1e-12);
    EXPECT_NEAR(res.speed, best, 1e-3 * std::abs(best));
    EXPECT_NEAR(res.work, 1.0, 1e-12);
}

TEST(WorkConstrained, StationaryAlongFeasibleDirections) {
    const auto p = problem(ConstraintSet::Work, 8);
    const auto res = solve_work_constrained(p, basis());
    const auto q = quadratic_forms(1, 8, p.omega, p.gamma, basis());
    const VectorX z = q.stack(res.coeffs);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        VectorX v(z.size());
        for (auto& x : v) x = nd(rng);
        const VectorX wz = q.W.cwiseProduct(z);
        v -= wz * (v.dot(wz) / wz.squaredNorm());  // tangent to W = 1
        for (double t : {1e-3, 1e-2, 1e-1}) {
            VectorX zt = z + t * v;
            zt /= std::sqrt(q.work(zt));
            EXPECT_GE(q.speed(zt), res.speed - 1e-8);
        }
    }
}

TEST(WorkConstrained, ReportedValuesReproducible) {
    const auto p = problem(ConstraintSet::Work, 12);
    const auto res = solve_work_constrained(p, basis());
    EXPECT_NEAR(res.speed, avg_speed(res.coeffs, p.omega, p.gamma, basis()), 1e-12);
    EXPECT_NEAR(res.work, avg_work(res.coeffs, p.omega, basis()), 1e-12);
    EXPECT_LT(std::abs(res.constraint_residuals.at(0)), 1e-8);
    EXPECT_LT(res.speed, 0.0);
    EXPECT_FALSE(res.degenerate);
}

TEST(WorkConstrained, LowestTemporalModeCarriesTheWork) {
    auto p = problem(ConstraintSet::Work, 10);
    p.m_max = 3;
    const auto res = solve_work_constrained(p, basis());
    EXPECT_GT(work_fraction_by_mode(res.coeffs, p.omega, basis())[0], 0.9);
}

TEST(WorkConstrained, RejectsSingleMode) {
    EXPECT_THROW(solve_work_constrained(problem(ConstraintSet::Work, 1), basis()), ConfigError);
}

TEST(SphereConstrained, MatchesGridSearchOverTorus) {
    const auto p = problem(ConstraintSet::Bending, 2);
    const auto res = solve_sphere_constrained(p, basis());
    const auto q = quadratic_forms(1, 2, p.omega, p.gamma, basis());
    const int n = 1000;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) best = std::min(best, q.speed(torus_point(2 * kPi * i / n, 2 * kPi * j / n)));
    EXPECT_LE(res.speed, best + 1e-12);
    EXPECT_NEAR(res.speed, best, 1e-3 * std::abs(best));
    for (double r : res.constraint_residuals) EXPECT_LT(std::abs(r), 1e-8);
}

TEST(SphereConstrained, WorkTargetOnTorusMatchesGridSearch) {
    auto p = problem(ConstraintSet::WorkBending, 2);
    const auto q = quadratic_forms(1, 2, p.omega, p.gamma, basis());
    const auto [lo, hi] = work_range_on_spheres(p, basis());
    p.work_target = 0.5 * (lo + hi);
    const auto res = solve_work_bending_constrained(p, basis());
    for (double r : res.constraint_residuals) EXPECT_LT(std::abs(r), 1e-8);
    EXPECT_NEAR(res.work, p.work_target, 1e-8);

    // For each alpha, W = target fixes cos^2(beta).
    const double w1 = q.W[q.a_index(1, 1)], w2 = q.W[q.a_index(1, 2)];
    double best = std::numeric_limits<double>::infinity();
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double a = 2 * kPi * i / n;
        const double rest = p.work_target - (w1 * std::pow(std::cos(a), 2) + w2 * std::pow(std::sin(a), 2));
        const double c2 = (rest - w2) / (w1 - w2);
        if (c2 < 0 || c2 > 1) continue;
        const double b0 = std::acos(std::sqrt(c2));
        for (double b : {b0, -b0, kPi - b0, kPi + b0}) best = std::min(best, q.speed(torus_point(a, b)));
    }
    EXPECT_LE(res.speed, best + 1e-10);
    EXPECT_NEAR(res.speed, best, 1e-3 * std::abs(best));
}

TEST(SphereConstrained, InfeasibleWorkTargetReportsDiagnostics) {
    const auto p = problem(ConstraintSet::WorkBending, 12, 2);
    try {
        solve_work_bending_constrained(p, basis());
        FAIL() << "expected infeasibility";
    } catch (const NumericalError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("W on the unit spheres"), std::string::npos);
        EXPECT_NE(msg.find("restart 1"), std::string::npos);
    }
}

TEST(SphereConstrained, SeedDeterminism) {
    const auto p = problem(ConstraintSet::Bending, 6, 4);
    const auto r1 = solve_sphere_constrained(p, basis());
    const auto r2 = solve_sphere_constrained(p, basis());
    EXPECT_EQ(r1.speed, r2.speed);
    EXPECT_EQ((r1.coeffs.a - r2.coeffs.a).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r1.best_restart, r2.best_restart);
    EXPECT_EQ(r1.seed, p.seed);

    auto p2 = p;
    p2.seed = 99;
    EXPECT_NEAR(solve_sphere_constrained(p2, basis()).speed, r1.speed, 1e-8);
}

TEST(SphereConstrained, ReportedValuesReproducible) {
    const auto p = problem(ConstraintSet::Bending, 12, 6);
    const auto res = optimize(p, basis());
    EXPECT_NEAR(res.speed, avg_speed(res.coeffs, p.omega, p.gamma, basis()), 1e-12);
    EXPECT_NEAR(res.coeffs.a.norm(), 1.0, 1e-8);
    EXPECT_NEAR(res.coeffs.b.norm(), 1.0, 1e-8);
    EXPECT_EQ(static_cast<int>(res.restarts.size()), p.restarts);
    EXPECT_GE(res.distinct_optima, 1);
}

TEST(Problem, ParsesConstraintNames) {
    EXPECT_EQ(parse_constraint_set("work"), ConstraintSet::Work);
    EXPECT_EQ(parse_constraint_set("work-bending"), ConstraintSet::WorkBending);
    EXPECT_THROW(parse_constraint_set("fast"), ConfigError);
}
