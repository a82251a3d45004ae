#include "rftswim/analytics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rftswim;

namespace {

// a_{1,1} = 1, everything else zero, omega = 2 pi. Frozen from the scalar oracle
// f = w^2/(w^2+l^2), c = -f, d = -f l/w, W = l f / 2 evaluated in long double.
constexpr double kC11 = -1.57533260270553251e-04;
constexpr double kD11 = -1.25502367922865018e-02;
constexpr double kW11 = 3.94277317074596058e-02;

const EigenBasis& basis() {
    static const EigenBasis b = EigenBasis::build(12);
    return b;
}

ModalCoeffs random_coeffs(int m_max, int k_max, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0, 1);
    ModalCoeffs c{MatrixX(m_max, k_max), MatrixX(m_max, k_max)};
    for (int i = 0; i < c.a.size(); ++i) {
        c.a.data()[i] = n(rng);
        c.b.data()[i] = n(rng);
    }
    return c;
}

// Forcing delayed by phi/omega: A' = A cos phi - B sin phi, B' = A sin phi + B cos phi (per m, phase m phi).
ModalCoeffs shifted(const ModalCoeffs& c, double phi) {
    ModalCoeffs o = c;
    for (int m = 0; m < c.m_max(); ++m) {
        const double p = (m + 1) * phi;
        o.a.row(m) = std::cos(p) * c.a.row(m) - std::sin(p) * c.b.row(m);
        o.b.row(m) = std::sin(p) * c.a.row(m) + std::cos(p) * c.b.row(m);
    }
    return o;
}

}  // namespace

TEST(Response, SingleModeScalarOracle) {
    ModalCoeffs c{MatrixX::Zero(1, 3), MatrixX::Zero(1, 3)};
    c.a(0, 0) = 1.0;
    const long double xi = basis().xi(1);
    const long double l = powl(xi, 4), w = 2 * 3.14159265358979323846264338327950288L;
    const long double f = w * w / (w * w + l * l);
    EXPECT_NEAR(static_cast<double>(-f), kC11, 1e-18);
    EXPECT_NEAR(static_cast<double>(-f * l / w), kD11, 1e-16);
    EXPECT_NEAR(static_cast<double>(l * f / 2), kW11, 1e-16);

    const auto r = response_coeffs(c, 2 * kPi, basis());
    EXPECT_NEAR(r.c(0, 0), kC11, 1e-14);
    EXPECT_NEAR(r.d(0, 0), kD11, 1e-13);
    EXPECT_EQ(r.c(0, 1), 0.0);
    EXPECT_NEAR(avg_work(c, 2 * kPi, basis()), kW11, 1e-13);
}

TEST(Response, ZeroForcingZeroResponse) {
    ModalCoeffs c{MatrixX::Zero(2, 4), MatrixX::Zero(2, 4)};
    const auto r = response_coeffs(c, 2 * kPi, basis());
    EXPECT_EQ(r.c.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(r.d.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Response, BasisTooSmallRejected) {
    const auto small = EigenBasis::build(3);
    EXPECT_THROW(avg_speed(random_coeffs(1, 5, 1), 2 * kPi, 1.0, small), ConfigError);
}

TEST(Speed, SingleSpatialModeCannotSwim) {
    for (int k = 1; k <= 12; ++k) {
        ModalCoeffs c{MatrixX::Zero(2, 12), MatrixX::Zero(2, 12)};
        c.a(0, k - 1) = 0.7;
        c.b(0, k - 1) = -1.3;
        c.a(1, k - 1) = 0.4;
        EXPECT_EQ(avg_speed(c, 2 * kPi, 1.0, basis()), 0.0) << "k=" << k;
    }
}

TEST(Speed, OneParityOnlyCannotSwim) {
    auto c = random_coeffs(1, 12, 7);
    for (int k = 2; k <= 12; k += 2) c.a(0, k - 1) = c.b(0, k - 1) = 0.0;
    EXPECT_NEAR(avg_speed(c, 2 * kPi, 1.0, basis()), 0.0, 1e-10);
}

TEST(Speed, LinearInGammaQuadraticInAmplitude) {
    const auto c = random_coeffs(2, 6, 3);
    const double u = avg_speed(c, 2 * kPi, 1.0, basis());
    EXPECT_NEAR(avg_speed(c, 2 * kPi, 2.5, basis()), 2.5 * u, 1e-12 * std::abs(u));
    ModalCoeffs h{0.5 * c.a, 0.5 * c.b};
    EXPECT_NEAR(avg_speed(h, 2 * kPi, 1.0, basis()), 0.25 * u, 1e-12 * std::abs(u));
}

TEST(Speed, MirroredForcingSwimsBackwards) {
    // F(1-s) has coefficients (-1)^{k+1} c_k; arclength reversal flips the direction.
    const auto c = random_coeffs(2, 12, 11);
    ModalCoeffs m = c;
    for (int k = 2; k <= 12; k += 2) {
        m.a.col(k - 1) *= -1;
        m.b.col(k - 1) *= -1;
    }
    const double u = avg_speed(c, 2 * kPi, 1.0, basis());
    EXPECT_NEAR(avg_speed(m, 2 * kPi, 1.0, basis()), -u, 1e-12 * std::abs(u));
}

TEST(Speed, InvariantUnderTimeShift) {
    const auto c = random_coeffs(3, 8, 5);
    const double u = avg_speed(c, 2 * kPi, 1.0, basis()), w = avg_work(c, 2 * kPi, basis());
    for (double phi : {0.3, 1.7, -2.2}) {
        const auto s = shifted(c, phi);
        EXPECT_NEAR(avg_speed(s, 2 * kPi, 1.0, basis()), u, 1e-12 * std::abs(u));
        EXPECT_NEAR(avg_work(s, 2 * kPi, basis()), w, 1e-12 * w);
    }
}

TEST(QuadraticForm, ReproducesLiteralSums) {
    const auto c = random_coeffs(3, 10, 9);
    const auto q = quadratic_forms(3, 10, 2 * kPi, 1.0, basis());
    const VectorX z = q.stack(c);
    const double u = avg_speed(c, 2 * kPi, 1.0, basis());
    EXPECT_NEAR(q.speed(z), u, 1e-12 * std::max(1.0, std::abs(u)));
    EXPECT_NEAR(q.work(z), avg_work(c, 2 * kPi, basis()), 1e-12 * q.work(z));
    EXPECT_LT((q.U - q.U.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GT(q.W.minCoeff(), 0.0);
    const auto back = q.unstack(z);
    EXPECT_EQ((back.a - c.a).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((back.b - c.b).cwiseAbs().maxCoeff(), 0.0);
}

TEST(InstantaneousSpeed, ZeroWhenShapeFollowsForcing) {
    const int n = 80;
    const auto f = make_case("case6");
    const double t = 0.37;
    // theta_{i+1} - theta_i = kappa0(s_i) / N reproduces kappa = kappa0 at every interior node.
    VectorX th(n);
    th[0] = 0.2;
    for (int i = 1; i < n; ++i) th[i] = th[i - 1] + f.kappa0(static_cast<double>(i) / n, t) / n;
    FilamentState st(Vec2::Zero(), th, t);
    EXPECT_NEAR(instantaneous_speed(st, f, 1.0), 0.0, 1e-13);
    EXPECT_NE(instantaneous_speed(FilamentState(Vec2::Zero(), VectorX::Zero(n), t), f, 1.0), 0.0);
}

TEST(Displacement, ConstantSpeedIntegratesExactly) {
    Trajectory tr;
    for (int i = 0; i <= 10; ++i) {
        TrajectoryRecord r{FilamentState(Vec2(0.1 * i, 0), VectorX::Zero(4), 0.1 * i), {}};
        r.diag.speed = -0.25;
        tr.push_back(r);
    }
    EXPECT_NEAR(predicted_displacement(tr, 0.15, 0.85), -0.25 * 0.7, 1e-15);
    EXPECT_NEAR(basepoint_x(tr, 0.55), 0.55, 1e-15);
    EXPECT_THROW(predicted_displacement(tr, 0.5, 1.5), ConfigError);
}

TEST(Displacement, NonMonotoneTrajectoryRejected) {
    Trajectory tr;
    tr.push_back({FilamentState::straight(4), {}});
    EXPECT_THROW(tr.push_back({FilamentState::straight(4), {}}), ConfigError);
    EXPECT_THROW(tr.push_back({FilamentState(Vec2::Zero(), VectorX::Zero(5), 1.0), {}}), ConfigError);
}
