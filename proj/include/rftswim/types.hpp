#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rftswim {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using Points = Eigen::Matrix2Xd;

inline constexpr double kPi = 3.14159265358979323846;

// Smallest segment count the boundary stencils can be built on.
inline constexpr int kMinSegments = 4;

/// Invalid input or configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver failed to produce a trustworthy answer (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Planar inextensible filament: basepoint plus N segment angles.
///
/// Node i sits at x0 + (1/N) sum_{k<=i} (cos theta_k, sin theta_k), so every
/// segment has length exactly 1/N regardless of the angles.
struct FilamentState {
    Vec2 x0 = Vec2::Zero();
    VectorX theta;
    double time = 0.0;

    FilamentState() = default;
    FilamentState(Vec2 basepoint, VectorX angles, double t = 0.0)
        : x0(std::move(basepoint)), theta(std::move(angles)), time(t) {}

    int n_segments() const { return static_cast<int>(theta.size()); }

    void validate() const {
        if (n_segments() < kMinSegments)
            throw ConfigError("filament needs at least " + std::to_string(kMinSegments) +
                              " segments, got " + std::to_string(n_segments()));
        if (!x0.allFinite() || !theta.allFinite())
            throw NumericalError("filament state contains non-finite values");
    }

    /// Node positions X_0..X_N as columns.
    Points nodes() const {
        const int n = n_segments();
        Points x(2, n + 1);
        x.col(0) = x0;
        const double ds = 1.0 / n;
        for (int i = 0; i < n; ++i)
            x.col(i + 1) = x.col(i) + ds * Vec2(std::cos(theta[i]), std::sin(theta[i]));
        return x;
    }

    /// Straight filament along the x-axis from (0,0) to (1,0).
    static FilamentState straight(int n) { return FilamentState(Vec2::Zero(), VectorX::Zero(n)); }

    /// Polygonal semicircle of unit length: theta_i = pi (i - 1/2) / N.
    static FilamentState semicircle(int n) {
        VectorX th(n);
        for (int i = 0; i < n; ++i) th[i] = kPi * (i + 0.5) / n;
        return FilamentState(Vec2::Zero(), th);
    }
};

enum class TimeScheme { BackwardEuler, Trapezoidal };

enum class JacobianMode {
    FrozenMobility,   // stiff bending part exact, mobility held at the current iterate
    FiniteDifference  // forward differences on the reduced state
};

/// Which parameterization of the midpoint velocities the angle scheme uses.
enum class MidpointSum {
    Geometric,  // Xdot_0 + n_i thetadot_i / (2N) + (1/N) sum_{k<i} n_k thetadot_k, the polygon midpoint velocity
    Printed     // same with the sum over k<=i; ill-conditioned (growth ~3^N) near straight shapes
};

struct SimConfig {
    double gamma = 1.0;
    int n_segments = 100;
    double dt = 2e-4;
    double t_end = 1.0;
    double newton_tol = 1e-10;
    int max_newton_iter = 30;
    int max_halvings = 8;
    int output_stride = 1;
    TimeScheme scheme = TimeScheme::BackwardEuler;
    JacobianMode jacobian = JacobianMode::FrozenMobility;
    MidpointSum midpoint_sum = MidpointSum::Geometric;
    // Total-force closure sums segments 1..closure_segments; 0 means all N.
    // N-1 reproduces the literal index range, which leaves the system singular.
    int closure_segments = 0;

    void validate() const {
        if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
        if (n_segments < kMinSegments)
            throw ConfigError("n_segments must be at least " + std::to_string(kMinSegments));
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
        if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
        if (max_newton_iter < 1) throw ConfigError("max_newton_iter must be at least 1");
        if (output_stride < 1) throw ConfigError("output_stride must be at least 1");
        if (closure_segments != 0 && closure_segments != n_segments - 1 &&
            closure_segments != n_segments)
            throw ConfigError("closure_segments must be 0, N-1 or N");
    }
};

/// Per-record derived quantities.
struct Diagnostics {
    VectorX curvature;   // kappa at interior nodes s_1..s_{N-1}
    double speed = 0.0;  // U(t) = -gamma int (kappa0)_s (kappa - kappa0) ds
    double work_rate = 0.0;  // power delivered to the fluid, int Xdot . M Xdot ds >= 0
    double force_residual = 0.0;
    double torque_residual = 0.0;
};

struct TrajectoryRecord {
    FilamentState state;
    Diagnostics diag;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    char method = 'a';

    bool empty() const { return records.empty(); }
    std::size_t size() const { return records.size(); }
    int n_segments() const { return records.empty() ? 0 : records.front().state.n_segments(); }
    const TrajectoryRecord& back() const { return records.back(); }

    void push_back(TrajectoryRecord rec) {
        if (!records.empty()) {
            if (rec.state.n_segments() != n_segments())
                throw ConfigError("trajectory records must share the segment count");
            if (!(rec.state.time > records.back().state.time))
                throw ConfigError("trajectory time stamps must be strictly increasing");
        }
        records.push_back(std::move(rec));
    }
};

}  // namespace rftswim
