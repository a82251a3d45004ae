#pragma once

#include "rftswim/types.hpp"

namespace rftswim {

/// kappa_i = N (theta_{i+1} - theta_i) at the interior nodes s_i = i/N, i = 1..N-1.
inline VectorX recover_curvature(const FilamentState& st) {
    const int n = st.n_segments();
    return n * (st.theta.tail(n - 1) - st.theta.head(n - 1));
}

/// Interior node arclengths s_1..s_{N-1}.
inline VectorX interior_nodes(int n) { return VectorX::LinSpaced(n - 1, 1.0 / n, (n - 1.0) / n); }

/// Segment midpoint arclengths s_{i-1/2}, i = 1..N.
inline VectorX midpoints(int n) { return VectorX::LinSpaced(n, 0.5 / n, (n - 0.5) / n); }

struct Frames {
    Points et, en;  // column i-1 belongs to segment i
};

inline Frames frame_vectors(const FilamentState& st) {
    const int n = st.n_segments();
    Frames f{Points(2, n), Points(2, n)};
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(st.theta[i]), s = std::sin(st.theta[i]);
        f.et.col(i) = Vec2(c, s);
        f.en.col(i) = Vec2(-s, c);
    }
    return f;
}

/// Discrete bending energy sum_i kappa_i^2 / N.
inline double bending_energy(const FilamentState& st) {
    return recover_curvature(st).squaredNorm() / st.n_segments();
}

/// Largest deviation of N |X_{i+1} - X_i| from 1.
inline double segment_length_defect(const Points& x) {
    const int n = static_cast<int>(x.cols()) - 1;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(n * (x.col(i + 1) - x.col(i)).norm() - 1.0));
    return worst;
}

/// Segment angles from node positions, unwrapped so consecutive angles differ by less than pi.
inline FilamentState state_from_nodes(const Points& x, double t) {
    const int n = static_cast<int>(x.cols()) - 1;
    VectorX th(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 d = x.col(i + 1) - x.col(i);
        double a = std::atan2(d.y(), d.x());
        if (i > 0) a -= 2 * kPi * std::round((a - th[i - 1]) / (2 * kPi));
        th[i] = a;
    }
    return FilamentState(x.col(0), th, t);
}

}  // namespace rftswim
