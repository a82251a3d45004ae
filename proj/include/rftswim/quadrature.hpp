#pragma once

#include "rftswim/types.hpp"

#include <span>

namespace rftswim {

/// Composite Simpson rule for samples on a uniform grid over [a, a + (n-1) h].
/// The sample count must be odd.
inline double simpson(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 3 || n % 2 == 0)
        throw ConfigError("composite Simpson needs an odd number (>= 3) of samples, got " +
                          std::to_string(n));
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) (i % 2 ? odd : even) += f[i];
    return h / 3.0 * (f[0] + f[n - 1] + 4.0 * odd + 2.0 * even);
}

/// Simpson over [0,1] for samples on n equally spaced points including both ends.
inline double simpson_unit(const VectorX& f) {
    return simpson(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())),
                   1.0 / static_cast<double>(f.size() - 1));
}

/// Simpson over [0,1] with mirror-image samples added pairwise before weighting,
/// so samples odd about s = 1/2 integrate to exactly zero.
inline double simpson_unit_folded(const VectorX& f) {
    const Eigen::Index n = f.size();
    if (n < 3 || n % 2 == 0)
        throw ConfigError("composite Simpson needs an odd number (>= 3) of samples, got " + std::to_string(n));
    const Eigen::Index mid = n / 2;
    auto w = [&](Eigen::Index i) { return i == 0 ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    double s = w(mid) * f[mid];
    for (Eigen::Index i = 0; i < mid; ++i) s += w(i) * (f[i] + f[n - 1 - i]);
    return s / (3.0 * static_cast<double>(n - 1));
}

/// Simpson on [0,1] of a callable, using n (odd) points.
template <typename F>
double simpson_unit(F&& fn, int n) {
    VectorX v(n);
    for (int i = 0; i < n; ++i) v[i] = fn(static_cast<double>(i) / (n - 1));
    return simpson_unit(v);
}

inline double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return h * s;
}

/// Trapezoid rule on a non-uniform abscissa.
inline double trapezoid(std::span<const double> x, std::span<const double> f) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    return s;
}

inline VectorX uniform_grid(int n) { return VectorX::LinSpaced(n, 0.0, 1.0); }

}  // namespace rftswim
