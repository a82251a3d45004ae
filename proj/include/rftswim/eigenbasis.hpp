#pragma once

// Clamped-clamped eigenfunctions of d^4/ds^4 on [0,1]:
//   psi'''' = lambda psi,  psi = psi' = 0 at s = 0, 1,  lambda_k = xi_k^4,
// where xi_k is the k-th positive root of cos(xi) cosh(xi) = 1.

#include "rftswim/quadrature.hpp"
#include "rftswim/types.hpp"

#include <quadmath.h>

#include <string>
#include <vector>

namespace rftswim {

// Above this the double-precision evaluation of psi_k loses too many digits
// near s = 1 to be trusted.
inline constexpr int kMaxStableModes = 20;
inline constexpr int kDefaultBasisGrid = 4001;

namespace detail {

inline void check_mode_count(int k_max) {
    if (k_max < 1) throw ConfigError("k_max must be at least 1");
    if (k_max > kMaxStableModes)
        throw ConfigError("k_max = " + std::to_string(k_max) + " exceeds the stable limit of " +
                          std::to_string(kMaxStableModes) + " eigenmodes");
}

// cos(x) - sech(x) has the same roots as cos(x)cosh(x) - 1 but stays O(1).
inline double scaled_char(double x) { return std::cos(x) - 1.0 / std::cosh(x); }
inline double scaled_char_deriv(double x) {
    const double c = std::cosh(x);
    return -std::sin(x) + std::sinh(x) / (c * c);
}

inline __float128 refine_root_quad(double seed) {
    __float128 x = seed;
    for (int it = 0; it < 8; ++it) {
        const __float128 c = coshq(x);
        const __float128 f = cosq(x) - 1 / c;
        const __float128 df = -sinq(x) + sinhq(x) / (c * c);
        const __float128 step = f / df;
        x -= step;
        if (fabsq(step) < static_cast<__float128>(1e-32) * x) break;
    }
    return x;
}

}  // namespace detail

/// k-th positive root of cos(xi)cosh(xi) = 1 in double precision.
///
/// Newton on cos(xi) - sech(xi) from (2k+1)pi/2, falling back to bisection on
/// [(2k+1)pi/2 - pi/4, (2k+1)pi/2 + pi/4] whenever a step leaves the bracket.
inline double find_root(int k) {
    if (k < 1) throw ConfigError("root index must be positive");
    const double centre = (2 * k + 1) * kPi / 2;
    double lo = centre - kPi / 4, hi = centre + kPi / 4;
    double flo = detail::scaled_char(lo);
    if (flo * detail::scaled_char(hi) > 0.0)
        throw NumericalError("root bracket for xi_" + std::to_string(k) + " does not change sign");
    double x = centre;
    for (int it = 0; it < 200; ++it) {
        const double f = detail::scaled_char(x);
        if (f == 0.0) return x;
        if ((f < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = f;
        } else {
            hi = x;
        }
        double next = x - f / detail::scaled_char_deriv(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4e-16 * x || hi - lo <= 4e-16 * x) return next;
        x = next;
    }
    throw NumericalError("root finder did not converge for xi_" + std::to_string(k));
}

/// Roots xi_1..xi_kmax.
inline std::vector<double> find_roots(int k_max) {
    detail::check_mode_count(k_max);
    std::vector<double> xi(k_max);
    for (int k = 1; k <= k_max; ++k) xi[k - 1] = find_root(k);
    return xi;
}

/// |cos(xi) cosh(xi) - 1| at the k-th root.
///
/// cosh(xi_k) grows like e^{xi_k}, so a double-precision xi cannot drive this
/// residual below ~cosh(xi) * ulp(xi). The root is refined and the residual
/// evaluated in binary128; the double stored in EigenBasis is that root rounded.
inline double root_residual(int k) {
    const __float128 x = detail::refine_root_quad(find_root(k));
    return static_cast<double>(fabsq(cosq(x) * coshq(x) - 1));
}

/// Unnormalized eigenfunction divided by cosh(xi), regrouped so that no term
/// grows with xi. Returns (value, derivative).
inline std::pair<double, double> scaled_eigenfunction(double xi, double s) {
    const double ch = std::cosh(xi);
    const double c = std::cos(xi), sn = std::sin(xi);
    const double p = c / ch - 1.0;           // (cos xi - cosh xi) / cosh xi
    const double q = sn / ch + std::tanh(xi); // (sin xi + sinh xi) / cosh xi
    const double xs = xi * s;
    const double cs = std::cos(xs), ss = std::sin(xs);
    // cosh(xi)cosh(xi s) - sinh(xi)sinh(xi s) = cosh(xi (1-s))
    const double v = p * cs + q * ss + std::cosh(xi * (1.0 - s)) / ch - c * std::cosh(xs) / ch -
                     sn * std::sinh(xs) / ch;
    const double d = xi * (-p * ss + q * cs - std::sinh(xi * (1.0 - s)) / ch -
                           c * std::sinh(xs) / ch - sn * std::cosh(xs) / ch);
    return {v, d};
}

/// Normalized eigenfunctions tabulated on a uniform quadrature grid, plus the
/// coupling matrix S_{kl} = int_0^1 psi_k (psi_l)_s ds.
class EigenBasis {
public:
    static EigenBasis build(int k_max, int n_grid = kDefaultBasisGrid) {
        detail::check_mode_count(k_max);
        if (n_grid < 3 || n_grid % 2 == 0)
            throw ConfigError("basis quadrature grid needs an odd point count >= 3");
        EigenBasis b;
        b.k_max_ = k_max;
        b.grid_ = uniform_grid(n_grid);
        b.xi_.resize(k_max);
        b.lambda_.resize(k_max);
        b.scale_.resize(k_max);
        b.norm_.resize(k_max);
        b.psi_.resize(k_max, n_grid);
        b.dpsi_.resize(k_max, n_grid);
        const auto roots = find_roots(k_max);
        for (int k = 0; k < k_max; ++k) {
            const double xi = roots[k];
            b.xi_[k] = xi;
            b.lambda_[k] = std::pow(xi, 4);
            // Left half evaluated, right half mirrored by parity (even about 1/2 for odd k).
            const double parity = k % 2 == 0 ? 1.0 : -1.0;
            const int mid = n_grid / 2;
            for (int i = 0; i <= mid; ++i) {
                const auto [v, d] = scaled_eigenfunction(xi, b.grid_[i]);
                b.psi_(k, i) = v;
                b.dpsi_(k, i) = d;
                b.psi_(k, n_grid - 1 - i) = parity * v;
                b.dpsi_(k, n_grid - 1 - i) = -parity * d;
            }
            (parity > 0 ? b.dpsi_(k, mid) : b.psi_(k, mid)) = 0.0;
            const VectorX sq = b.psi_.row(k).cwiseAbs2().transpose();
            const double nrm = std::sqrt(simpson_unit(sq));
            b.scale_[k] = 1.0 / nrm;
            b.norm_[k] = nrm * std::cosh(xi);
            b.psi_.row(k) *= b.scale_[k];
            b.dpsi_.row(k) *= b.scale_[k];
        }
        b.coupling_.resize(k_max, k_max);
        for (int k = 0; k < k_max; ++k)
            for (int l = 0; l < k_max; ++l) {
                VectorX prod = b.psi_.row(k).cwiseProduct(b.dpsi_.row(l)).transpose();
                b.coupling_(k, l) = simpson_unit_folded(prod);
            }
        return b;
    }

    int k_max() const { return k_max_; }
    int grid_size() const { return static_cast<int>(grid_.size()); }
    const VectorX& grid() const { return grid_; }
    const VectorX& xi() const { return xi_; }
    const VectorX& lambda() const { return lambda_; }
    /// L2 norms of the unnormalized eigenfunctions as written with cosh-sized coefficients.
    const VectorX& norm_factors() const { return norm_; }
    /// Row k-1 holds psi_k on the grid.
    const MatrixX& psi_samples() const { return psi_; }
    const MatrixX& dpsi_samples() const { return dpsi_; }
    const MatrixX& coupling() const { return coupling_; }

    double xi(int k) const { return xi_[index(k)]; }
    double lambda(int k) const { return lambda_[index(k)]; }

    /// psi_k(s) and psi_k'(s) at an arbitrary s in [0,1] (k is 1-based).
    std::pair<double, double> eval(int k, double s) const {
        const int i = index(k);
        auto [v, d] = scaled_eigenfunction(xi_[i], s);
        return {v * scale_[i], d * scale_[i]};
    }
    double psi(int k, double s) const { return eval(k, s).first; }
    double dpsi(int k, double s) const { return eval(k, s).second; }

    /// psi_k and psi_k' on a user grid.
    std::pair<VectorX, VectorX> eval(int k, const VectorX& s) const {
        VectorX v(s.size()), d(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) std::tie(v[i], d[i]) = eval(k, s[i]);
        return {v, d};
    }

    /// Coefficients <f, psi_k> for samples of f on this basis' grid.
    VectorX project(const VectorX& f_on_grid) const {
        if (f_on_grid.size() != grid_.size())
            throw ConfigError("projection samples do not match the basis grid");
        VectorX c(k_max_);
        for (int k = 0; k < k_max_; ++k) {
            VectorX prod = psi_.row(k).transpose().cwiseProduct(f_on_grid);
            c[k] = simpson_unit(prod);
        }
        return c;
    }

private:
    int index(int k) const {
        if (k < 1 || k > k_max_)
            throw ConfigError("eigenmode " + std::to_string(k) + " outside basis of size " +
                              std::to_string(k_max_));
        return k - 1;
    }

    int k_max_ = 0;
    VectorX grid_, xi_, lambda_, scale_, norm_;
    MatrixX psi_, dpsi_, coupling_;
};

}  // namespace rftswim
