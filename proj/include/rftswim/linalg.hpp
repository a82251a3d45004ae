#pragma once

#include "rftswim/types.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

namespace rftswim {

/// Square banded matrix in LAPACK general-band layout, factored with dgbtrf
/// (LU with partial pivoting, which widens the upper band by kl).
class BandMatrix {
public:
    BandMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(ld_ * n, 0.0) {}

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    void set_zero() {
        std::fill(ab_.begin(), ab_.end(), 0.0);
        factored_ = false;
    }

    void add(int r, int c, double v) {
        if (r - c > kl_ || c - r > ku_)
            throw std::logic_error("entry (" + std::to_string(r) + "," + std::to_string(c) + ") outside band");
        ab_[static_cast<std::size_t>(kl_ + ku_ + r - c) + static_cast<std::size_t>(c) * ld_] += v;
    }

    double operator()(int r, int c) const {
        if (r - c > kl_ || c - r > ku_) return 0.0;
        return ab_[static_cast<std::size_t>(kl_ + ku_ + r - c) + static_cast<std::size_t>(c) * ld_];
    }

    MatrixX dense() const {
        MatrixX m = MatrixX::Zero(n_, n_);
        for (int c = 0; c < n_; ++c)
            for (int r = std::max(0, c - ku_); r <= std::min(n_ - 1, c + kl_); ++r) m(r, c) = (*this)(r, c);
        return m;
    }

    void factor() {
        piv_.resize(n_);
        const lapack_int info =
            LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n_, n_, kl_, ku_, ab_.data(), ld_, piv_.data());
        if (info > 0) throw NumericalError("banded Jacobian is singular (zero pivot " + std::to_string(info) + ")");
        if (info < 0) throw std::logic_error("dgbtrf argument error");
        factored_ = true;
    }

    VectorX solve(VectorX b) const {
        if (!factored_) throw std::logic_error("BandMatrix::solve before factor");
        const lapack_int info = LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1, ab_.data(), ld_,
                                               piv_.data(), b.data(), n_);
        if (info != 0) throw std::logic_error("dgbtrs argument error");
        return b;
    }

private:
    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;
    std::vector<lapack_int> piv_;
    bool factored_ = false;
};

}  // namespace rftswim
