#pragma once

// Preferred-curvature forcing
//   kappa0(s,t) = sum_m A_m(s) cos(omega m t) - B_m(s) sin(omega m t).

#include "rftswim/eigenbasis.hpp"
#include "rftswim/quadrature.hpp"
#include "rftswim/types.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rftswim {

/// One term of a spatial profile. The set is closed so derivatives stay analytic.
struct ProfileTerm {
    enum class Kind { Sin, Cos, Poly, Eigenmode };
    Kind kind = Kind::Poly;
    double coef = 1.0;
    double a = 0.0;      // Sin/Cos: argument a*pi*s + phi
    double phi = 0.0;
    VectorX poly;        // Poly: sum_j poly[j] s^j
    int k = 0;           // Eigenmode index (1-based)
};

/// Linear combination of ProfileTerms; eigenmode terms share one basis.
class Profile {
public:
    Profile() = default;

    static Profile sin(double a, double phi = 0.0, double coef = 1.0) {
        Profile p;
        p.terms_.push_back({ProfileTerm::Kind::Sin, coef, a, phi, {}, 0});
        return p;
    }
    static Profile cos(double a, double phi = 0.0, double coef = 1.0) {
        Profile p;
        p.terms_.push_back({ProfileTerm::Kind::Cos, coef, a, phi, {}, 0});
        return p;
    }
    static Profile poly(VectorX coeffs) {
        Profile p;
        p.terms_.push_back({ProfileTerm::Kind::Poly, 1.0, 0.0, 0.0, std::move(coeffs), 0});
        return p;
    }
    /// sum_k c[k-1] psi_k
    static Profile eigenmodes(const VectorX& c, std::shared_ptr<const EigenBasis> basis) {
        if (!basis) throw ConfigError("eigenmode profile needs a basis");
        if (c.size() > basis->k_max())
            throw ConfigError("eigenmode profile uses " + std::to_string(c.size()) +
                              " modes but the basis holds " + std::to_string(basis->k_max()));
        Profile p;
        p.basis_ = std::move(basis);
        for (int k = 1; k <= c.size(); ++k)
            if (c[k - 1] != 0.0) p.terms_.push_back({ProfileTerm::Kind::Eigenmode, c[k - 1], 0, 0, {}, k});
        return p;
    }

    bool empty() const { return terms_.empty(); }
    const std::vector<ProfileTerm>& terms() const { return terms_; }
    const std::shared_ptr<const EigenBasis>& basis() const { return basis_; }

    /// (value, d/ds) at s.
    std::pair<double, double> eval(double s) const {
        double v = 0.0, d = 0.0;
        for (const auto& t : terms_) {
            switch (t.kind) {
                case ProfileTerm::Kind::Sin: {
                    const double w = t.a * kPi;
                    v += t.coef * std::sin(w * s + t.phi);
                    d += t.coef * w * std::cos(w * s + t.phi);
                    break;
                }
                case ProfileTerm::Kind::Cos: {
                    const double w = t.a * kPi;
                    v += t.coef * std::cos(w * s + t.phi);
                    d -= t.coef * w * std::sin(w * s + t.phi);
                    break;
                }
                case ProfileTerm::Kind::Poly: {
                    double pv = 0.0, pd = 0.0;
                    for (Eigen::Index j = t.poly.size() - 1; j >= 0; --j) {
                        pd = pd * s + pv;
                        pv = pv * s + t.poly[j];
                    }
                    v += t.coef * pv;
                    d += t.coef * pd;
                    break;
                }
                case ProfileTerm::Kind::Eigenmode: {
                    const auto [pv, pd] = basis_->eval(t.k, s);
                    v += t.coef * pv;
                    d += t.coef * pd;
                    break;
                }
            }
        }
        return {v, d};
    }
    double value(double s) const { return eval(s).first; }

    Profile scaled(double f) const {
        Profile p = *this;
        for (auto& t : p.terms_) t.coef *= f;
        return p;
    }

    Profile operator+(const Profile& o) const {
        if (basis_ && o.basis_ && basis_ != o.basis_)
            throw ConfigError("cannot add eigenmode profiles over different bases");
        Profile p = *this;
        if (!p.basis_) p.basis_ = o.basis_;
        p.terms_.insert(p.terms_.end(), o.terms_.begin(), o.terms_.end());
        return p;
    }
    Profile operator-() const { return scaled(-1.0); }

    double l2_norm(int n_grid = kDefaultBasisGrid) const {
        return std::sqrt(simpson_unit([&](double s) { return std::pow(value(s), 2); }, n_grid));
    }

    /// Rescaled to unit L2 norm; the zero profile is returned unchanged.
    Profile normalized(int n_grid = kDefaultBasisGrid) const {
        const double n = l2_norm(n_grid);
        return n > 0.0 ? scaled(1.0 / n) : *this;
    }

private:
    std::vector<ProfileTerm> terms_;
    std::shared_ptr<const EigenBasis> basis_;
};

/// Samples of kappa0 and its derivatives on a set of arclength points.
struct ForcingSample {
    VectorX k, ks, kt, kts;
};

struct ForcingMode {
    int m = 1;
    Profile A, B;
};

/// Modal coefficients a_{m,k}, b_{m,k}: row m-1, column k-1.
struct ModalCoeffs {
    MatrixX a, b;
    int m_max() const { return static_cast<int>(a.rows()); }
    int k_max() const { return static_cast<int>(a.cols()); }
    void validate() const {
        if (a.rows() != b.rows() || a.cols() != b.cols())
            throw ConfigError("coefficient arrays a and b differ in shape");
        if (a.size() == 0) throw ConfigError("coefficient arrays are empty");
        if (!a.allFinite() || !b.allFinite()) throw ConfigError("coefficients must be finite");
    }
};

class ForcingSpec {
public:
    ForcingSpec() = default;
    ForcingSpec(double omega, std::vector<ForcingMode> modes) : omega_(omega), modes_(std::move(modes)) {
        if (!(omega_ > 0.0)) throw ConfigError("forcing frequency must be positive");
        for (const auto& md : modes_)
            if (md.m < 1) throw ConfigError("temporal mode index must be at least 1");
    }

    static ForcingSpec zero(double omega = 2 * kPi) { return ForcingSpec(omega, {}); }

    /// kappa0 = F1 cos(omega t) + F2 sin(omega t).
    static ForcingSpec cos_sin(double omega, const Profile& f1, const Profile& f2) {
        return ForcingSpec(omega, {ForcingMode{1, f1, -f2}});
    }

    static ForcingSpec modal(double omega, const ModalCoeffs& c, std::shared_ptr<const EigenBasis> basis) {
        c.validate();
        if (!basis) throw ConfigError("modal forcing needs a basis");
        if (c.k_max() > basis->k_max())
            throw ConfigError("modal forcing uses k up to " + std::to_string(c.k_max()) +
                              " but the basis holds " + std::to_string(basis->k_max()));
        std::vector<ForcingMode> modes;
        for (int m = 1; m <= c.m_max(); ++m)
            modes.push_back({m, Profile::eigenmodes(c.a.row(m - 1).transpose(), basis),
                             Profile::eigenmodes(c.b.row(m - 1).transpose(), basis)});
        ForcingSpec f(omega, std::move(modes));
        f.coeffs_ = c;
        return f;
    }

    double omega() const { return omega_; }
    double period() const { return 2 * kPi / omega_; }
    const std::vector<ForcingMode>& modes() const { return modes_; }
    bool is_zero() const {
        for (const auto& md : modes_)
            if (!md.A.empty() || !md.B.empty()) return false;
        return true;
    }
    /// Present only for forcing built from modal coefficients.
    const std::optional<ModalCoeffs>& coefficients() const { return coeffs_; }

    ForcingSpec scaled(double eps) const {
        ForcingSpec f = *this;
        for (auto& md : f.modes_) {
            md.A = md.A.scaled(eps);
            md.B = md.B.scaled(eps);
        }
        if (f.coeffs_) {
            f.coeffs_->a *= eps;
            f.coeffs_->b *= eps;
        }
        return f;
    }

    /// kappa0, d/ds, d/dt, d2/dtds at one point.
    std::array<double, 4> eval(double s, double t) const {
        std::array<double, 4> r{0, 0, 0, 0};
        for (const auto& md : modes_) {
            const double w = omega_ * md.m;
            const double c = std::cos(w * t), sn = std::sin(w * t);
            const auto [av, ad] = md.A.eval(s);
            const auto [bv, bd] = md.B.eval(s);
            r[0] += av * c - bv * sn;
            r[1] += ad * c - bd * sn;
            r[2] += -w * (av * sn + bv * c);
            r[3] += -w * (ad * sn + bd * c);
        }
        return r;
    }
    double kappa0(double s, double t) const { return eval(s, t)[0]; }

    ForcingSample sample(const VectorX& s, double t) const {
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (!(s[i] >= 0.0 && s[i] <= 1.0)) throw ConfigError("forcing evaluated outside [0,1]");
        ForcingSample out{VectorX(s.size()), VectorX(s.size()), VectorX(s.size()), VectorX(s.size())};
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            const auto r = eval(s[i], t);
            out.k[i] = r[0];
            out.ks[i] = r[1];
            out.kt[i] = r[2];
            out.kts[i] = r[3];
        }
        return out;
    }

private:
    double omega_ = 2 * kPi;
    std::vector<ForcingMode> modes_;
    std::optional<ModalCoeffs> coeffs_;
};

/// Projection of a profile onto the first k_max eigenmodes.
struct Projection {
    VectorX coeffs;
    double tail_mass = 0.0;  // ||F||^2 - sum c_k^2, the L2 mass the truncation drops
};

inline Projection project_profile(const Profile& p, const EigenBasis& basis) {
    const VectorX& g = basis.grid();
    VectorX f(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) f[i] = p.value(g[i]);
    Projection out;
    out.coeffs = basis.project(f);
    out.tail_mass = simpson_unit(VectorX(f.cwiseAbs2())) - out.coeffs.squaredNorm();
    return out;
}

/// Modal coefficients of any forcing, with the largest per-profile tail mass.
inline std::pair<ModalCoeffs, double> project_forcing(const ForcingSpec& f, const EigenBasis& basis) {
    int m_max = 0;
    for (const auto& md : f.modes()) m_max = std::max(m_max, md.m);
    ModalCoeffs c{MatrixX::Zero(std::max(m_max, 1), basis.k_max()),
                  MatrixX::Zero(std::max(m_max, 1), basis.k_max())};
    double tail = 0.0;
    for (const auto& md : f.modes()) {
        const auto pa = project_profile(md.A, basis);
        const auto pb = project_profile(md.B, basis);
        c.a.row(md.m - 1) += pa.coeffs.transpose();
        c.b.row(md.m - 1) += pb.coeffs.transpose();
        tail = std::max({tail, pa.tail_mass, pb.tail_mass});
    }
    return {c, tail};
}

/// Identifiers of the built-in swimmer catalogue.
inline const std::vector<std::string>& case_ids() {
    static const std::vector<std::string> ids = {"case1", "case2", "case3", "case4", "case5",
                                                 "case6", "case7", "case8", "case9"};
    return ids;
}

/// Closed-form profiles (F1, F2) of cases 1-7, each rescaled to unit L2 norm
/// (a zero F1 stays zero).
inline std::pair<Profile, Profile> case_profiles(const std::string& id) {
    const Profile mixed = Profile::cos(2) + Profile::sin(2);
    if (id == "case1") return {Profile::cos(4).normalized(), Profile::cos(2).normalized()};
    if (id == "case2") return {Profile::sin(4).normalized(), Profile::sin(2).normalized()};
    if (id == "case3") return {mixed.normalized(), mixed.normalized()};
    if (id == "case4") return {Profile(), mixed.normalized()};
    if (id == "case5") return {mixed.normalized(), (-mixed).normalized()};
    if (id == "case6") return {Profile::cos(2).normalized(), Profile::sin(2).normalized()};
    if (id == "case7") {
        VectorX sq(3), shifted(3);
        sq << 0.0, 0.0, 1.0;
        shifted << 1.0, -2.0, 1.0;
        return {Profile::poly(sq).normalized(), Profile::poly(shifted).normalized()};
    }
    if (id == "case8" || id == "case9")
        throw ConfigError(id + " is defined by optimizer coefficients; load them from a coefficient file");
    throw ConfigError("unknown case id '" + id + "'");
}

/// Closed-form catalogue case at frequency omega.
inline ForcingSpec make_case(const std::string& id, double omega = 2 * kPi) {
    const auto [f1, f2] = case_profiles(id);
    return ForcingSpec::cos_sin(omega, f1, f2);
}

/// Catalogue case built from optimizer coefficients, each temporal mode's A and B
/// rescaled to unit L2 norm like the closed-form cases.
inline ForcingSpec make_coefficient_case(const ModalCoeffs& c, std::shared_ptr<const EigenBasis> basis,
                                         double omega = 2 * kPi) {
    c.validate();
    ModalCoeffs unit = c;
    for (int m = 0; m < unit.m_max(); ++m) {
        const double na = unit.a.row(m).norm(), nb = unit.b.row(m).norm();
        if (na > 0.0) unit.a.row(m) /= na;
        if (nb > 0.0) unit.b.row(m) /= nb;
    }
    // psi_k are orthonormal, so unit coefficient vectors are unit-norm profiles.
    // The coefficients keep the optimizer's sign convention so the swimmer moves
    // in the direction the optimizer selected.
    return ForcingSpec::modal(omega, unit, std::move(basis));
}

/// kappa0 = sin(2 pi (s - t)) written as A cos(2 pi t) - B sin(2 pi t).
inline ForcingSpec traveling_wave() {
    return ForcingSpec(2 * kPi, {ForcingMode{1, Profile::sin(2), Profile::cos(2)}});
}

}  // namespace rftswim
