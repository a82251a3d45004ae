#pragma once

// Constrained minimization of the time-averaged speed over modal forcing
// coefficients. The work-only problem is a generalized symmetric eigenproblem;
// the problems with sphere constraints on a and b use an augmented Lagrangian
// with BFGS inner iterations.

#include "rftswim/analytics.hpp"
#include "rftswim/eigenbasis.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace rftswim {

enum class ConstraintSet {
    Work,         // W = work_target
    WorkBending,  // W = work_target, sum a^2 = 1, sum b^2 = 1
    Bending       // sum a^2 = 1, sum b^2 = 1
};

inline std::string to_string(ConstraintSet c) {
    switch (c) {
        case ConstraintSet::Work: return "work";
        case ConstraintSet::WorkBending: return "work-bending";
        case ConstraintSet::Bending: return "bending";
    }
    return "?";
}

inline ConstraintSet parse_constraint_set(const std::string& s) {
    if (s == "work") return ConstraintSet::Work;
    if (s == "work-bending") return ConstraintSet::WorkBending;
    if (s == "bending") return ConstraintSet::Bending;
    throw ConfigError("unknown optimization problem '" + s + "' (expected work, work-bending or bending)");
}

struct OptProblem {
    int m_max = 1;
    int k_max = 12;
    double omega = 2 * kPi;
    double gamma = 1.0;
    ConstraintSet constraints = ConstraintSet::Work;
    double work_target = 1.0;
    int restarts = 20;
    std::uint64_t seed = 1;
    double constraint_tol = 1e-9;

    void validate() const {
        if (m_max < 1) throw ConfigError("m_max must be at least 1");
        if (k_max < 2) throw ConfigError("k_max must be at least 2: a single spatial mode cannot swim");
        if (k_max > kMaxStableModes) throw ConfigError("k_max exceeds the stable eigenmode limit");
        if (!(omega > 0.0)) throw ConfigError("omega must be positive");
        if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
        if (!(work_target > 0.0)) throw ConfigError("work target must be positive");
        if (restarts < 1 && constraints != ConstraintSet::Work) throw ConfigError("restarts must be at least 1");
    }
};

struct RestartRecord {
    int index = 0;
    double speed = 0.0;
    double max_constraint_violation = 0.0;
    int outer_iterations = 0;
    bool converged = false;
};

struct OptResult {
    ModalCoeffs coeffs;
    double speed = 0.0;   // avg_speed of coeffs
    double work = 0.0;    // avg_work of coeffs
    std::vector<double> constraint_residuals;
    int best_restart = -1;
    std::uint64_t seed = 0;
    // Work-only: the minimal eigenvalue always comes as a pair (time shifts of
    // one stroke); degenerate flags a further repeat.
    bool degenerate = false;
    int distinct_optima = 1;  // best-valued restarts not related by a time shift
    std::vector<RestartRecord> restarts;
};

namespace detail {

struct ConstraintEval {
    VectorX c;
    MatrixX grad;  // column i = gradient of c_i
};

class ConstraintModel {
public:
    ConstraintModel(const QuadraticForms& q, const OptProblem& p) : q_(q), p_(p) {
        const int n = 2 * q.m_max * q.k_max;
        amask_ = VectorX::Zero(n);
        bmask_ = VectorX::Zero(n);
        for (int m = 1; m <= q.m_max; ++m)
            for (int k = 1; k <= q.k_max; ++k) {
                amask_[q.a_index(m, k)] = 1.0;
                bmask_[q.b_index(m, k)] = 1.0;
            }
    }

    int count() const { return p_.constraints == ConstraintSet::WorkBending ? 3 : p_.constraints == ConstraintSet::Bending ? 2 : 1; }

    ConstraintEval eval(const VectorX& z) const {
        ConstraintEval e{VectorX(count()), MatrixX(z.size(), count())};
        int i = 0;
        if (p_.constraints != ConstraintSet::Bending) {
            e.c[i] = q_.work(z) - p_.work_target;
            e.grad.col(i++) = 2 * q_.W.cwiseProduct(z);
        }
        if (p_.constraints != ConstraintSet::Work) {
            e.c[i] = z.cwiseProduct(amask_).squaredNorm() - 1.0;
            e.grad.col(i++) = 2 * z.cwiseProduct(amask_);
            e.c[i] = z.cwiseProduct(bmask_).squaredNorm() - 1.0;
            e.grad.col(i++) = 2 * z.cwiseProduct(bmask_);
        }
        return e;
    }

    const VectorX& amask() const { return amask_; }
    const VectorX& bmask() const { return bmask_; }

private:
    const QuadraticForms& q_;
    const OptProblem& p_;
    VectorX amask_, bmask_;
};

// Newton on the KKT system 2Uz = G mu, c(z) = 0, starting from an AL iterate.
// Returns false (leaving z untouched) if the iteration does not tighten the residual.
inline bool polish_kkt(const QuadraticForms& q, const ConstraintModel& cons, const std::vector<VectorX>& hess_diag,
                       VectorX& z, VectorX& mu) {
    const Eigen::Index n = z.size(), nc = cons.count();
    auto residual = [&](const VectorX& zz, const VectorX& mm, ConstraintEval& e) {
        e = cons.eval(zz);
        VectorX r(n + nc);
        r.head(n) = 2 * (q.U * zz) - e.grad * mm;
        r.tail(nc) = e.c;
        return r;
    };
    VectorX zz = z, mm = mu;
    ConstraintEval e;
    VectorX r = residual(zz, mm, e);
    const double r0 = r.cwiseAbs().maxCoeff();
    for (int it = 0; it < 20 && r.cwiseAbs().maxCoeff() > 1e-14; ++it) {
        MatrixX K = MatrixX::Zero(n + nc, n + nc);
        K.topLeftCorner(n, n) = 2 * q.U;
        for (Eigen::Index i = 0; i < nc; ++i) K.topLeftCorner(n, n).diagonal() -= mm[i] * hess_diag[i];
        K.topRightCorner(n, nc) = -e.grad;
        K.bottomLeftCorner(nc, n) = e.grad.transpose();
        const VectorX d = K.fullPivLu().solve(-r);
        zz += d.head(n);
        mm += d.tail(nc);
        r = residual(zz, mm, e);
    }
    if (!(r.cwiseAbs().maxCoeff() <= r0)) return false;
    z = zz;
    mu = mm;
    return true;
}

struct AlState {
    const QuadraticForms* q;
    const ConstraintModel* cons;
    VectorX mu;
    double rho;
};

inline double al_value(const AlState& s, const VectorX& z, VectorX* g) {
    const auto e = s.cons->eval(z);
    const double val = s.q->speed(z) - s.mu.dot(e.c) + 0.5 * s.rho * e.c.squaredNorm();
    if (g) *g = 2 * (s.q->U * z) + e.grad * (s.rho * e.c - s.mu);
    return val;
}

inline double gsl_f(const gsl_vector* x, void* p) {
    Eigen::Map<const VectorX> z(x->data, static_cast<Eigen::Index>(x->size));
    return al_value(*static_cast<AlState*>(p), z, nullptr);
}
inline void gsl_df(const gsl_vector* x, void* p, gsl_vector* g) {
    Eigen::Map<const VectorX> z(x->data, static_cast<Eigen::Index>(x->size));
    VectorX grad;
    al_value(*static_cast<AlState*>(p), z, &grad);
    for (std::size_t i = 0; i < g->size; ++i) gsl_vector_set(g, i, grad[static_cast<Eigen::Index>(i)]);
}
inline void gsl_fdf(const gsl_vector* x, void* p, double* f, gsl_vector* g) {
    *f = gsl_f(x, p);
    gsl_df(x, p, g);
}

// BFGS minimization of the augmented Lagrangian from z (in place).
inline void minimize_al(AlState& st, VectorX& z, int max_iter = 2000) {
    const std::size_t n = static_cast<std::size_t>(z.size());
    gsl_multimin_function_fdf fn{&gsl_f, &gsl_df, &gsl_fdf, n, &st};
    gsl_vector* x = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x, i, z[static_cast<Eigen::Index>(i)]);
    gsl_multimin_fdfminimizer* m = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n);
    gsl_multimin_fdfminimizer_set(m, &fn, x, 1e-2, 0.1);
    for (int it = 0; it < max_iter; ++it) {
        if (gsl_multimin_fdfminimizer_iterate(m) != GSL_SUCCESS) break;
        if (gsl_multimin_test_gradient(m->gradient, 1e-12) == GSL_SUCCESS) break;
    }
    for (std::size_t i = 0; i < n; ++i) z[static_cast<Eigen::Index>(i)] = gsl_vector_get(m->x, i);
    gsl_multimin_fdfminimizer_free(m);
    gsl_vector_free(x);
}

// Shifting time by phi/omega maps (a_m + i b_m) to e^{i m phi} (a_m + i b_m).
inline VectorX time_shift(const QuadraticForms& q, const VectorX& z, double phi) {
    VectorX out(z.size());
    for (int m = 1; m <= q.m_max; ++m) {
        const double c = std::cos(m * phi), s = std::sin(m * phi);
        for (int k = 1; k <= q.k_max; ++k) {
            const double a = z[q.a_index(m, k)], b = z[q.b_index(m, k)];
            out[q.a_index(m, k)] = c * a - s * b;
            out[q.b_index(m, k)] = s * a + c * b;
        }
    }
    return out;
}

// min over phi of |z1 - shift(z2, phi)|: grid search then golden-section refinement.
inline double phase_distance(const QuadraticForms& q, const VectorX& z1, const VectorX& z2) {
    auto dist = [&](double phi) { return (z1 - time_shift(q, z2, phi)).norm(); };
    const int grid = 720;
    int best = 0;
    double dbest = dist(0.0);
    for (int i = 1; i < grid; ++i) {
        const double d = dist(2 * kPi * i / grid);
        if (d < dbest) {
            dbest = d;
            best = i;
        }
    }
    double lo = 2 * kPi * (best - 1) / grid, hi = 2 * kPi * (best + 1) / grid;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
        const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        if (dist(x1) < dist(x2)) hi = x2;
        else lo = x1;
    }
    return std::min(dbest, dist(0.5 * (lo + hi)));
}

struct GslQuiet {
    gsl_error_handler_t* old;
    GslQuiet() : old(gsl_set_error_handler_off()) {}
    ~GslQuiet() { gsl_set_error_handler(old); }
};

}  // namespace detail

/// Fraction of the work form carried by each temporal mode m (index m-1).
inline VectorX work_fraction_by_mode(const ModalCoeffs& co, double omega, const EigenBasis& basis) {
    VectorX frac(co.m_max());
    const double total = avg_work(co, omega, basis);
    for (int m = 1; m <= co.m_max(); ++m) {
        ModalCoeffs one{MatrixX::Zero(co.m_max(), co.k_max()), MatrixX::Zero(co.m_max(), co.k_max())};
        one.a.row(m - 1) = co.a.row(m - 1);
        one.b.row(m - 1) = co.b.row(m - 1);
        frac[m - 1] = total > 0.0 ? avg_work(one, omega, basis) / total : 0.0;
    }
    return frac;
}

/// Minimum speed subject to W = work_target: the smallest eigenvalue of the
/// speed form in coordinates whitened by the work form.
inline OptResult solve_work_constrained(const OptProblem& p, const EigenBasis& basis) {
    p.validate();
    if (p.constraints != ConstraintSet::Work) throw ConfigError("solve_work_constrained needs the work constraint set");
    const auto q = quadratic_forms(p.m_max, p.k_max, p.omega, p.gamma, basis);
    const VectorX dinv = q.W.cwiseSqrt().cwiseInverse();
    const MatrixX H = dinv.asDiagonal() * q.U * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixX> es(0.5 * (H + H.transpose()));
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of the speed form failed");
    const VectorX y = es.eigenvectors().col(0);
    VectorX z = dinv.cwiseProduct(y);
    z *= std::sqrt(p.work_target / q.work(z));
    // Fix the overall sign so results are reproducible.
    Eigen::Index imax;
    z.cwiseAbs().maxCoeff(&imax);
    if (z[imax] < 0) z = -z;

    OptResult r;
    r.coeffs = q.unstack(z);
    r.speed = avg_speed(r.coeffs, p.omega, p.gamma, basis);
    r.work = avg_work(r.coeffs, p.omega, basis);
    r.constraint_residuals = {r.work - p.work_target};
    r.seed = p.seed;
    r.best_restart = 0;
    const VectorX& ev = es.eigenvalues();
    r.degenerate = ev.size() > 2 && std::abs(ev[2] - ev[0]) <= 1e-10 * std::max(1.0, std::abs(ev[0]));
    r.distinct_optima = r.degenerate ? 2 : 1;
    return r;
}

/// Range of W over the product of the a- and b-spheres: [2 min w, 2 max w] per
/// temporal mode block, used to report infeasible work targets.
inline std::pair<double, double> work_range_on_spheres(const OptProblem& p, const EigenBasis& basis) {
    const auto q = quadratic_forms(p.m_max, p.k_max, p.omega, p.gamma, basis);
    return {2 * q.W.minCoeff(), 2 * q.W.maxCoeff()};
}

/// Minimum speed under the sphere constraints (with or without the work
/// constraint): augmented Lagrangian, penalty x10 per stalled outer iteration,
/// multi-start from random points on the spheres.
inline OptResult solve_sphere_constrained(const OptProblem& p, const EigenBasis& basis) {
    p.validate();
    if (p.constraints == ConstraintSet::Work) throw ConfigError("use solve_work_constrained for the work-only problem");
    detail::GslQuiet quiet;
    const auto q = quadratic_forms(p.m_max, p.k_max, p.omega, p.gamma, basis);
    const detail::ConstraintModel cons(q, p);
    const int n = 2 * p.m_max * p.k_max;
    std::vector<VectorX> hess;
    if (p.constraints == ConstraintSet::WorkBending) hess.push_back(2 * q.W);
    hess.push_back(2 * cons.amask());
    hess.push_back(2 * cons.bmask());
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    OptResult best;
    best.seed = p.seed;
    std::vector<VectorX> solutions;
    double best_speed = std::numeric_limits<double>::infinity();
    for (int r = 0; r < p.restarts; ++r) {
        VectorX z(n);
        for (int i = 0; i < n; ++i) z[i] = normal(rng);
        const VectorX za = z.cwiseProduct(cons.amask()), zb = z.cwiseProduct(cons.bmask());
        z = za / za.norm() + zb / zb.norm();

        detail::AlState st{&q, &cons, VectorX::Zero(cons.count()), 10.0};
        RestartRecord rec;
        rec.index = r;
        double viol = cons.eval(z).c.cwiseAbs().maxCoeff();
        for (int outer = 1; outer <= 40; ++outer) {
            detail::minimize_al(st, z);
            const auto e = cons.eval(z);
            const double v = e.c.cwiseAbs().maxCoeff();
            st.mu -= st.rho * e.c;
            rec.outer_iterations = outer;
            if (v < p.constraint_tol) {
                rec.converged = true;
                viol = v;
                break;
            }
            if (v > 0.25 * viol) st.rho = std::min(st.rho * 10.0, 1e12);
            viol = v;
        }
        if (rec.converged) {
            detail::polish_kkt(q, cons, hess, z, st.mu);
            viol = cons.eval(z).c.cwiseAbs().maxCoeff();
        }
        rec.max_constraint_violation = viol;
        rec.speed = q.speed(z);
        best.restarts.push_back(rec);
        if (!rec.converged) continue;
        solutions.push_back(z);
        if (rec.speed < best_speed) {
            best_speed = rec.speed;
            best.best_restart = r;
        }
    }
    if (best.best_restart < 0) {
        std::ostringstream msg;
        msg << "no restart satisfied the " << to_string(p.constraints) << " constraints to "
            << p.constraint_tol << ";";
        if (p.constraints == ConstraintSet::WorkBending) {
            const auto [lo, hi] = work_range_on_spheres(p, basis);
            msg << " W on the unit spheres lies in [" << lo << ", " << hi << "], target " << p.work_target << ";";
        }
        for (const auto& rec : best.restarts)
            msg << " restart " << rec.index << ": speed " << rec.speed << ", violation " << rec.max_constraint_violation
                << ";";
        throw NumericalError(msg.str());
    }
    VectorX zbest;
    for (std::size_t i = 0, j = 0; i < best.restarts.size(); ++i)
        if (best.restarts[i].converged) {
            if (static_cast<int>(i) == best.best_restart) zbest = solutions[j];
            ++j;
        }
    // Distinct optima: best-valued solutions not related by a time shift.
    std::vector<VectorX> reps;
    for (const auto& z : solutions) {
        if (q.speed(z) > best_speed + 1e-7 * std::max(1.0, std::abs(best_speed))) continue;
        bool seen = false;
        for (const auto& rz : reps)
            if (detail::phase_distance(q, z, rz) < 1e-4) seen = true;
        if (!seen) reps.push_back(z);
    }
    best.distinct_optima = static_cast<int>(reps.size());
    best.coeffs = q.unstack(zbest);
    best.speed = avg_speed(best.coeffs, p.omega, p.gamma, basis);
    best.work = avg_work(best.coeffs, p.omega, basis);
    const VectorX cres = cons.eval(zbest).c;
    best.constraint_residuals.assign(cres.data(), cres.data() + cres.size());
    return best;
}

/// Work target plus unit spheres on a and b.
inline OptResult solve_work_bending_constrained(OptProblem p, const EigenBasis& basis) {
    p.constraints = ConstraintSet::WorkBending;
    return solve_sphere_constrained(p, basis);
}

inline OptResult optimize(const OptProblem& p, const EigenBasis& basis) {
    return p.constraints == ConstraintSet::Work ? solve_work_constrained(p, basis) : solve_sphere_constrained(p, basis);
}

}  // namespace rftswim
