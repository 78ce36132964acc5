#pragma once

// Dense semidefinite programming for the small problems in this library
// (moment matrices up to a few hundred rows).
//
// Problems are posed over Hermitian matrices with the real inner product
// <A, X> = Re tr(A X):   minimize <C, X>  s.t.  <A_i, X> = b_i,  X >= 0.
// Real symmetric problems are the special case of real data.
//
// The solver is an infeasible-start primal-dual interior-point method
// (HKM direction with Mehrotra predictor-corrector); at these sizes each
// iteration is a handful of dense factorizations and the iteration count
// is essentially independent of conditioning. The contract is
// residual-based, not method-based: on success the returned iterate
// satisfies
//     max_i |<A_i, X> - b_i|  <= tol
//     min_eig(X)              >= -tol
//     |primal - dual|         <= gap_tol * (1 + |primal| + |dual|)
// and the run is deterministic given identical inputs.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrotor {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SdpConstraint {
    MatrixXcd a;
    double b = 0.0;
};

struct SdpProblem {
    int dimension = 0;
    MatrixXcd objective;                    // Hermitian
    std::vector<SdpConstraint> constraints;  // Hermitian a_i
    double objective_offset = 0.0;           // added to reported values

    void validate() const {
        if (dimension <= 0) throw std::invalid_argument("SdpProblem: empty");
        auto check_herm = [&](const MatrixXcd& m, const char* what) {
            if (m.rows() != dimension || m.cols() != dimension)
                throw std::invalid_argument(std::string("SdpProblem: bad dimension in ") + what);
            if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
                throw std::invalid_argument(std::string("SdpProblem: non-Hermitian ") + what);
        };
        check_herm(objective, "objective");
        for (const auto& c : constraints) check_herm(c.a, "constraint");
    }
};

enum class SdpStatus { Optimal, NotConverged, Infeasible };

struct SdpResiduals {
    double constraint_inf_norm = 0.0;
    double min_eigenvalue = 0.0;
    double duality_gap = 0.0;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NotConverged;
    MatrixXcd x;      // PSD iterate
    VectorXd y;       // dual vector
    double primal_value = 0.0;  // <C, X> + offset
    double dual_value = 0.0;    // b' y + offset
    SdpResiduals residuals;
    long iterations = 0;
};

struct SolveOptions {
    double tol = 1e-7;
    double gap_tol = 1e-6;
    long max_iter = 200000;
};

inline double herm_inner(const MatrixXcd& a, const MatrixXcd& b) {
    return (a.cwiseProduct(b.conjugate())).sum().real();
}

// [[Re H, -Im H], [Im H, Re H]]: spectrum of H with doubled multiplicities.
inline MatrixXd real_embedding(const MatrixXcd& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("real_embedding: not square");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + h.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("real_embedding: not Hermitian");
    Eigen::Index n = h.rows();
    MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.real();
    out.bottomRightCorner(n, n) = h.real();
    out.topRightCorner(n, n) = -h.imag();
    out.bottomLeftCorner(n, n) = h.imag();
    return out;
}

inline double min_eig(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}
inline double min_eig(const MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// Square factor F with F F^T = M for PSD M, allowing eigenvalues down to
// -shift_tol (clamped to zero). Columns are ordered by decreasing eigenvalue.
inline MatrixXd cholesky_psd(const MatrixXd& m, double shift_tol = 1e-12) {
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return MatrixXd(llt.matrixL());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    if (es.eigenvalues().minCoeff() < -shift_tol)
        throw std::domain_error("cholesky_psd: matrix indefinite beyond tolerance");
    VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    MatrixXd f(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        f.col(j) = es.eigenvectors().col(m.cols() - 1 - j) * lam[m.cols() - 1 - j];
    return f;
}

namespace detail {

// Largest step length t such that P + t*dP stays positive semidefinite,
// computed through the Cholesky factor of P (P must be positive definite).
inline double max_psd_step(const MatrixXcd& p, const MatrixXcd& dp) {
    Eigen::LLT<MatrixXcd> llt(p);
    if (llt.info() != Eigen::Success) return 0.0;
    MatrixXcd l = llt.matrixL();
    MatrixXcd w = l.triangularView<Eigen::Lower>().solve(dp);
    w = l.triangularView<Eigen::Lower>().solve(w.adjoint()).adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es((w + w.adjoint()) / 2.0,
                                                Eigen::EigenvaluesOnly);
    double lam = es.eigenvalues().minCoeff();
    return lam >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lam;
}

}  // namespace detail

inline SdpSolution solve(const SdpProblem& p, const SolveOptions& opt = {}) {
    p.validate();
    const int n = p.dimension;
    const int m = int(p.constraints.size());

    VectorXd b(m);
    for (int i = 0; i < m; ++i) b[i] = p.constraints[i].b;

    auto apply_a = [&](const MatrixXcd& x) {
        VectorXd out(m);
        for (int i = 0; i < m; ++i) out[i] = herm_inner(p.constraints[i].a, x);
        return out;
    };
    auto apply_at = [&](const VectorXd& y) {
        MatrixXcd out = MatrixXcd::Zero(n, n);
        for (int i = 0; i < m; ++i) out += y[i] * p.constraints[i].a;
        return out;
    };

    const double c_scale = 1.0 + p.objective.cwiseAbs().maxCoeff();
    const double b_scale = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);

    MatrixXcd x = MatrixXcd::Identity(n, n) * std::max(1.0, b_scale);
    MatrixXcd s = MatrixXcd::Identity(n, n) * std::max(1.0, c_scale);
    VectorXd y = VectorXd::Zero(m);

    SdpSolution sol;
    const long max_iter = std::min<long>(opt.max_iter, 200);
    MatrixXcd best_x = x, best_s = s;
    VectorXd best_y = y;
    double best_score = std::numeric_limits<double>::infinity();
    double min_pinf = std::numeric_limits<double>::infinity();
    long it = 0;
    for (it = 1; it <= max_iter; ++it) {
        VectorXd rp = b - apply_a(x);
        MatrixXcd rd = p.objective - apply_at(y) - s;
        double mu = herm_inner(x, s) / n;
        double pinf = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;
        double dinf = rd.cwiseAbs().maxCoeff() / c_scale;
        double pobj = herm_inner(p.objective, x);
        double dobj = b.dot(y);
        double gap = std::abs(pobj - dobj);
        double rel_gap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
        min_pinf = std::min(min_pinf, pinf);
        double score = std::max({pinf / b_scale, dinf, rel_gap});
        if (score < best_score) {
            best_score = score;
            best_x = x;
            best_y = y;
            best_s = s;
        }
        if (pinf <= opt.tol && dinf <= opt.tol &&
            gap <= opt.gap_tol * (1.0 + std::abs(pobj) + std::abs(dobj))) {
            sol.status = SdpStatus::Optimal;
            break;
        }
        if (m > 0 && y.cwiseAbs().maxCoeff() > 1e12 && min_pinf > 1e3 * opt.tol) {
            sol.status = SdpStatus::Infeasible;  // diverging multipliers, never near-feasible
            break;
        }
        // numerical stagnation or divergence: fall back to the best iterate
        if (score > 1e4 * best_score + 1e3 || mu < 1e-16 * c_scale) {
            x = best_x;
            y = best_y;
            s = best_s;
            break;
        }

        Eigen::LLT<MatrixXcd> s_chol(s);
        if (s_chol.info() != Eigen::Success) {  // numerical breakdown
            x = best_x;
            y = best_y;
            s = best_s;
            break;
        }
        auto s_solve = [&](const MatrixXcd& r) { return s_chol.solve(r); };

        // Schur complement M_ij = Re tr(A_i X A_j S^{-1}), symmetrized.
        std::vector<MatrixXcd> w(m);
        for (int j = 0; j < m; ++j) w[j] = x * s_solve(p.constraints[j].a).adjoint();
        MatrixXd schur(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) schur(i, j) = herm_inner(p.constraints[i].a, w[j]);
        schur = ((schur + schur.transpose()) / 2.0).eval();
        Eigen::CompleteOrthogonalDecomposition<MatrixXd> schur_solver(schur);

        // direction for a given complementarity target r3 ~ dX S + X dS = r3
        auto direction = [&](const MatrixXcd& r3, MatrixXcd& dx, VectorXd& dy, MatrixXcd& ds) {
            MatrixXcd base = r3 * s_chol.solve(MatrixXcd::Identity(n, n)) -
                             x * s_solve(rd.adjoint()).adjoint();
            if (m > 0) {
                VectorXd rhs = rp - apply_a(base);
                dy = schur_solver.solve(rhs);
            } else {
                dy = VectorXd();
            }
            ds = rd - apply_at(dy);
            dx = base + x * s_solve(apply_at(dy).adjoint()).adjoint();
            dx = ((dx + dx.adjoint()) / 2.0).eval();
        };

        // predictor
        MatrixXcd dx_a, ds_a;
        VectorXd dy_a;
        direction(-x * s, dx_a, dy_a, ds_a);
        double ap = std::min(1.0, 0.98 * detail::max_psd_step(x, dx_a));
        double ad = std::min(1.0, 0.98 * detail::max_psd_step(s, ds_a));
        double mu_aff = herm_inner(x + ap * dx_a, s + ad * ds_a) / n;
        double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 1e-8, 1.0);

        // corrector
        MatrixXcd r3 = sigma * mu * MatrixXcd::Identity(n, n) - x * s - dx_a * ds_a;
        MatrixXcd dx, ds;
        VectorXd dy;
        direction(r3, dx, dy, ds);
        ap = std::min(1.0, 0.98 * detail::max_psd_step(x, dx));
        ad = std::min(1.0, 0.98 * detail::max_psd_step(s, ds));
        if (ap < 1e-10 && ad < 1e-10) {  // no usable step remains
            x = best_x;
            y = best_y;
            s = best_s;
            break;
        }
        x += ap * dx;
        if (m > 0) y += ad * dy;
        s += ad * ds;
    }

    sol.iterations = std::min(it, max_iter);
    sol.x = x;
    sol.y = y;
    VectorXd ax = apply_a(x);
    sol.residuals.constraint_inf_norm = m > 0 ? (ax - b).cwiseAbs().maxCoeff() : 0.0;
    sol.residuals.min_eigenvalue = min_eig(x);
    sol.primal_value = herm_inner(p.objective, x) + p.objective_offset;
    sol.dual_value = b.dot(y) + p.objective_offset;
    sol.residuals.duality_gap = std::abs(sol.primal_value - sol.dual_value);
    return sol;
}

// --- structured text serialization ------------------------------------------
//
// Matrices are dumped row-major, one row per line, each complex entry as a
// "re im" pair printed with 17 significant digits.

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_matrix(std::ostream& os, const MatrixXcd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << fmt17(m(r, c).real()) << ' ' << fmt17(m(r, c).imag());
        }
        os << '\n';
    }
}

inline MatrixXcd read_matrix(std::istream& is, int n) {
    MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double re, im;
            if (!(is >> re >> im))
                throw std::runtime_error("sdp text: truncated matrix dump");
            m(r, c) = {re, im};
        }
    return m;
}

}  // namespace detail

inline void write_problem(std::ostream& os, const SdpProblem& p) {
    os << "sdp-problem v1\n";
    os << "dimension " << p.dimension << '\n';
    os << "offset " << detail::fmt17(p.objective_offset) << '\n';
    os << "objective\n";
    detail::write_matrix(os, p.objective);
    os << "constraints " << p.constraints.size() << '\n';
    for (const auto& c : p.constraints) {
        os << "b " << detail::fmt17(c.b) << '\n';
        detail::write_matrix(os, c.a);
    }
}

inline SdpProblem read_problem(std::istream& is) {
    std::string tag, version;
    is >> tag >> version;
    if (tag != "sdp-problem" || version != "v1")
        throw std::runtime_error("sdp text: bad header");
    SdpProblem p;
    std::string key;
    is >> key >> p.dimension;
    if (key != "dimension") throw std::runtime_error("sdp text: expected dimension");
    is >> key >> p.objective_offset;
    if (key != "offset") throw std::runtime_error("sdp text: expected offset");
    is >> key;
    if (key != "objective") throw std::runtime_error("sdp text: expected objective");
    p.objective = detail::read_matrix(is, p.dimension);
    std::size_t n_constraints = 0;
    is >> key >> n_constraints;
    if (key != "constraints") throw std::runtime_error("sdp text: expected constraints");
    for (std::size_t i = 0; i < n_constraints; ++i) {
        SdpConstraint c;
        is >> key >> c.b;
        if (key != "b") throw std::runtime_error("sdp text: expected b");
        c.a = detail::read_matrix(is, p.dimension);
        p.constraints.push_back(std::move(c));
    }
    return p;
}

inline void write_solution(std::ostream& os, const SdpSolution& s) {
    os << "sdp-solution v1\n";
    os << "status "
       << (s.status == SdpStatus::Optimal
               ? "optimal"
               : s.status == SdpStatus::Infeasible ? "infeasible" : "not-converged")
       << '\n';
    os << "primal " << detail::fmt17(s.primal_value) << '\n';
    os << "dual " << detail::fmt17(s.dual_value) << '\n';
    os << "constraint_inf_norm " << detail::fmt17(s.residuals.constraint_inf_norm) << '\n';
    os << "min_eigenvalue " << detail::fmt17(s.residuals.min_eigenvalue) << '\n';
    os << "duality_gap " << detail::fmt17(s.residuals.duality_gap) << '\n';
    os << "iterations " << s.iterations << '\n';
    os << "X " << s.x.rows() << '\n';
    detail::write_matrix(os, s.x);
    os << "y " << s.y.size() << '\n';
    for (Eigen::Index i = 0; i < s.y.size(); ++i)
        os << detail::fmt17(s.y[i]) << '\n';
}

// Convenience constraint builders (Hermitian "atoms").

inline MatrixXcd re_atom(int n, int a, int b) {
    MatrixXcd m = MatrixXcd::Zero(n, n);
    if (a == b) {
        m(a, a) = 1.0;
    } else {
        m(a, b) = 0.5;
        m(b, a) = 0.5;
    }
    return m;  // <m, X> = Re X(a, b)
}

inline MatrixXcd im_atom(int n, int a, int b) {
    if (a == b) throw std::invalid_argument("im_atom: diagonal is real");
    MatrixXcd m = MatrixXcd::Zero(n, n);
    m(a, b) = std::complex<double>(0.0, 0.5);
    m(b, a) = std::complex<double>(0.0, -0.5);
    return m;  // <m, X> = Im X(a, b)
}

}  // namespace qrotor
