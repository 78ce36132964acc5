#pragma once

// Polynomial Weyl symbols on flat phase space with m modes: exact
// coefficients over the variables (x_1..x_m, p_1..p_m) and a rational
// hbar (default 1). The Moyal star product is the finite bidifferential
// series
//
//   f * g = sum_{a,b} (i hbar / 2)^{|a|+|b|} (-1)^{|b|} / (a! b!)
//           (d_x^a d_p^b f) (d_p^a d_x^b g)
//
// which terminates for polynomials. Gaussian expectations of symbols are
// evaluated by Wick/Isserlis pairing over a numeric mean/covariance.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "qrotor/rational.hpp"
#include "qrotor/sphere_poly.hpp"  // Mono + detail term-map helpers

namespace qrotor {

class PhasePoly {
public:
    explicit PhasePoly(int n_modes, Rational hbar = Rational(1))
        : m_(n_modes), hbar_(hbar) {
        if (n_modes < 1) throw std::invalid_argument("PhasePoly: need n_modes >= 1");
    }

    static PhasePoly constant(int m, GaussianRational c, Rational hbar = Rational(1)) {
        PhasePoly f(m, hbar);
        detail::add_term(f.terms_, Mono(2 * m, 0), c);
        return f;
    }
    static PhasePoly position(int m, int i, Rational hbar = Rational(1)) {  // x_i, 1-based
        return unit_variable(m, i - 1, hbar);
    }
    static PhasePoly momentum(int m, int i, Rational hbar = Rational(1)) {  // p_i, 1-based
        return unit_variable(m, m + i - 1, hbar);
    }

    int n_modes() const { return m_; }
    const Rational& hbar() const { return hbar_; }
    const detail::TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const auto& [e, c] : terms_) {
            int t = 0;
            for (int v : e) t += v;
            if (t > d) d = t;
        }
        return d;
    }

    GaussianRational coefficient(const Mono& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? GaussianRational() : it->second;
    }
    GaussianRational constant_term() const { return coefficient(Mono(2 * m_, 0)); }

    friend PhasePoly operator+(const PhasePoly& a, const PhasePoly& b) {
        a.check_same(b);
        PhasePoly out = a;
        for (const auto& [e, c] : b.terms_) detail::add_term(out.terms_, e, c);
        return out;
    }
    friend PhasePoly operator-(const PhasePoly& a, const PhasePoly& b) {
        a.check_same(b);
        PhasePoly out = a;
        for (const auto& [e, c] : b.terms_) detail::add_term(out.terms_, e, -c);
        return out;
    }
    friend PhasePoly operator*(const PhasePoly& a, const PhasePoly& b) {
        a.check_same(b);
        PhasePoly out(a.m_, a.hbar_);
        out.terms_ = detail::raw_mul(a.terms_, b.terms_, 2 * a.m_);
        return out;
    }
    friend PhasePoly operator*(const GaussianRational& c, const PhasePoly& a) {
        PhasePoly out(a.m_, a.hbar_);
        for (const auto& [e, t] : a.terms_) detail::add_term(out.terms_, e, c * t);
        return out;
    }
    PhasePoly operator-() const { return GaussianRational(-1) * *this; }

    friend bool operator==(const PhasePoly& a, const PhasePoly& b) {
        return a.m_ == b.m_ && a.hbar_ == b.hbar_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const PhasePoly& a, const PhasePoly& b) { return !(a == b); }

    PhasePoly diff(int var) const {  // 0-based over (x_1..x_m, p_1..p_m)
        PhasePoly out(m_, hbar_);
        out.terms_ = detail::raw_diff(terms_, var);
        return out;
    }

private:
    static PhasePoly unit_variable(int m, int var, Rational hbar) {
        PhasePoly f(m, hbar);
        if (var < 0 || var >= 2 * m) throw std::out_of_range("PhasePoly: variable index");
        Mono e(2 * m, 0);
        e[var] = 1;
        detail::add_term(f.terms_, e, GaussianRational(1));
        return f;
    }
    void check_same(const PhasePoly& o) const {
        if (m_ != o.m_) throw std::invalid_argument("PhasePoly: mode-count mismatch");
        if (hbar_ != o.hbar_) throw std::invalid_argument("PhasePoly: hbar mismatch");
    }

    int m_;
    Rational hbar_;
    detail::TermMap terms_;  // exponents over (x_1..x_m, p_1..p_m)
};

namespace detail {

// Iterated partial derivative d_vars^multi applied termwise.
inline PhasePoly multi_diff(const PhasePoly& f, const std::vector<int>& multi, int offset) {
    PhasePoly out = f;
    for (std::size_t i = 0; i < multi.size(); ++i)
        for (int r = 0; r < multi[i]; ++r) out = out.diff(offset + int(i));
    return out;
}

inline Rational factorial(int n) {
    Rational r(1);
    for (int i = 2; i <= n; ++i) r *= Rational(i);
    return r;
}

inline void enumerate_multi(int m, std::vector<int>& cur, int pos, int left,
                            const std::function<void(const std::vector<int>&)>& fn) {
    if (pos == m) {
        fn(cur);
        return;
    }
    for (int v = 0; v <= left; ++v) {
        cur[pos] = v;
        enumerate_multi(m, cur, pos + 1, left - v, fn);
    }
    cur[pos] = 0;
}

}  // namespace detail

inline PhasePoly star(const PhasePoly& f, const PhasePoly& g) {
    if (f.n_modes() != g.n_modes())
        throw std::invalid_argument("star: mode-count mismatch");
    if (f.hbar() != g.hbar()) throw std::invalid_argument("star: hbar mismatch");
    int m = f.n_modes();
    int max_order = std::min(f.degree(), g.degree());
    GaussianRational ih2(Rational(0), f.hbar() / Rational(2));  // i*hbar/2

    PhasePoly out(m, f.hbar());
    std::vector<int> a(m, 0);
    detail::enumerate_multi(m, a, 0, max_order, [&](const std::vector<int>& alpha) {
        int na = 0;
        for (int v : alpha) na += v;
        PhasePoly fa = detail::multi_diff(f, alpha, 0);      // d_x^alpha f
        if (fa.is_zero()) return;
        PhasePoly ga = detail::multi_diff(g, alpha, m);      // d_p^alpha g
        if (ga.is_zero()) return;
        std::vector<int> b(m, 0);
        detail::enumerate_multi(m, b, 0, max_order - na, [&](const std::vector<int>& beta) {
            int nb = 0;
            for (int v : beta) nb += v;
            PhasePoly fab = detail::multi_diff(fa, beta, m);  // d_p^beta
            if (fab.is_zero()) return;
            PhasePoly gab = detail::multi_diff(ga, beta, 0);  // d_x^beta
            if (gab.is_zero()) return;
            GaussianRational coef(1);
            for (int r = 0; r < na + nb; ++r) coef *= ih2;
            if (nb % 2 == 1) coef = -coef;
            Rational denom(1);
            for (int i = 0; i < m; ++i)
                denom *= detail::factorial(alpha[i]) * detail::factorial(beta[i]);
            coef *= GaussianRational(Rational(1) / denom);
            out = out + coef * (fab * gab);
        });
    });
    return out;
}

// Poisson bracket {f, g} = sum_i d_x f d_p g - d_p f d_x g  (classical check).
inline PhasePoly poisson_bracket(const PhasePoly& f, const PhasePoly& g) {
    int m = f.n_modes();
    PhasePoly out(m, f.hbar());
    for (int i = 0; i < m; ++i)
        out = out + f.diff(i) * g.diff(m + i) - f.diff(m + i) * g.diff(i);
    return out;
}

// Weyl symbol of the rounded kinetic observable on one site:
// sum_{i<j} star-square of the angular momentum symbol x_i p_j - x_j p_i.
inline PhasePoly kinetic_weyl_symbol(int k, Rational hbar = Rational(1)) {
    if (k < 2) throw std::invalid_argument("kinetic_weyl_symbol: need k >= 2");
    PhasePoly out(k, hbar);
    for (int i = 1; i <= k; ++i)
        for (int j = i + 1; j <= k; ++j) {
            PhasePoly ang = PhasePoly::position(k, i, hbar) * PhasePoly::momentum(k, j, hbar) -
                            PhasePoly::position(k, j, hbar) * PhasePoly::momentum(k, i, hbar);
            out = out + star(ang, ang);
        }
    return out;
}

// --- Gaussian moments -------------------------------------------------------

struct MomentSpec {
    Eigen::VectorXd mean;        // length 2m over (x_1..x_m, p_1..p_m)
    Eigen::MatrixXd covariance;  // symmetric PSD (tolerance 1e-10)

    static constexpr double psd_tol = 1e-10;

    void validate() const {
        if (covariance.rows() != covariance.cols() || mean.size() != covariance.rows())
            throw std::invalid_argument("MomentSpec: dimension mismatch");
        if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw std::invalid_argument("MomentSpec: covariance not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance,
                                                          Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -psd_tol)
            throw std::invalid_argument("MomentSpec: covariance not PSD");
    }
};

namespace detail {

// E[v_0 v_1 ... v_{d-1}] for a Gaussian, by the Stein/Isserlis recursion:
// E[v_0 R] = mean(v_0) E[R] + sum_j cov(v_0, v_j) E[R \ v_j].
inline double gaussian_moment(std::vector<int>& vars, const Eigen::VectorXd& mean,
                              const Eigen::MatrixXd& cov) {
    if (vars.empty()) return 1.0;
    int v0 = vars.back();
    vars.pop_back();
    double acc = mean[v0] * gaussian_moment(vars, mean, cov);
    for (std::size_t j = 0; j < vars.size(); ++j) {
        int vj = vars[j];
        std::vector<int> rest;
        rest.reserve(vars.size() - 1);
        for (std::size_t l = 0; l < vars.size(); ++l)
            if (l != j) rest.push_back(vars[l]);
        acc += cov(v0, vj) * gaussian_moment(rest, mean, cov);
    }
    vars.push_back(v0);
    return acc;
}

}  // namespace detail

inline double wick_expectation(const PhasePoly& f, const MomentSpec& m) {
    if (m.mean.size() != 2 * f.n_modes())
        throw std::invalid_argument("wick_expectation: dimension mismatch");
    m.validate();
    std::complex<double> acc(0.0, 0.0);
    for (const auto& [e, c] : f.terms()) {
        std::vector<int> vars;
        for (std::size_t v = 0; v < e.size(); ++v)
            for (int r = 0; r < e[v]; ++r) vars.push_back(int(v));
        double moment = detail::gaussian_moment(vars, m.mean, m.covariance);
        acc += std::complex<double>(c.re().to_double(), c.im().to_double()) * moment;
    }
    if (std::abs(acc.imag()) > 1e-9 * (1.0 + std::abs(acc.real())))
        throw std::domain_error("wick_expectation: symbol has non-real expectation");
    return acc.real();
}

// Numeric evaluation at a phase-space point (x_1..x_m, p_1..p_m).
inline std::complex<double> eval(const PhasePoly& f, const Eigen::VectorXd& z) {
    if (z.size() != 2 * f.n_modes())
        throw std::invalid_argument("eval: dimension mismatch");
    std::complex<double> acc(0.0, 0.0);
    for (const auto& [e, c] : f.terms()) {
        double mono = 1.0;
        for (std::size_t v = 0; v < e.size(); ++v)
            for (int r = 0; r < e[v]; ++r) mono *= z[Eigen::Index(v)];
        acc += std::complex<double>(c.re().to_double(), c.im().to_double()) * mono;
    }
    return acc;
}

}  // namespace qrotor

