#pragma once

// Product-state bounds for the single-edge rotor Hamiltonian and the
// sum-of-squares uncertainty certificates behind them.
//
// The product-state side rests on the spherical uncertainty principle
//   <Delta> >= ((k-1)/2)^2 |mu|^2 / (1 - |mu|^2),   mu = spherical mean,
// which is rigorous with no constant: prod_lower is a true lower bound
// on the optimal product-state energy of a(Delta_1 + Delta_2) +
// b(c_pot + x_1 . x_2). The comparison curve entangled_curve carries the
// saturation constant C explicitly (the literature guarantees saturating
// states only up to an unspecified universal constant), so the
// product-state ratio is reported as a function of C rather than a
// single number.
//
// Certificates package the moment-matrix proofs: a 3x3 Bloch-sphere
// matrix, the Heisenberg Schur complement, and the partial-trace block
// of the spherical proof in the self-adjoint rotation generators
// w_1i = -i v_1i (for which Im <x_i w_1i> = t/2 on genuine states).

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qrotor/sdp.hpp"

namespace qrotor {

inline double erb_rhs(double mu_norm, int k) {
    if (mu_norm < 0.0 || mu_norm >= 1.0)
        throw std::domain_error("erb_rhs: need 0 <= |mu| < 1");
    double half = 0.5 * (k - 1.0);
    return half * half * mu_norm * mu_norm / (1.0 - mu_norm * mu_norm);
}

namespace detail {

inline constexpr double unit_interval_cap = 1.0 - 1e-9;  // infima over [0, 1)

// golden-section minimization of a unimodal 1-D function
template <typename F>
double golden_min(F&& f, double lo, double hi, int iters = 80) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace detail

struct ScalarOptimum {
    double value = 0.0;
    double s = 0.0;
    double t = 0.0;
};

// inf over (s,t) in [0,1)^2 of
//   a ((k-1)/2)^2 (t^2/(1-t^2) + s^2/(1-s^2)) + b (c_pot - s t):
// lower bound on the optimal two-site product-state energy.
inline ScalarOptimum prod_lower(int k, double a, double b, double c_pot = 2.0,
                                int grid = 256) {
    if (a < 0 || b < 0) throw std::invalid_argument("prod_lower: a, b >= 0");
    double hk = 0.25 * (k - 1.0) * (k - 1.0);
    auto f = [&](double s, double t) {
        return a * hk * (t * t / (1.0 - t * t) + s * s / (1.0 - s * s)) +
               b * (c_pot - s * t);
    };
    double cap = detail::unit_interval_cap;
    ScalarOptimum best{f(0.0, 0.0), 0.0, 0.0};
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            double s = cap * i / (grid - 1), t = cap * j / (grid - 1);
            double v = f(s, t);
            if (v < best.value) best = {v, s, t};
        }
    for (int round = 0; round < 12; ++round) {  // coordinate descent
        double s = detail::golden_min([&](double u) { return f(u, best.t); }, 0.0, cap);
        double t = detail::golden_min([&](double u) { return f(best.s, u); }, 0.0, cap);
        best = {f(s, t), s, t};
    }
    return best;
}

// inf over t in [0,1) of 2 a C ((k-1)/2)^2 t^2/(1-t^2) + b (c_pot - t):
// energy curve of the radial entangled family, assuming saturation of the
// uncertainty principle up to the constant C.
inline ScalarOptimum entangled_curve(int k, double a, double b, double c_sat,
                                     double c_pot = 2.0, int grid = 4096) {
    if (a < 0 || b < 0) throw std::invalid_argument("entangled_curve: a, b >= 0");
    double hk = 0.25 * (k - 1.0) * (k - 1.0);
    auto f = [&](double t) {
        return 2.0 * a * c_sat * hk * t * t / (1.0 - t * t) + b * (c_pot - t);
    };
    double cap = detail::unit_interval_cap;
    ScalarOptimum best{f(0.0), 0.0, 0.0};
    for (int i = 0; i < grid; ++i) {
        double t = cap * i / (grid - 1);
        double v = f(t);
        if (v < best.value) best = {v, 0.0, t};
    }
    double t = detail::golden_min(f, std::max(0.0, best.t - 2.0 * cap / grid),
                                  std::min(cap, best.t + 2.0 * cap / grid));
    if (f(t) < best.value) best = {f(t), 0.0, t};
    return best;
}

struct ProdRatio {
    double ratio = 1.0;
    double a_at_max = 1.0;  // kinetic weight (after the ((k-1)/2)^2 rescaling)
};

// sup over a (b = 1) of prod_lower / entangled_curve. The scan runs over
// the rescaled weight a ((k-1)/2)^2, so the result is k-independent.
inline ProdRatio prod_ratio(int k, double c_sat, double c_pot = 2.0) {
    double hk = 0.25 * (k - 1.0) * (k - 1.0);
    auto ratio_at = [&](double a_scaled) {
        double a = a_scaled / hk;
        double denom = entangled_curve(k, a, 1.0, c_sat, c_pot).value;
        return prod_lower(k, a, 1.0, c_pot).value / denom;
    };
    ProdRatio best;
    double best_log = 0.0;
    for (int i = 0; i <= 160; ++i) {
        double lg = -4.0 + 8.0 * i / 160.0;
        double r = ratio_at(std::pow(10.0, lg));
        if (r > best.ratio) {
            best.ratio = r;
            best_log = lg;
        }
    }
    double lg = detail::golden_min([&](double l) { return -ratio_at(std::pow(10.0, l)); },
                                   best_log - 0.1, best_log + 0.1);
    double r = ratio_at(std::pow(10.0, lg));
    if (r > best.ratio) {
        best.ratio = r;
        best_log = lg;
    }
    best.a_at_max = std::pow(10.0, best_log);
    return best;
}

struct QmcProductOptimum {
    double value = 0.0;
    double dot = 0.0;  // u . v at the optimum
};

// Optimal product state of the quantum max-cut edge Hamiltonian
// (1 - X(x)X - Y(x)Y - Z(x)Z)/4: maximize (1 - u.v)/4 over Bloch
// vectors |u|, |v| <= 1 by alternating exact single-site updates.
inline QmcProductOptimum qmc_product_edge() {
    QmcProductOptimum best;
    for (int start = 0; start < 4; ++start) {
        Eigen::Vector3d u(std::cos(1.0 + start), std::sin(0.5 * start), 0.3);
        Eigen::Vector3d v(0.1 * start - 0.2, 0.4, -std::cos(0.7 * start));
        u *= 0.5 / u.norm();
        v *= 0.8 / v.norm();
        for (int sweep = 0; sweep < 16; ++sweep) {
            if (v.norm() > 0) u = -v / v.norm();  // maximizes -u.v over the ball
            if (u.norm() > 0) v = -u / u.norm();
        }
        double value = 0.25 * (1.0 - u.dot(v));
        if (value > best.value) best = {value, u.dot(v)};
    }
    return best;
}

// --- certificates -------------------------------------------------------------

enum class CertificateKind { bloch, heisenberg, spherical };

struct CertificateBlock {
    std::string label;
    MatrixXcd block;
    double determinant = 0.0;
    double min_eigenvalue = 0.0;
};

struct UncertaintyCertificate {
    CertificateKind kind;
    std::vector<CertificateBlock> blocks;
    double implied_bound = 0.0;
    bool ok = true;                   // all blocks PSD within tolerance
    std::vector<std::string> flags;   // violated structural constraints

    static constexpr double psd_tol = 1e-10;
};

namespace detail {

inline CertificateBlock make_block(std::string label, MatrixXcd m) {
    CertificateBlock b{std::move(label), std::move(m), 0.0, 0.0};
    b.determinant = b.block.determinant().real();
    b.min_eigenvalue = min_eig(MatrixXcd(b.block));
    return b;
}

}  // namespace detail

inline UncertaintyCertificate bloch_certificate_from_moments(double x, double y, double z) {
    using namespace std::complex_literals;
    MatrixXcd m(3, 3);
    m << 1.0, x, z,
         x, 1.0, -1i * y,
         z, 1i * y, 1.0;
    UncertaintyCertificate cert{CertificateKind::bloch, {}, 0.0, true, {}};
    cert.blocks.push_back(detail::make_block("moment(1,X,Z)", m));
    cert.implied_bound = x * x + y * y + z * z;  // <= 1 when the block is psd
    cert.ok = cert.blocks[0].min_eigenvalue >= -UncertaintyCertificate::psd_tol;
    if (cert.implied_bound > 1.0 + 1e-9) cert.flags.push_back("bloch norm exceeds 1");
    return cert;
}

inline UncertaintyCertificate bloch_certificate(const Eigen::Vector2cd& state) {
    Eigen::Vector2cd psi = state / state.norm();
    std::complex<double> c0 = psi[0], c1 = psi[1];
    double x = 2.0 * (std::conj(c0) * c1).real();
    double y = 2.0 * (std::conj(c0) * c1).imag();
    double z = std::norm(c0) - std::norm(c1);
    return bloch_certificate_from_moments(x, y, z);
}

struct HeisenbergMoments {
    double x = 0.0, p = 0.0;       // first moments
    double x2 = 0.0, p2 = 0.0;     // second moments
    double re_xp = 0.0;            // Re <xp>; Im is hbar/2 by the CCR
    double hbar = 1.0;
};

inline UncertaintyCertificate heisenberg_certificate(const HeisenbergMoments& mom) {
    using namespace std::complex_literals;
    std::complex<double> xp(mom.re_xp, 0.5 * mom.hbar);
    MatrixXcd m(3, 3);
    m << 1.0, mom.x, mom.p,
         mom.x, mom.x2, xp,
         mom.p, std::conj(xp), mom.p2;
    MatrixXcd schur(2, 2);
    schur << mom.x2 - mom.x * mom.x, xp - mom.x * mom.p,
             std::conj(xp) - mom.x * mom.p, mom.p2 - mom.p * mom.p;
    UncertaintyCertificate cert{CertificateKind::heisenberg, {}, 0.0, true, {}};
    cert.blocks.push_back(detail::make_block("moment(1,x,p)", m));
    cert.blocks.push_back(detail::make_block("schur(1)", schur));
    double c = mom.re_xp - mom.x * mom.p;
    cert.implied_bound = c * c + 0.25 * mom.hbar * mom.hbar;  // <= var(x) var(p)
    for (const auto& b : cert.blocks)
        cert.ok = cert.ok && b.min_eigenvalue >= -UncertaintyCertificate::psd_tol;
    return cert;
}

// Moments of a spherical wavefunction with mean rotated onto +e_1, taken
// against the self-adjoint generators w_1i = -i v_1i for i = 2..k.
struct SphericalMoments {
    int k = 2;
    double t = 0.0;                          // |mu|
    double x1_sq = 0.0;                      // <x_1^2>
    double xi_sq_sum = 0.0;                  // sum_{i>=2} <x_i^2>
    std::vector<std::complex<double>> xw;    // <x_i w_1i> for i = 2..k
    double w_sq_sum = 0.0;                   // sum_{i>=2} <w_1i^2>
    double delta_total = 0.0;                // <Delta> = sum_{i<j} <w_ij^2>
};

inline UncertaintyCertificate spherical_certificate(const SphericalMoments& mom) {
    UncertaintyCertificate cert{CertificateKind::spherical, {}, 0.0, true, {}};
    const double tol = 1e-9;

    MatrixXcd top(2, 2);
    top << 1.0, mom.t, mom.t, mom.x1_sq;
    cert.blocks.push_back(detail::make_block("moment(1,x_1)", top));

    std::complex<double> xw_sum(0.0, 0.0);
    for (std::size_t i = 0; i < mom.xw.size(); ++i) {
        xw_sum += mom.xw[i];
        if (std::abs(mom.xw[i].imag() - 0.5 * mom.t) > tol)
            cert.flags.push_back("Im<x_" + std::to_string(i + 2) + " w_1" +
                                 std::to_string(i + 2) + "> != t/2");
    }
    MatrixXcd pt(2, 2);
    pt << mom.xi_sq_sum, xw_sum, std::conj(xw_sum), mom.w_sq_sum;
    cert.blocks.push_back(detail::make_block("partial trace", pt));

    if (std::abs(mom.x1_sq + mom.xi_sq_sum - 1.0) > tol)
        cert.flags.push_back("sum <x_i^2> != 1");
    if (mom.delta_total < mom.w_sq_sum - tol)
        cert.flags.push_back("<Delta> below its w_1i part");

    cert.implied_bound = mom.t < 1.0
                             ? 0.25 * (mom.k - 1.0) * (mom.k - 1.0) * mom.t * mom.t /
                                   (1.0 - mom.t * mom.t)
                             : std::numeric_limits<double>::infinity();
    for (const auto& b : cert.blocks)
        cert.ok = cert.ok && b.min_eigenvalue >= -UncertaintyCertificate::psd_tol;
    cert.ok = cert.ok && cert.flags.empty();
    return cert;
}

}  // namespace qrotor
