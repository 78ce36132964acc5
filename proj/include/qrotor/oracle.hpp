#pragma once

// Ground-truth engine for k = 2: the rotor Hamiltonian on L^2(S^1)^{(x) n}
// is assembled exactly in the per-site Fourier basis e^{i m theta},
// m in [-M, M]. The Laplacian is diagonal with entries m^2 and
// x_v . x_w = cos(theta_v - theta_w) shifts (m_v, m_w) -> (m_v +- 1,
// m_w -+ 1) with matrix element 1/2, so the truncated matrix is real
// symmetric and sparse. Extremal eigenvalues come from Lanczos with full
// reorthogonalization (dense diagonalization below a size threshold and
// as an independent cross-check path).
//
// The same basis drives a mean-field product-state optimizer (sequential
// exact single-site minimization, monotone by construction, multi-start)
// and exact moment computations for random truncated wavefunctions,
// which feed the spherical uncertainty certificates.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qrotor/bounds.hpp"
#include "qrotor/instance.hpp"
#include "qrotor/rng.hpp"

namespace qrotor {

struct TruncatedHamiltonian {
    RotorInstance instance;
    int cutoff = 0;  // modes m in [-M, M] per site
    Eigen::Index dim = 0;
    Eigen::SparseMatrix<double> matrix;
};

inline TruncatedHamiltonian hamiltonian_k2(const RotorInstance& inst, int cutoff) {
    inst.validate();
    if (inst.k != 2) throw std::invalid_argument("hamiltonian_k2: oracle requires k = 2");
    if (cutoff < 1) throw std::invalid_argument("hamiltonian_k2: cutoff >= 1");
    const int modes = 2 * cutoff + 1;
    double dim_check = std::pow(double(modes), inst.n);
    if (dim_check > 2e6) throw std::length_error("hamiltonian_k2: dimension overflow");
    const Eigen::Index dim = Eigen::Index(std::llround(dim_check));

    // mixed-radix state index; digit v is m_v + M
    std::vector<Eigen::Index> stride(inst.n, 1);
    for (int v = 1; v < inst.n; ++v) stride[v] = stride[v - 1] * modes;
    std::vector<int> digits(inst.n);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(dim) * (1 + 2 * inst.edges.size()));
    double const_diag = inst.b * inst.c_pot * inst.total_weight();
    for (Eigen::Index s = 0; s < dim; ++s) {
        Eigen::Index rest = s;
        double kin = 0.0;
        for (int v = 0; v < inst.n; ++v) {
            digits[v] = int(rest % modes);
            rest /= modes;
            double m = digits[v] - cutoff;
            kin += m * m;
        }
        trip.emplace_back(s, s, inst.a * kin + const_diag);
        for (const auto& e : inst.edges) {
            // (m_u + 1, m_v - 1) branch; the adjoint branch is generated
            // by the transposed triplet from the partner state
            if (digits[e.u] + 1 < modes && digits[e.v] - 1 >= 0) {
                Eigen::Index target = s + stride[e.u] - stride[e.v];
                double val = 0.5 * inst.b * e.weight;
                trip.emplace_back(target, s, val);
                trip.emplace_back(s, target, val);
            }
        }
    }
    TruncatedHamiltonian h{inst, cutoff, dim, Eigen::SparseMatrix<double>(dim, dim)};
    h.matrix.setFromTriplets(trip.begin(), trip.end());
    return h;
}

struct ExtremalEigen {
    double e0 = 0.0;        // smallest eigenvalue
    double e1 = 0.0;        // second Ritz value (gap estimate)
    Eigen::VectorXd vector;
    double residual = 0.0;  // |H v - e0 v|
};

inline ExtremalEigen dense_smallest(const Eigen::SparseMatrix<double>& h) {
    Eigen::MatrixXd dense(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    ExtremalEigen out;
    out.e0 = es.eigenvalues()[0];
    out.e1 = h.rows() > 1 ? es.eigenvalues()[1] : es.eigenvalues()[0];
    out.vector = es.eigenvectors().col(0);
    out.residual = (dense * out.vector - out.e0 * out.vector).norm();
    return out;
}

inline ExtremalEigen lanczos_smallest(const Eigen::SparseMatrix<double>& h,
                                      double tol = 1e-12) {
    const Eigen::Index dim = h.rows();
    if (dim <= 2) return dense_smallest(h);
    const int max_basis = int(std::min<Eigen::Index>(dim, 220));
    const int max_restarts = 40;
    const double scale = 1.0 + Eigen::MatrixXd(h.diagonal()).cwiseAbs().maxCoeff();

    // deterministic start: the all-zero-momentum state plus a fixed dither
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[(dim - 1) / 2] = 1.0;
    rng::Stream dither(0x5EED5EEDull, 0);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] += 1e-4 * dither.normal();
    v.normalize();

    ExtremalEigen out;
    for (int restart = 0; restart < max_restarts; ++restart) {
        Eigen::MatrixXd basis(dim, max_basis);
        std::vector<double> alpha, beta;
        basis.col(0) = v;
        Eigen::VectorXd w;
        for (int j = 0; j < max_basis; ++j) {
            w = h * basis.col(j);
            if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
            alpha.push_back(basis.col(j).dot(w));
            w -= alpha[j] * basis.col(j);
            // full reorthogonalization, twice for safety
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            double nb = w.norm();

            if (j >= 2 || nb < 1e-14) {
                Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(j + 1, j + 1);
                for (int i = 0; i <= j; ++i) tri(i, i) = alpha[i];
                for (int i = 0; i + 1 <= j; ++i)
                    tri(i, i + 1) = tri(i + 1, i) = beta[i];
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
                double theta = es.eigenvalues()[0];
                double res = nb * std::abs(es.eigenvectors()(j, 0));
                if (res <= tol * scale || nb < 1e-14 || j == max_basis - 1) {
                    out.e0 = theta;
                    out.e1 = j > 0 ? es.eigenvalues()[1] : theta;
                    out.vector = basis.leftCols(j + 1) * es.eigenvectors().col(0);
                    out.vector.normalize();
                    out.residual = (h * out.vector - theta * out.vector).norm();
                    if (out.residual <= tol * scale) return out;
                    break;  // restart from the current Ritz vector
                }
            }
            if (nb < 1e-14) break;
            beta.push_back(nb);
            if (j + 1 < max_basis) basis.col(j + 1) = w / nb;
        }
        v = out.vector;
    }
    throw std::runtime_error("lanczos_smallest: no convergence after restarts");
}

inline ExtremalEigen ground_state(const TruncatedHamiltonian& h, double tol = 1e-12) {
    return h.dim <= 600 ? dense_smallest(h.matrix) : lanczos_smallest(h.matrix, tol);
}

struct OracleResult {
    double ground_energy = 0.0;
    double spectral_gap = 0.0;
    int cutoff = 0;
    double convergence_delta = 0.0;  // |E0(M) - E0(M-2)|
    double product_energy = 0.0;     // heuristic upper bound on h_sep
    bool product_converged = true;
};

// Smallest eigenvalue at cutoff M plus the rerun at M-2 for the
// truncation-convergence report.
inline OracleResult ground_energy(const TruncatedHamiltonian& h, double tol = 1e-12) {
    OracleResult out;
    ExtremalEigen lo = ground_state(h, tol);
    out.ground_energy = lo.e0;
    out.spectral_gap = lo.e1 - lo.e0;
    out.cutoff = h.cutoff;
    if (h.cutoff > 2) {
        TruncatedHamiltonian coarse = hamiltonian_k2(h.instance, h.cutoff - 2);
        out.convergence_delta = std::abs(lo.e0 - ground_state(coarse, tol).e0);
    } else {
        out.convergence_delta = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

struct ProductStateResult {
    double energy = 0.0;
    bool converged = true;
    std::vector<std::complex<double>> site_means;  // <e^{i theta}> per site
};

// Alternating exact single-site minimization of the product-state energy,
// monotone in each sweep, best over random restarts.
inline ProductStateResult product_state_k2(const RotorInstance& inst, int cutoff,
                                           int restarts = 32, std::uint64_t seed = 0) {
    inst.validate();
    if (inst.k != 2) throw std::invalid_argument("product_state_k2: requires k = 2");
    const int modes = 2 * cutoff + 1;

    // per-site weighted neighbor sums enter through mu_tot = sum_w w uv mu_w
    std::vector<std::vector<std::pair<int, double>>> adj(inst.n);
    for (const auto& e : inst.edges) {
        adj[e.u].push_back({e.v, e.weight});
        adj[e.v].push_back({e.u, e.weight});
    }

    ProductStateResult best;
    best.energy = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        rng::Stream rs(seed, 40 + std::uint32_t(r));
        std::vector<std::complex<double>> mu(inst.n);
        std::vector<double> kinetic(inst.n, 0.0);
        for (auto& m : mu) {
            double ang = 2.0 * M_PI * rs.uniform();
            double rad = std::sqrt(rs.uniform());
            m = std::polar(rad, ang);
        }
        auto total_energy = [&]() {
            double e = 0.0;
            for (int v = 0; v < inst.n; ++v) e += inst.a * kinetic[v];
            for (const auto& ed : inst.edges)
                e += inst.b * ed.weight *
                     (inst.c_pot + (std::conj(mu[ed.u]) * mu[ed.v]).real());
            return e;
        };

        // initialize kinetic terms by one optimization pass per site
        double prev = std::numeric_limits<double>::infinity();
        bool converged = false;
        bool monotone = true;
        for (int sweep = 0; sweep < 1000; ++sweep) {
            for (int v = 0; v < inst.n; ++v) {
                std::complex<double> mu_tot(0.0, 0.0);
                for (auto [w, wt] : adj[v]) mu_tot += wt * mu[w];
                Eigen::MatrixXcd site = Eigen::MatrixXcd::Zero(modes, modes);
                for (int d = 0; d < modes; ++d) {
                    double m = d - cutoff;
                    site(d, d) = inst.a * m * m;
                    if (d + 1 < modes) {
                        site(d + 1, d) = 0.5 * inst.b * std::conj(mu_tot);
                        site(d, d + 1) = 0.5 * inst.b * mu_tot;
                    }
                }
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(site);
                Eigen::VectorXcd c = es.eigenvectors().col(0);
                double kin = 0.0;
                std::complex<double> m1(0.0, 0.0);
                for (int d = 0; d < modes; ++d) {
                    double m = d - cutoff;
                    kin += m * m * std::norm(c[d]);
                    if (d + 1 < modes) m1 += std::conj(c[d + 1]) * c[d];
                }
                kinetic[v] = kin;
                mu[v] = m1;
            }
            double e = total_energy();
            if (e > prev + 1e-9) monotone = false;
            if (std::abs(prev - e) < 1e-10 * (1.0 + std::abs(e))) {
                converged = true;
                prev = e;
                break;
            }
            prev = e;
        }
        if (prev < best.energy) {
            best.energy = prev;
            best.converged = converged && monotone;
            best.site_means = mu;
        }
    }
    return best;
}

// Moments of a truncated circle wavefunction sum_m c_m e^{i m theta},
// rotated so the spherical mean points along +e_1. Exact in the
// coefficients.
struct WavefunctionMoments {
    double delta = 0.0;          // <Delta> = sum m^2 |c_m|^2
    Eigen::Vector2d mu;          // spherical mean before rotation
    SphericalMoments spherical;  // certificate moments (k = 2)
};

inline WavefunctionMoments moments_from_coefficients(std::vector<std::complex<double>> c) {
    double norm2 = 0.0;
    for (auto z : c) norm2 += std::norm(z);
    if (norm2 <= 0.0) throw std::invalid_argument("moments_from_coefficients: zero state");
    for (auto& z : c) z /= std::sqrt(norm2);
    const int modes = int(c.size());

    WavefunctionMoments out;
    std::complex<double> mean(0.0, 0.0);
    for (int m = 0; m + 1 < modes; ++m) mean += std::conj(c[m + 1]) * c[m];
    out.mu = {mean.real(), mean.imag()};
    double t = std::abs(mean);

    // rotate: d_m = c_m e^{i m phi} sends <e^{i theta}> to t >= 0
    double phi = t > 0 ? std::arg(mean) : 0.0;
    std::vector<std::complex<double>> d(c.size());
    for (int m = 0; m < modes; ++m) d[m] = c[m] * std::polar(1.0, phi * m);

    std::complex<double> e2(0.0, 0.0);
    for (int m = 0; m + 2 < modes; ++m) e2 += std::conj(d[m + 2]) * d[m];
    // coefficients are positional: index i holds the mode m = i - M
    const int cut = (modes - 1) / 2;
    double delta = 0.0;
    std::complex<double> xw(0.0, 0.0);
    for (int i = 0; i < modes; ++i) {
        double m = i - cut;
        delta += m * m * std::norm(d[i]);
        std::complex<double> up = i + 1 < modes ? std::conj(d[i + 1]) : 0.0;
        std::complex<double> down = i - 1 >= 0 ? std::conj(d[i - 1]) : 0.0;
        xw += m * d[i] * (up - down) / std::complex<double>(0.0, 2.0);
    }
    out.delta = delta;
    out.spherical.k = 2;
    out.spherical.t = t;
    out.spherical.x1_sq = 0.5 * (1.0 + e2.real());
    out.spherical.xi_sq_sum = 0.5 * (1.0 - e2.real());
    out.spherical.xw = {xw};
    out.spherical.w_sq_sum = delta;
    out.spherical.delta_total = delta;
    return out;
}

inline WavefunctionMoments random_wavefunction_moments(int cutoff, std::uint64_t seed) {
    if (cutoff < 1) throw std::invalid_argument("random_wavefunction_moments: cutoff >= 1");
    rng::Stream rs(seed, 77);
    std::vector<std::complex<double>> c(2 * cutoff + 1);
    for (auto& z : c) z = {rs.normal(), rs.normal()};
    return moments_from_coefficients(std::move(c));
}

}  // namespace qrotor
