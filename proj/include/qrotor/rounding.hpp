#pragma once

// Quantum rounding: the reduced SDP solution becomes the covariance of a
// bosonic Gaussian state on n*k modes, the state is pushed through the
// radial partial-trace channel, and the energy of the result is evaluated
// in the Heisenberg picture.
//
// Covariance: sigma = (k/(k-1)) Re(M' (x) I_k) over phase-space
// coordinates interleaved as (x_{v,i}, p_{v,i}); the rescaling turns the
// fixed moment parts (k-1)/(2k) into the canonical 1/2, so validity
// sigma + (i/2) Omega >= 0 is exactly PSD-ness of M'. Per coordinate,
// Var x_{v,i} = 1/(k-1) and Var p_{v,i} = (k/(k-1)) L_v.
//
// Values of the rounded state:
//   * potential edge (v,w):  w * (c_pot + h(k, t_vw)) with t_vw the
//     x-sector correlation coefficient (h from bov.hpp);
//   * kinetic vertex: the Weyl symbol sum_{i<j} [(x_i p_j - x_j p_i)^2
//     - 1/2] under the vertex Wigner marginal. With K_v = 0 the closed
//     form -k(k-1)/4 + (k^2/(k-1)) L_v applies and the term is exactly
//     k/(k-1) times its SDP counterpart; wick mode evaluates the symbol
//     by Isserlis pairings (valid for any K_v); mc mode samples the
//     Wigner Gaussian.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "qrotor/bov.hpp"
#include "qrotor/phase_poly.hpp"
#include "qrotor/relax.hpp"
#include "qrotor/rng.hpp"

namespace qrotor {

class ValidityViolation : public std::runtime_error {
public:
    ValidityViolation(const std::string& what, double margin)
        : std::runtime_error(what), min_eigenvalue(margin) {}
    double min_eigenvalue;
};

struct GaussianCovariance {
    int n = 0, k = 0;
    MatrixXd sigma;  // 2nk x 2nk, interleaved (x_{v,i}, p_{v,i})

    int modes() const { return n * k; }
    int x_index(int v, int i) const { return 2 * (v * k + i); }
    int p_index(int v, int i) const { return 2 * (v * k + i) + 1; }

    // Block symplectic form matching the interleaved layout.
    MatrixXd omega() const {
        MatrixXd w = MatrixXd::Zero(2 * modes(), 2 * modes());
        for (int m = 0; m < modes(); ++m) {
            w(2 * m, 2 * m + 1) = 1.0;
            w(2 * m + 1, 2 * m) = -1.0;
        }
        return w;
    }

    // min eigenvalue of sigma + (i/2) Omega, checked via the real embedding.
    double validity_margin() const {
        MatrixXcd h = sigma.cast<std::complex<double>>() +
                      std::complex<double>(0.0, 0.5) * omega().cast<std::complex<double>>();
        MatrixXd emb = real_embedding(h);
        return min_eig(emb);
    }
};

inline constexpr double gaussian_validity_tol = 1e-9;

inline GaussianCovariance build_gaussian(const ReducedMoment& rm) {
    const int n = rm.n, k = rm.k;
    if (k < 2) throw std::invalid_argument("build_gaussian: need k >= 2");
    MatrixXcd mp = rm.assemble();
    double scale = double(k) / (k - 1);
    GaussianCovariance gc{n, k, MatrixXd::Zero(2 * n * k, 2 * n * k)};
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            for (int ar = 0; ar < 2; ++ar)
                for (int ac = 0; ac < 2; ++ac) {
                    double entry = scale * mp(2 * v + ar, 2 * w + ac).real();
                    for (int i = 0; i < k; ++i) {
                        int r = ar == 0 ? gc.x_index(v, i) : gc.p_index(v, i);
                        int c = ac == 0 ? gc.x_index(w, i) : gc.p_index(w, i);
                        gc.sigma(r, c) = entry;
                    }
                }
    double margin = gc.validity_margin();
    if (margin < -gaussian_validity_tol)
        throw ValidityViolation("build_gaussian: sigma + (i/2) Omega has negative eigenvalue " +
                                    std::to_string(margin),
                                margin);
    return gc;
}

// x-sector correlation coefficient between sites v and w; invariant under
// the global k/(k-1) rescaling since it is a ratio of covariances.
inline double x_correlation(const GaussianCovariance& gc, int v, int w) {
    double cvw = gc.sigma(gc.x_index(v, 0), gc.x_index(w, 0));
    double cv = gc.sigma(gc.x_index(v, 0), gc.x_index(v, 0));
    double cw = gc.sigma(gc.x_index(w, 0), gc.x_index(w, 0));
    double t = cvw / std::sqrt(cv * cw);
    return std::clamp(t, -1.0, 1.0);
}

struct RoundedTerm {
    double value = 0.0;
    double std_err = 0.0;
};

inline RoundedTerm rounded_potential_edge(const GaussianCovariance& gc, int v, int w,
                                          double weight, double c_pot,
                                          const McOptions& mc = {}) {
    double t = x_correlation(gc, v, w);
    rng::Estimate est = h(gc.k, t, mc);
    return {weight * (c_pot + est.mean), std::abs(weight) * est.std_err};
}

enum class KineticMode { closed_form, wick, mc };

// Wigner marginal of one site as a MomentSpec over k modes in the
// (x_1..x_k, p_1..p_k) layout used by PhasePoly.
inline MomentSpec vertex_marginal(const GaussianCovariance& gc, int v) {
    int k = gc.k;
    MomentSpec spec{Eigen::VectorXd::Zero(2 * k), Eigen::MatrixXd::Zero(2 * k, 2 * k)};
    auto coord = [&](int j) { return j < k ? gc.x_index(v, j) : gc.p_index(v, j - k); };
    for (int r = 0; r < 2 * k; ++r)
        for (int c = 0; c < 2 * k; ++c) spec.covariance(r, c) = gc.sigma(coord(r), coord(c));
    return spec;
}

inline RoundedTerm rounded_kinetic_vertex(const GaussianCovariance& gc, int v, double a,
                                          KineticMode mode, const McOptions& mc = {}) {
    const int k = gc.k;
    switch (mode) {
        case KineticMode::closed_form: {
            // requires K_v = 0 (diagonal site marginal)
            double sigma_pp = gc.sigma(gc.p_index(v, 0), gc.p_index(v, 0));
            return {a * (k * sigma_pp - 0.25 * k * (k - 1.0)), 0.0};
        }
        case KineticMode::wick: {
            MomentSpec spec = vertex_marginal(gc, v);
            return {a * wick_expectation(kinetic_weyl_symbol(k), spec), 0.0};
        }
        case KineticMode::mc: {
            MomentSpec spec = vertex_marginal(gc, v);
            spec.validate();
            Eigen::MatrixXd root = cholesky_psd(spec.covariance, 1e-9);
            PhasePoly symbol = kinetic_weyl_symbol(k);
            auto stats = rng::parallel_chunks(
                mc.samples, 1,
                [&](std::uint32_t chunk, std::uint64_t count, std::vector<rng::Welford>& acc) {
                    Eigen::VectorXd z(2 * k);
                    for (std::uint64_t s = 0; s < count; ++s) {
                        rng::Stream rs(mc.seed, detail::stream_wigner + 16 * std::uint32_t(v),
                                       chunk, std::uint32_t(s));
                        for (int i = 0; i < 2 * k; ++i) z[i] = rs.normal();
                        acc[0].add(eval(symbol, root * z).real());
                    }
                });
            return {a * stats[0].mean, std::abs(a) * stats[0].std_err()};
        }
    }
    throw std::invalid_argument("rounded_kinetic_vertex: unknown mode");
}

struct VertexReport {
    int v = 0;
    double sdp_term = 0.0;     // a * (-(k-1)^2/4 + k L_v)
    double rounded = 0.0;      // a * rounded kinetic value
    double proportionality_defect = 0.0;  // rounded - (k/(k-1)) sdp_term
};

struct EdgeReport {
    int u = 0, v = 0;
    double weight = 1.0;
    double t = 0.0;          // x-sector correlation
    double sdp_term = 0.0;   // b w (c_pot + t)
    double rounded = 0.0;    // b w (c_pot + h(k, t))
    double std_err = 0.0;
};

struct RoundReport {
    int k = 0;
    double sdp_value = 0.0;
    double rounded_value = 0.0;
    double rounded_std_err = 0.0;
    double validity_margin = 0.0;
    double k_ratio = 0.0;  // k/(k-1)
    bool ratios_reported = true;  // suppressed for negative edge weights
    std::vector<VertexReport> vertices;
    std::vector<EdgeReport> edges;
};

inline RoundReport rounded_value(const RotorInstance& inst, const ReducedMoment& rm,
                                 const McOptions& mc = {}, KineticMode mode = KineticMode::closed_form) {
    GaussianCovariance gc = build_gaussian(rm);
    const int k = inst.k;
    RoundReport report;
    report.k = k;
    report.validity_margin = gc.validity_margin();
    report.k_ratio = double(k) / (k - 1);
    report.ratios_reported = !inst.has_negative_weight();
    report.sdp_value = rm.objective_value(inst);

    double total = 0.0;
    double var = 0.0;
    for (int v = 0; v < inst.n; ++v) {
        VertexReport vr;
        vr.v = v;
        vr.sdp_term = inst.a * (-0.25 * (k - 1.0) * (k - 1.0) + k * rm.lqq[v]);
        RoundedTerm rt = rounded_kinetic_vertex(gc, v, inst.a, mode, mc);
        vr.rounded = rt.value;
        vr.proportionality_defect = vr.rounded - report.k_ratio * vr.sdp_term;
        total += rt.value;
        var += rt.std_err * rt.std_err;
        report.vertices.push_back(vr);
    }
    for (std::size_t ei = 0; ei < inst.edges.size(); ++ei) {
        const Edge& e = inst.edges[ei];
        EdgeReport er;
        er.u = e.u;
        er.v = e.v;
        er.weight = e.weight;
        er.t = x_correlation(gc, e.u, e.v);
        er.sdp_term = inst.b * e.weight * (inst.c_pot + er.t);
        McOptions edge_mc{mc.samples, mc.seed + 101 * (ei + 1)};
        RoundedTerm rt = rounded_potential_edge(gc, e.u, e.v, inst.b * e.weight, inst.c_pot,
                                                edge_mc);
        er.rounded = rt.value;
        er.std_err = rt.std_err;
        total += rt.value;
        var += rt.std_err * rt.std_err;
        report.edges.push_back(er);
    }
    report.rounded_value = total;
    report.rounded_std_err = std::sqrt(var);
    return report;
}

struct AlphaReport {
    int k = 0;
    double alpha_bov_k = 1.0;
    double alpha_bov_std_err = 0.0;
    double k_ratio = 0.0;
    double alpha_k = 1.0;  // max(alpha_bov_k, k/(k-1))
};

inline AlphaReport alpha(int k, const McOptions& mc = {}, int grid_size = 201,
                         double c_pot = 2.0) {
    AlphaBov ab = alpha_bov(k, grid_size, c_pot, mc);
    AlphaReport out;
    out.k = k;
    out.alpha_bov_k = ab.alpha;
    out.alpha_bov_std_err = ab.std_err;
    out.k_ratio = double(k) / (k - 1);
    out.alpha_k = std::max(ab.alpha, out.k_ratio);
    return out;
}

}  // namespace qrotor
