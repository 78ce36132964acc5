#pragma once

// Classical rank-k Grothendieck relaxation and Gaussian rounding: the
// a = 0 limit of the rotor model. The SDP optimizes an n x n correlation
// matrix; rounding samples y ~ N(0, M' (x) (1/k) I_k) and projects each
// site to the sphere, y_v -> y_v/|y_v|.
//
// The rounding curve h(k, t) = E[(x/|x|).(y/|y|)] for a pair with
// x-correlation t is estimated by Monte Carlo (the paper defines it only
// as an expectation; no closed form is used). The approximation ratio is
//   alpha_bov(k) = max_t (c_pot + h(k, t)) / (c_pot + t).
// Estimates carry standard errors and are deterministic given the seed:
// the grid curve shares samples across t (common random numbers), which
// also makes the estimated curve smooth in t.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qrotor/instance.hpp"
#include "qrotor/rng.hpp"
#include "qrotor/sdp.hpp"

namespace qrotor {

// SDP over correlation matrices: minimize sum_edges w (c_pot + M_vw).
inline SdpProblem build_bov(const RotorInstance& graph, double c_pot) {
    graph.validate();
    int n = graph.n;
    SdpProblem p;
    p.dimension = n;
    p.objective = MatrixXcd::Zero(n, n);
    for (const auto& e : graph.edges)
        p.objective += e.weight * re_atom(n, std::min(e.u, e.v), std::max(e.u, e.v));
    p.objective_offset = c_pot * graph.total_weight();
    for (int v = 0; v < n; ++v) p.constraints.push_back({re_atom(n, v, v), 1.0});
    return p;
}

inline SdpProblem build_bov(const RotorInstance& graph) { return build_bov(graph, graph.c_pot); }

// E|x| for x ~ N(0, (1/k) I_k): the chi-distribution mean scaled by
// 1/sqrt(k), via log-gamma for stability. Increasing in k with limit 1.
inline double chi_mean(int k) {
    if (k < 1) throw std::invalid_argument("chi_mean: k >= 1");
    return std::sqrt(2.0 / k) * std::exp(std::lgamma((k + 1) / 2.0) - std::lgamma(k / 2.0));
}

// E |x/|x| - x|^2 = 2 (1 - chi_mean(k)); decreasing to 0 as k grows.
inline double mismatch(int k) { return 2.0 * (1.0 - chi_mean(k)); }

struct McOptions {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
};

namespace detail {

// stream ids keep independent Monte Carlo uses of one seed decorrelated
enum : std::uint32_t { stream_round_curve = 1, stream_round_bov = 2, stream_wigner = 3 };

}  // namespace detail

// Monte Carlo estimates of h(k, t) = E[(x/|x|).(y/|y|)] jointly for a
// grid of correlations t, sharing the underlying normals across t.
inline std::vector<rng::Estimate> h_curve(int k, const std::vector<double>& ts,
                                          const McOptions& mc) {
    if (k < 1) throw std::invalid_argument("h_curve: k >= 1");
    if (mc.samples < 1) throw std::invalid_argument("h_curve: samples >= 1");
    for (double t : ts)
        if (!(std::abs(t) <= 1.0)) throw std::domain_error("h_curve: need |t| <= 1");

    std::size_t nt = ts.size();
    std::vector<double> sq(nt);
    for (std::size_t i = 0; i < nt; ++i) sq[i] = std::sqrt(std::max(0.0, 1.0 - ts[i] * ts[i]));

    auto stats = rng::parallel_chunks(
        mc.samples, nt,
        [&](std::uint32_t chunk, std::uint64_t count, std::vector<rng::Welford>& acc) {
            std::vector<double> z1(k), z2(k);
            for (std::uint64_t s = 0; s < count; ++s) {
                rng::Stream rs(mc.seed, detail::stream_round_curve, chunk, std::uint32_t(s));
                rs.fill_normal(z1.data(), k);
                rs.fill_normal(z2.data(), k);
                double nx = 0.0;
                for (int i = 0; i < k; ++i) nx += z1[i] * z1[i];
                nx = std::sqrt(nx);
                for (std::size_t ti = 0; ti < nt; ++ti) {
                    double t = ts[ti], c = sq[ti];
                    double dot = 0.0, ny = 0.0;
                    for (int i = 0; i < k; ++i) {
                        double yi = t * z1[i] + c * z2[i];
                        ny += yi * yi;
                        dot += z1[i] * yi;
                    }
                    // y = t*x exactly when |t| = 1; the zero-norm guard covers
                    // the measure-zero degenerate draw
                    double val = (nx == 0.0 || ny == 0.0) ? t : dot / (nx * std::sqrt(ny));
                    acc[ti].add(val);
                }
            }
        });
    std::vector<rng::Estimate> out(nt);
    for (std::size_t i = 0; i < nt; ++i)
        out[i] = {stats[i].mean, stats[i].std_err(), stats[i].n};
    return out;
}

inline rng::Estimate h(int k, double t, const McOptions& mc = {}) {
    return h_curve(k, {t}, mc)[0];
}

inline double g(int k, double t, double c_pot, const McOptions& mc = {}) {
    if (c_pot + t <= 0) throw std::domain_error("g: need c_pot + t > 0");
    return (c_pot + h(k, t, mc).mean) / (c_pot + t);
}

struct RatioPoint {
    double t = 0.0;
    double g = 0.0;
    double std_err = 0.0;  // of g
};

struct AlphaBov {
    double alpha = 1.0;
    double t_at_max = 1.0;
    double std_err = 0.0;
    std::vector<RatioPoint> curve;
};

// Grid maximum of g with a 3-point quadratic refinement around the peak.
inline AlphaBov alpha_bov(int k, int grid_size, double c_pot, const McOptions& mc) {
    if (grid_size < 3) throw std::invalid_argument("alpha_bov: grid_size >= 3");
    std::vector<double> ts(grid_size);
    for (int i = 0; i < grid_size; ++i) ts[i] = -1.0 + 2.0 * i / (grid_size - 1);
    for (double t : ts)
        if (c_pot + t <= 0) throw std::domain_error("alpha_bov: c_pot + t <= 0 on grid");
    auto hs = h_curve(k, ts, mc);

    AlphaBov out;
    out.curve.resize(grid_size);
    int arg = 0;
    for (int i = 0; i < grid_size; ++i) {
        double gi = (c_pot + hs[i].mean) / (c_pot + ts[i]);
        out.curve[i] = {ts[i], gi, hs[i].std_err / (c_pot + ts[i])};
        if (gi > out.curve[arg].g) arg = i;
    }
    out.alpha = out.curve[arg].g;
    out.t_at_max = ts[arg];
    out.std_err = out.curve[arg].std_err;

    if (arg > 0 && arg + 1 < grid_size) {
        // vertex of the parabola through the three points around the max
        double y0 = out.curve[arg - 1].g, y1 = out.curve[arg].g, y2 = out.curve[arg + 1].g;
        double denom = y0 - 2.0 * y1 + y2;
        if (std::abs(denom) > 1e-14) {
            double step = ts[1] - ts[0];
            double dt = 0.5 * (y0 - y2) / denom * step;
            double t_ref = std::clamp(ts[arg] + dt, -1.0, 1.0);
            auto h_ref = h(k, t_ref, {mc.samples, mc.seed + 1});
            double g_ref = (c_pot + h_ref.mean) / (c_pot + t_ref);
            if (g_ref > out.alpha) {
                out.alpha = g_ref;
                out.t_at_max = t_ref;
                out.std_err = h_ref.std_err / (c_pot + t_ref);
            }
        }
    }
    return out;
}

inline AlphaBov alpha_bov(int k, const McOptions& mc = {}) { return alpha_bov(k, 201, 2.0, mc); }

struct RoundedVectors {
    Eigen::MatrixXd units;  // n x k, rows are the rounded unit vectors
    double value = 0.0;     // sum_edges w (c_pot + u_v . u_w)
};

// One rounding sample: y ~ N(0, M' (x) (1/k) I_k), u_v = y_v / |y_v|.
inline RoundedVectors round_bov(const RotorInstance& graph, const MatrixXd& mprime, int k,
                                std::uint64_t seed, double shift_tol = 1e-12) {
    int n = graph.n;
    if (mprime.rows() != n || mprime.cols() != n)
        throw std::invalid_argument("round_bov: solution size mismatch");
    MatrixXd f = cholesky_psd(mprime, shift_tol);
    RoundedVectors out;
    out.units.resize(n, k);
    rng::Stream rs(seed, detail::stream_round_bov);
    for (int attempt = 0;; ++attempt) {
        MatrixXd z(n, k);
        for (int v = 0; v < n; ++v)
            for (int i = 0; i < k; ++i) z(v, i) = rs.normal() / std::sqrt(double(k));
        MatrixXd y = f * z;
        bool ok = true;
        for (int v = 0; v < n && ok; ++v) ok = y.row(v).norm() > 0.0;
        if (ok || attempt > 64) {
            for (int v = 0; v < n; ++v) out.units.row(v) = y.row(v) / y.row(v).norm();
            break;
        }
        // zero row has probability zero; resample
    }
    out.value = 0.0;
    for (const auto& e : graph.edges)
        out.value += e.weight * (graph.c_pot + out.units.row(e.u).dot(out.units.row(e.v)));
    return out;
}

// Rounding-curve CSV: header with parameters, then rows t,g,std_err.
inline void write_ratio_csv(std::ostream& os, int k, const McOptions& mc,
                            const std::vector<RatioPoint>& curve) {
    os << "# k=" << k << " samples=" << mc.samples << " seed=" << mc.seed << "\n";
    os << "t,g,std_err\n";
    for (const auto& pt : curve)
        os << detail::fmt17(pt.t) << ',' << detail::fmt17(pt.g) << ','
           << detail::fmt17(pt.std_err) << "\n";
}

}  // namespace qrotor
