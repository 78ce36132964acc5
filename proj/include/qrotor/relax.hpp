#pragma once

// Level-1 moment relaxations of the rotor Hamiltonian
//
//   H = a sum_v Delta_v + b sum_{(v,w)} w_vw (c_pot + x_v . x_w)
//
// in two equivalent forms.
//
// The full form optimizes a Hermitian moment matrix over the monomials
// {1} u {x_{v,i}} u {q_{v,i}} subject to the linear constraints inherited
// from the verified operator algebra (sphere_ops.hpp): cross-site moments
// are real; same-site x-x blocks are real symmetric with unit trace;
// Im E[x_{v,i} q_{v,j}] = -(delta_ij - E[x_{v,i} x_{v,j}])/2 (from R5);
// sum_i Re E[x_{v,i} q_{v,i}] = 0 (from R7); and the same-site q-q
// imaginary parts are tied to the x-q real parts (from R6,
// [q_i,q_j] = i(x_i q_j - x_j q_i)):
//   Im E[q_i q_j] = (Re E[x_i q_j] - Re E[x_j q_i]) / 2.
// The objective is a sum_v (-(k-1)^2/4 + sum_i E[q_{v,i}^2])
//               + b sum_edges w (c_pot + sum_i E[x_{v,i} x_{w,i}]).
//
// The O(k)-invariant reduced form collapses each k x k sub-block to a
// scalar: M = 1 (+) M' (x) I_k with M' a 2n x 2n Hermitian matrix whose
// diagonal blocks are [[1/k, K_v - i(k-1)/(2k)], [K_v + i(k-1)/(2k), L_v]]
// and whose off-diagonal 2x2 blocks are free and real. Its size does not
// depend on k. An optional time-reversal reduction pins K_v = 0; it does
// not change the optimum (conjugation negates K_v and fixes the
// objective) but makes the rounded Gaussian's site marginals independent.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qrotor/instance.hpp"
#include "qrotor/sdp.hpp"

namespace qrotor {

// --- index maps --------------------------------------------------------------

struct FullIndex {
    int n = 0, k = 0;
    int size() const { return 1 + 2 * n * k; }
    int one() const { return 0; }
    int x(int v, int i) const { return 1 + v * 2 * k + i; }          // i in [0, k)
    int q(int v, int i) const { return 1 + v * 2 * k + k + i; }
};

struct ReducedIndex {
    int n = 0;
    int size() const { return 2 * n; }
    int x(int v) const { return 2 * v; }
    int q(int v) const { return 2 * v + 1; }
};

// --- moment containers -------------------------------------------------------

struct FullMoment {
    int n = 0, k = 0;
    MatrixXcd m;  // Hermitian, size 1 + 2nk, laid out per FullIndex
};

struct ReducedMoment {
    int n = 0, k = 0;
    std::vector<double> kxq;  // K_v = Re E[x_{v,1} q_{v,1}], scalar of the x-q block
    std::vector<double> lqq;  // L_v = E[q_{v,1}^2], scalar of the q-q diagonal block
    std::map<std::pair<int, int>, Eigen::Matrix2d> cross;  // v < w -> real 2x2 block

    const Eigen::Matrix2d& block(int v, int w) const {
        static const Eigen::Matrix2d zero = Eigen::Matrix2d::Zero();
        auto it = cross.find({v, w});
        return it == cross.end() ? zero : it->second;
    }

    // The 2n x 2n Hermitian matrix M' of the reduced relaxation.
    MatrixXcd assemble() const {
        ReducedIndex ix{n};
        MatrixXcd m = MatrixXcd::Zero(ix.size(), ix.size());
        double im = double(k - 1) / (2.0 * k);
        for (int v = 0; v < n; ++v) {
            m(ix.x(v), ix.x(v)) = 1.0 / k;
            m(ix.q(v), ix.q(v)) = lqq[v];
            m(ix.x(v), ix.q(v)) = std::complex<double>(kxq[v], -im);
            m(ix.q(v), ix.x(v)) = std::complex<double>(kxq[v], im);
        }
        for (const auto& [vw, blk] : cross) {
            auto [v, w] = vw;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    m(2 * v + r, 2 * w + c) = blk(r, c);
                    m(2 * w + c, 2 * v + r) = blk(r, c);
                }
        }
        return m;
    }

    double objective_value(const RotorInstance& inst) const {
        double kin = 0.0;
        for (int v = 0; v < n; ++v)
            kin += -0.25 * (k - 1.0) * (k - 1.0) + k * lqq[v];
        double pot = 0.0;
        for (const auto& e : inst.edges) {
            const Eigen::Matrix2d& blk = block(std::min(e.u, e.v), std::max(e.u, e.v));
            pot += e.weight * (inst.c_pot + k * blk(0, 0));
        }
        return inst.a * kin + inst.b * pot;
    }
};

// --- builders ----------------------------------------------------------------

inline double relax_objective_offset(const RotorInstance& inst) {
    return -inst.a * inst.n * 0.25 * (inst.k - 1.0) * (inst.k - 1.0) +
           inst.b * inst.c_pot * inst.total_weight();
}

inline SdpProblem build_full(const RotorInstance& inst) {
    inst.validate();
    FullIndex ix{inst.n, inst.k};
    const int n = inst.n, k = inst.k, d = ix.size();
    SdpProblem p;
    p.dimension = d;
    p.objective = MatrixXcd::Zero(d, d);
    p.objective_offset = relax_objective_offset(inst);

    for (int v = 0; v < n; ++v)
        for (int i = 0; i < k; ++i) p.objective += inst.a * re_atom(d, ix.q(v, i), ix.q(v, i));
    for (const auto& e : inst.edges)
        for (int i = 0; i < k; ++i)
            p.objective += inst.b * e.weight * re_atom(d, ix.x(e.u, i), ix.x(e.v, i));

    p.constraints.push_back({re_atom(d, 0, 0), 1.0});
    // degree-1 moments of self-adjoint operators are real
    for (int j = 1; j < d; ++j) p.constraints.push_back({im_atom(d, 0, j), 0.0});

    for (int v = 0; v < n; ++v) {
        // x-x block real (symmetry then follows from Hermitianity)
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                p.constraints.push_back({im_atom(d, ix.x(v, i), ix.x(v, j)), 0.0});
        // unit sphere: sum_i E[x_{v,i}^2] = 1
        MatrixXcd trace_x = MatrixXcd::Zero(d, d);
        for (int i = 0; i < k; ++i) trace_x += re_atom(d, ix.x(v, i), ix.x(v, i));
        p.constraints.push_back({trace_x, 1.0});
        // R5: Im E[x_i q_j] = -(delta_ij - E[x_i x_j])/2
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                MatrixXcd a = im_atom(d, ix.x(v, i), ix.q(v, j)) -
                              0.5 * re_atom(d, ix.x(v, i), ix.x(v, j));
                p.constraints.push_back({a, i == j ? -0.5 : 0.0});
            }
        // R7 (real part): sum_i Re E[x_i q_i] = 0
        MatrixXcd xq = MatrixXcd::Zero(d, d);
        for (int i = 0; i < k; ++i) xq += re_atom(d, ix.x(v, i), ix.q(v, i));
        p.constraints.push_back({xq, 0.0});
        // R6: Im E[q_i q_j] = (Re E[x_i q_j] - Re E[x_j q_i]) / 2
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                MatrixXcd a = im_atom(d, ix.q(v, i), ix.q(v, j)) -
                              0.5 * re_atom(d, ix.x(v, i), ix.q(v, j)) +
                              0.5 * re_atom(d, ix.x(v, j), ix.q(v, i));
                p.constraints.push_back({a, 0.0});
            }
    }
    // distinct sites commute: cross-site moments are real
    for (int v = 0; v < n; ++v)
        for (int w = v + 1; w < n; ++w)
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    p.constraints.push_back({im_atom(d, ix.x(v, i), ix.x(w, j)), 0.0});
                    p.constraints.push_back({im_atom(d, ix.x(v, i), ix.q(w, j)), 0.0});
                    p.constraints.push_back({im_atom(d, ix.q(v, i), ix.x(w, j)), 0.0});
                    p.constraints.push_back({im_atom(d, ix.q(v, i), ix.q(w, j)), 0.0});
                }
    return p;
}

struct ReducedOptions {
    bool time_reversal = true;  // pin K_v = 0
};

inline SdpProblem build_reduced(const RotorInstance& inst, ReducedOptions opt = {}) {
    inst.validate();
    ReducedIndex ix{inst.n};
    const int n = inst.n, k = inst.k, d = ix.size();
    SdpProblem p;
    p.dimension = d;
    p.objective = MatrixXcd::Zero(d, d);
    p.objective_offset = relax_objective_offset(inst);

    for (int v = 0; v < n; ++v) p.objective += inst.a * k * re_atom(d, ix.q(v), ix.q(v));
    for (const auto& e : inst.edges)
        p.objective += inst.b * e.weight * k * re_atom(d, ix.x(e.u), ix.x(e.v));

    double im = (k - 1.0) / (2.0 * k);
    for (int v = 0; v < n; ++v) {
        p.constraints.push_back({re_atom(d, ix.x(v), ix.x(v)), 1.0 / k});
        p.constraints.push_back({im_atom(d, ix.x(v), ix.q(v)), -im});
        if (opt.time_reversal)
            p.constraints.push_back({re_atom(d, ix.x(v), ix.q(v)), 0.0});
    }
    for (int v = 0; v < n; ++v)
        for (int w = v + 1; w < n; ++w)
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    p.constraints.push_back({im_atom(d, 2 * v + r, 2 * w + c), 0.0});
    return p;
}

// --- conversions ---------------------------------------------------------------

inline ReducedMoment extract_reduced(const RotorInstance& inst, const MatrixXcd& x) {
    ReducedIndex ix{inst.n};
    if (x.rows() != ix.size()) throw std::invalid_argument("extract_reduced: bad size");
    ReducedMoment rm;
    rm.n = inst.n;
    rm.k = inst.k;
    rm.kxq.resize(inst.n);
    rm.lqq.resize(inst.n);
    for (int v = 0; v < inst.n; ++v) {
        rm.kxq[v] = x(ix.x(v), ix.q(v)).real();
        rm.lqq[v] = x(ix.q(v), ix.q(v)).real();
    }
    for (int v = 0; v < inst.n; ++v)
        for (int w = v + 1; w < inst.n; ++w) {
            Eigen::Matrix2d blk;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) blk(r, c) = x(2 * v + r, 2 * w + c).real();
            rm.cross[{v, w}] = blk;
        }
    return rm;
}

// M = 1 (+) M' (x) I_k, laid out per FullIndex.
inline FullMoment lift(const ReducedMoment& rm, double psd_tol = 1e-8) {
    MatrixXcd mp = rm.assemble();
    if (min_eig(mp) < -psd_tol) throw std::domain_error("lift: reduced moment not PSD");
    FullIndex ix{rm.n, rm.k};
    FullMoment fm{rm.n, rm.k, MatrixXcd::Zero(ix.size(), ix.size())};
    fm.m(0, 0) = 1.0;
    auto full_row = [&](int v, int ab, int i) {
        return ab == 0 ? ix.x(v, i) : ix.q(v, i);
    };
    for (int v = 0; v < rm.n; ++v)
        for (int w = 0; w < rm.n; ++w)
            for (int abr = 0; abr < 2; ++abr)
                for (int abc = 0; abc < 2; ++abc) {
                    std::complex<double> entry = mp(2 * v + abr, 2 * w + abc);
                    for (int i = 0; i < rm.k; ++i)
                        fm.m(full_row(v, abr, i), full_row(w, abc, i)) = entry;
                }
    return fm;
}

// Group averaging of a feasible full moment matrix: every k x k sub-block
// collapses to (trace/k) I, degree-1 rows vanish. Objective is preserved
// because the objective reads only the invariant components.
inline ReducedMoment symmetrize(const FullMoment& fm) {
    FullIndex ix{fm.n, fm.k};
    ReducedMoment rm;
    rm.n = fm.n;
    rm.k = fm.k;
    rm.kxq.resize(fm.n);
    rm.lqq.resize(fm.n);
    auto block_mean = [&](int v, int ab_r, int w, int ab_c) {
        std::complex<double> tr = 0.0;
        for (int i = 0; i < fm.k; ++i) {
            int r = ab_r == 0 ? ix.x(v, i) : ix.q(v, i);
            int c = ab_c == 0 ? ix.x(w, i) : ix.q(w, i);
            tr += fm.m(r, c);
        }
        return tr / double(fm.k);
    };
    for (int v = 0; v < fm.n; ++v) {
        rm.kxq[v] = block_mean(v, 0, v, 1).real();
        rm.lqq[v] = block_mean(v, 1, v, 1).real();
    }
    for (int v = 0; v < fm.n; ++v)
        for (int w = v + 1; w < fm.n; ++w) {
            Eigen::Matrix2d blk;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) blk(r, c) = block_mean(v, r, w, c).real();
            rm.cross[{v, w}] = blk;
        }
    return rm;
}

// Full-moment objective a<kinetic> + b<potential> including constants.
inline double full_objective_value(const RotorInstance& inst, const FullMoment& fm) {
    FullIndex ix{inst.n, inst.k};
    double kin = 0.0;
    for (int v = 0; v < inst.n; ++v) {
        double sum_q2 = 0.0;
        for (int i = 0; i < inst.k; ++i) sum_q2 += fm.m(ix.q(v, i), ix.q(v, i)).real();
        kin += -0.25 * (inst.k - 1.0) * (inst.k - 1.0) + sum_q2;
    }
    double pot = 0.0;
    for (const auto& e : inst.edges) {
        double dot = 0.0;
        for (int i = 0; i < inst.k; ++i) dot += fm.m(ix.x(e.u, i), ix.x(e.v, i)).real();
        pot += e.weight * (inst.c_pot + dot);
    }
    return inst.a * kin + inst.b * pot;
}

// Feasibility diagnostics: worst violation of a problem's constraints.
inline double max_constraint_violation(const SdpProblem& p, const MatrixXcd& x) {
    double worst = 0.0;
    for (const auto& c : p.constraints)
        worst = std::max(worst, std::abs(herm_inner(c.a, x) - c.b));
    return worst;
}

// The explicit interior point: K_v = 0, L_v = (k-1)^2/(4k) + 1, B_vw = 0.
inline ReducedMoment uniform_feasible_point(const RotorInstance& inst) {
    ReducedMoment rm;
    rm.n = inst.n;
    rm.k = inst.k;
    rm.kxq.assign(inst.n, 0.0);
    rm.lqq.assign(inst.n, 0.25 * (inst.k - 1.0) * (inst.k - 1.0) / inst.k + 1.0);
    return rm;
}

}  // namespace qrotor
