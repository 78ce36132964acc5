#pragma once

// Command implementations behind the qrotor binary: solve, round,
// oracle, ratio, verify, certify. Reports are deterministic structured
// text (key-value lines, 17-significant-digit numbers, no timestamps),
// written to the configured output path or stdout. Exit codes: 0 on
// success, 1 when a verification reports FAIL, 2 on validation errors,
// 3 on solver non-convergence.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "qrotor/bounds.hpp"
#include "qrotor/bov.hpp"
#include "qrotor/instance.hpp"
#include "qrotor/oracle.hpp"
#include "qrotor/relax.hpp"
#include "qrotor/rounding.hpp"
#include "qrotor/sdp.hpp"

namespace qrotor {

enum class Command { solve, round, oracle, ratio, verify, certify };

struct RunConfig {
    Command command = Command::solve;
    std::string instance_path;
    std::string output_path;       // empty: stdout
    std::string dump_sdp_path;     // solve: optional problem dump
    bool full_form = false;        // solve: use the unreduced moment matrix
    bool time_reversal = true;     // solve/round: pin K_v = 0
    int k = 2;                     // ratio/certify
    int grid = 201;                // ratio
    double c_pot = 2.0;            // ratio/certify (instances carry their own)
    double c_sat = 1.0;            // certify: Erb saturation constant C
    double bound_a = 1.0;          // certify: kinetic weight
    double bound_b = 1.0;          // certify: potential weight
    std::optional<std::uint64_t> seed;
    std::uint64_t mc_samples = 100000;
    int truncation = 16;           // oracle/certify
    int restarts = 32;             // oracle
    int degree = 4;                // verify
    int relation_k = 3;            // verify
    std::optional<double> tol;     // solver overrides
    std::optional<double> gap_tol;
};

namespace detail {

inline SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions opt;
    if (cfg.tol) opt.tol = *cfg.tol;
    if (cfg.gap_tol) opt.gap_tol = *cfg.gap_tol;
    return opt;
}

inline const char* status_name(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::NotConverged: return "not-converged";
    }
    return "?";
}

class OutputStream {
public:
    explicit OutputStream(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

inline void write_instance_header(std::ostream& os, const RunConfig& cfg,
                                  const RotorInstance& inst) {
    os << "instance " << cfg.instance_path << '\n';
    os << "n " << inst.n << '\n';
    os << "k " << inst.k << '\n';
    os << "a " << fmt17(inst.a) << '\n';
    os << "b " << fmt17(inst.b) << '\n';
    os << "c_pot " << fmt17(inst.c_pot) << '\n';
    os << "edges " << inst.edges.size() << '\n';
}

inline int run_solve(const RunConfig& cfg) {
    RotorInstance inst = load_instance(cfg.instance_path);
    SdpProblem problem = cfg.full_form ? build_full(inst)
                                       : build_reduced(inst, {cfg.time_reversal});
    if (!cfg.dump_sdp_path.empty()) {
        std::ofstream dump(cfg.dump_sdp_path);
        if (!dump) throw std::runtime_error("cannot open dump file: " + cfg.dump_sdp_path);
        write_problem(dump, problem);
    }
    SdpSolution sol = solve(problem, solve_options(cfg));

    OutputStream out(cfg.output_path);
    std::ostream& os = out.get();
    os << "qrotor-solve v1\n";
    write_instance_header(os, cfg, inst);
    os << "form " << (cfg.full_form ? "full" : "reduced") << '\n';
    os << "status " << status_name(sol.status) << '\n';
    os << "sdp_value " << fmt17(sol.primal_value) << '\n';
    os << "dual_value " << fmt17(sol.dual_value) << '\n';
    os << "constraint_inf_norm " << fmt17(sol.residuals.constraint_inf_norm) << '\n';
    os << "min_eigenvalue " << fmt17(sol.residuals.min_eigenvalue) << '\n';
    os << "duality_gap " << fmt17(sol.residuals.duality_gap) << '\n';
    os << "iterations " << sol.iterations << '\n';
    if (!cfg.full_form) {
        ReducedMoment rm = extract_reduced(inst, sol.x);
        for (int v = 0; v < inst.n; ++v)
            os << "vertex " << v << " L " << fmt17(rm.lqq[v]) << " K " << fmt17(rm.kxq[v])
               << '\n';
        for (const auto& [vw, blk] : rm.cross)
            os << "pair " << vw.first << ' ' << vw.second << " Bxx " << fmt17(blk(0, 0))
               << " Bxq " << fmt17(blk(0, 1)) << " Bqx " << fmt17(blk(1, 0)) << " Bqq "
               << fmt17(blk(1, 1)) << '\n';
    }
    return sol.status == SdpStatus::Optimal ? 0 : 3;
}

inline int run_round(const RunConfig& cfg) {
    if (!cfg.seed) throw InstanceError("round: --seed is required");
    RotorInstance inst = load_instance(cfg.instance_path);
    SdpSolution sol = solve(build_reduced(inst, {cfg.time_reversal}), solve_options(cfg));
    if (sol.status != SdpStatus::Optimal) {
        std::cerr << "round: SDP did not converge (status "
                  << status_name(sol.status) << ")\n";
        return 3;
    }
    ReducedMoment rm = extract_reduced(inst, sol.x);
    KineticMode mode = cfg.time_reversal ? KineticMode::closed_form : KineticMode::wick;
    RoundReport report = rounded_value(inst, rm, {cfg.mc_samples, *cfg.seed}, mode);

    OutputStream out(cfg.output_path);
    std::ostream& os = out.get();
    os << "qrotor-round v1\n";
    write_instance_header(os, cfg, inst);
    os << "seed " << *cfg.seed << '\n';
    os << "samples " << cfg.mc_samples << '\n';
    os << "kinetic_mode " << (mode == KineticMode::closed_form ? "closed_form" : "wick")
       << '\n';
    os << "sdp_value " << fmt17(report.sdp_value) << '\n';
    os << "rounded_value " << fmt17(report.rounded_value) << '\n';
    os << "rounded_std_err " << fmt17(report.rounded_std_err) << '\n';
    os << "validity_margin " << fmt17(report.validity_margin) << '\n';
    os << "k_ratio " << fmt17(report.k_ratio) << '\n';
    os << "ratios_reported " << (report.ratios_reported ? 1 : 0) << '\n';
    for (const auto& vr : report.vertices) {
        os << "vertex " << vr.v << " sdp " << fmt17(vr.sdp_term) << " rounded "
           << fmt17(vr.rounded) << " defect " << fmt17(vr.proportionality_defect);
        if (report.ratios_reported && std::abs(vr.sdp_term) > 1e-12)
            os << " ratio " << fmt17(vr.rounded / vr.sdp_term);
        os << '\n';
    }
    for (const auto& er : report.edges) {
        os << "edge " << er.u << ' ' << er.v << " weight " << fmt17(er.weight) << " t "
           << fmt17(er.t) << " sdp " << fmt17(er.sdp_term) << " rounded "
           << fmt17(er.rounded) << " std_err " << fmt17(er.std_err);
        if (report.ratios_reported && std::abs(er.sdp_term) > 1e-12)
            os << " ratio " << fmt17(er.rounded / er.sdp_term);
        os << '\n';
    }
    return 0;
}

inline int run_oracle(const RunConfig& cfg) {
    if (!cfg.seed) throw InstanceError("oracle: --seed is required");
    RotorInstance inst = load_instance(cfg.instance_path);
    if (inst.k != 2) throw InstanceError("oracle: only k = 2 instances are supported");
    TruncatedHamiltonian h = hamiltonian_k2(inst, cfg.truncation);
    OracleResult res;
    try {
        res = ground_energy(h);
    } catch (const std::runtime_error& e) {
        std::cerr << "oracle: eigensolver did not converge: " << e.what() << '\n';
        return 3;
    }
    ProductStateResult prod = product_state_k2(inst, cfg.truncation, cfg.restarts, *cfg.seed);
    res.product_energy = prod.energy;
    res.product_converged = prod.converged;

    OutputStream out(cfg.output_path);
    std::ostream& os = out.get();
    os << "qrotor-oracle v1\n";
    write_instance_header(os, cfg, inst);
    os << "truncation " << res.cutoff << '\n';
    os << "dimension " << h.dim << '\n';
    os << "seed " << *cfg.seed << '\n';
    os << "restarts " << cfg.restarts << '\n';
    os << "ground_energy " << fmt17(res.ground_energy) << '\n';
    os << "spectral_gap " << fmt17(res.spectral_gap) << '\n';
    os << "convergence_delta " << fmt17(res.convergence_delta) << '\n';
    os << "product_energy " << fmt17(res.product_energy) << '\n';
    os << "product_energy_kind upper-bound-heuristic\n";
    os << "product_converged " << (res.product_converged ? 1 : 0) << '\n';
    return 0;
}

inline int run_ratio(const RunConfig& cfg) {
    if (!cfg.seed) throw InstanceError("ratio: --seed is required");
    if (cfg.k < 2) throw InstanceError("ratio: need --k >= 2");
    McOptions mc{cfg.mc_samples, *cfg.seed};
    AlphaBov ab = alpha_bov(cfg.k, cfg.grid, cfg.c_pot, mc);
    double k_ratio = double(cfg.k) / (cfg.k - 1);

    OutputStream out(cfg.output_path);
    std::ostream& os = out.get();
    os << "qrotor-ratio v1\n";
    os << "k " << cfg.k << '\n';
    os << "grid " << cfg.grid << '\n';
    os << "samples " << cfg.mc_samples << '\n';
    os << "seed " << *cfg.seed << '\n';
    os << "c_pot " << fmt17(cfg.c_pot) << '\n';
    os << "alpha_bov " << fmt17(ab.alpha) << '\n';
    os << "alpha_bov_std_err " << fmt17(ab.std_err) << '\n';
    os << "t_at_max " << fmt17(ab.t_at_max) << '\n';
    os << "k_ratio " << fmt17(k_ratio) << '\n';
    os << "alpha_k " << fmt17(std::max(ab.alpha, k_ratio)) << '\n';
    os << "curve\n";
    write_ratio_csv(os, cfg.k, mc, ab.curve);
    return 0;
}

inline int run_verify(const RunConfig& cfg) {
    if (cfg.relation_k < 2) throw InstanceError("verify: need --k >= 2");
    if (cfg.degree < 1) throw InstanceError("verify: need --degree >= 1");
    OutputStream out(cfg.output_path);
    std::ostream& os = out.get();
    bool all_hold = true;
    for (RelationId id : relation_catalogue()) {
        RelationReport r = check_relation(id, cfg.relation_k, cfg.degree);
        os << r.to_line() << '\n';
        all_hold = all_hold && r.holds;
    }
    return all_hold ? 0 : 1;
}

inline void write_certificate(std::ostream& os, const std::string& name,
                              const UncertaintyCertificate& cert) {
    for (const auto& b : cert.blocks)
        os << name << " block " << b.label << " det " << fmt17(b.determinant) << " min_eig "
           << fmt17(b.min_eigenvalue) << '\n';
    os << name << " implied_bound " << fmt17(cert.implied_bound) << '\n';
    os << name << " ok " << (cert.ok ? 1 : 0) << '\n';
    for (const auto& f : cert.flags) os << name << " flag " << f << '\n';
}

inline int run_certify(const RunConfig& cfg) {
    if (!cfg.seed) throw InstanceError("certify: --seed is required");
    OutputStream out(cfg.output_path);
    std::ostream& os = out.get();
    os << "qrotor-certify v1\n";
    os << "k " << cfg.k << '\n';
    os << "seed " << *cfg.seed << '\n';
    os << "a " << fmt17(cfg.bound_a) << '\n';
    os << "b " << fmt17(cfg.bound_b) << '\n';
    os << "c_pot " << fmt17(cfg.c_pot) << '\n';
    os << "c_sat " << fmt17(cfg.c_sat) << '\n';

    // warm-up certificates
    write_certificate(os, "bloch",
                      bloch_certificate(Eigen::Vector2cd(1.0, 0.0)));
    write_certificate(os, "heisenberg",
                      heisenberg_certificate({0, 0, 0.5, 0.5, 0, 1.0}));
    os << "qmc_product_edge " << fmt17(qmc_product_edge().value) << '\n';

    // product-state bounds and the C-dependence of the ratio
    ScalarOptimum lower = prod_lower(cfg.k, cfg.bound_a, cfg.bound_b, cfg.c_pot);
    ScalarOptimum curve = entangled_curve(cfg.k, cfg.bound_a, cfg.bound_b, cfg.c_sat,
                                          cfg.c_pot);
    os << "prod_lower " << fmt17(lower.value) << " s " << fmt17(lower.s) << " t "
       << fmt17(lower.t) << '\n';
    os << "entangled_curve " << fmt17(curve.value) << " t " << fmt17(curve.t) << '\n';
    for (double c_sat : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        ProdRatio pr = prod_ratio(cfg.k, c_sat, cfg.c_pot);
        os << "prod_ratio C " << fmt17(c_sat) << " ratio " << fmt17(pr.ratio) << " a_at_max "
           << fmt17(pr.a_at_max) << '\n';
    }

    if (cfg.k == 2) {
        // Erb inequality and spherical certificates over random states
        int violations = 0;
        double min_margin = std::numeric_limits<double>::infinity();
        double min_block_eig = std::numeric_limits<double>::infinity();
        int count = 1000;
        for (int s = 0; s < count; ++s) {
            WavefunctionMoments wm =
                random_wavefunction_moments(cfg.truncation, *cfg.seed + s);
            double margin = wm.delta - erb_rhs(wm.spherical.t, 2);
            min_margin = std::min(min_margin, margin);
            if (margin < -1e-9) ++violations;
            UncertaintyCertificate cert = spherical_certificate(wm.spherical);
            for (const auto& b : cert.blocks)
                min_block_eig = std::min(min_block_eig, b.min_eigenvalue);
            if (!cert.ok) ++violations;
        }
        os << "erb_checked " << count << '\n';
        os << "erb_violations " << violations << '\n';
        os << "erb_min_margin " << fmt17(min_margin) << '\n';
        os << "spherical_min_block_eig " << fmt17(min_block_eig) << '\n';
        write_certificate(os, "spherical_example",
                          spherical_certificate(
                              random_wavefunction_moments(cfg.truncation, *cfg.seed)
                                  .spherical));
        if (violations > 0) return 1;
    }
    return 0;
}

}  // namespace detail

inline int run(const RunConfig& cfg) {
    try {
        switch (cfg.command) {
            case Command::solve: return detail::run_solve(cfg);
            case Command::round: return detail::run_round(cfg);
            case Command::oracle: return detail::run_oracle(cfg);
            case Command::ratio: return detail::run_ratio(cfg);
            case Command::verify: return detail::run_verify(cfg);
            case Command::certify: return detail::run_certify(cfg);
        }
    } catch (const InstanceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace qrotor
