// qrotor: certified bounds, rounding, and verification for the quantum
// rotor model. See README.md for the report formats.

#include <CLI11.hpp>

#include "qrotor/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bounds and certificates for the quantum rotor model"};
    app.require_subcommand(1);
    qrotor::RunConfig cfg;
    std::uint64_t seed_value = 0;
    double tol_value = 0.0, gap_value = 0.0;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_value, "random seed (counter-based streams)")
            ->required();
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", cfg.output_path, "write the report to this file");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve the level-1 moment relaxation");
    solve->add_option("instance", cfg.instance_path, "instance JSON file")->required();
    solve->add_flag("--full", cfg.full_form, "solve the unreduced moment matrix");
    solve->add_flag("!--no-time-reversal", cfg.time_reversal,
                    "keep K_v free instead of pinning it to zero");
    CLI::Option* tol_opt =
        solve->add_option("--tol", tol_value, "solver feasibility tolerance");
    CLI::Option* gap_opt =
        solve->add_option("--gap-tol", gap_value, "solver duality-gap tolerance");
    solve->add_option("--dump-sdp", cfg.dump_sdp_path, "dump the SDP data to a file");
    add_out(solve);

    CLI::App* round = app.add_subcommand("round", "solve, build the Gaussian state, round");
    round->add_option("instance", cfg.instance_path)->required();
    round->add_option("--samples", cfg.mc_samples, "Monte Carlo samples per edge");
    round->add_flag("!--no-time-reversal", cfg.time_reversal,
                    "keep K_v free (switches kinetic evaluation to wick mode)");
    add_seed(round);
    add_out(round);

    CLI::App* oracle = app.add_subcommand("oracle", "k = 2 exact diagonalization");
    oracle->add_option("instance", cfg.instance_path)->required();
    oracle->add_option("--truncation", cfg.truncation, "Fourier mode cutoff M");
    oracle->add_option("--restarts", cfg.restarts, "mean-field restarts");
    add_seed(oracle);
    add_out(oracle);

    CLI::App* ratio = app.add_subcommand("ratio", "rounding ratio curve and alpha_k");
    ratio->add_option("--k", cfg.k, "rotor dimension")->required();
    ratio->add_option("--samples", cfg.mc_samples, "samples per grid point");
    ratio->add_option("--grid", cfg.grid, "grid points on [-1, 1]");
    ratio->add_option("--c-pot", cfg.c_pot, "potential constant");
    add_seed(ratio);
    add_out(ratio);

    CLI::App* verify = app.add_subcommand("verify", "machine-check operator identities");
    verify->require_subcommand(1);
    CLI::App* algebra = verify->add_subcommand("algebra", "the relation catalogue");
    algebra->add_option("--k", cfg.relation_k, "sphere dimension k")->required();
    algebra->add_option("--degree", cfg.degree, "monomial degree bound");
    add_out(algebra);

    CLI::App* certify = app.add_subcommand("certify", "uncertainty certificates and bounds");
    certify->add_option("--k", cfg.k, "rotor dimension");
    certify->add_option("--truncation", cfg.truncation, "wavefunction cutoff (k = 2)");
    certify->add_option("--a", cfg.bound_a, "kinetic weight for the bound report");
    certify->add_option("--b", cfg.bound_b, "potential weight for the bound report");
    certify->add_option("--C", cfg.c_sat, "Erb saturation constant");
    certify->add_option("--c-pot", cfg.c_pot, "potential constant");
    add_seed(certify);
    add_out(certify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (tol_opt->count() > 0) cfg.tol = tol_value;
    if (gap_opt->count() > 0) cfg.gap_tol = gap_value;
    if (solve->parsed()) cfg.command = qrotor::Command::solve;
    if (round->parsed()) cfg.command = qrotor::Command::round;
    if (oracle->parsed()) cfg.command = qrotor::Command::oracle;
    if (ratio->parsed()) cfg.command = qrotor::Command::ratio;
    if (verify->parsed()) cfg.command = qrotor::Command::verify;
    if (certify->parsed()) cfg.command = qrotor::Command::certify;
    if (round->parsed() || oracle->parsed() || ratio->parsed() || certify->parsed())
        cfg.seed = seed_value;

    return qrotor::run(cfg);
}
