#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace slung::cli;

    CLI::App app{"Quadrotor slung-load lifting simulator"};
    app.require_subcommand(1);

    std::string config;
    Overrides ov;
    std::uint64_t seed = 0;
    double dt = 0.0;
    double horizon = 0.0;
    double snr = 0.0;
    int runs = 0;
    std::string out_dir;
    std::string integrator;

    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config, "JSON run configuration (Nominal parameters if omitted)")
            ->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "Random seed");
        cmd->add_option("--dt", dt, "Step size [s]");
        cmd->add_option("--horizon", horizon, "Simulated time [s]");
        cmd->add_option("--snr", snr, "Noise SNR in dB; enables noise");
        cmd->add_option("--out", out_dir, "Output directory");
        cmd->add_option("--integrator", integrator, "rk4 or euler")->check(CLI::IsMember({"rk4", "euler"}));
        cmd->add_flag("--no-noise", ov.no_noise, "Disable noise");
    };

    CLI::App* run = app.add_subcommand("run", "Simulate one lifting mission");
    common(run);
    CLI::App* mc = app.add_subcommand("montecarlo", "Batch of noisy missions");
    common(mc);
    mc->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);

    std::string bundle;
    CLI::App* plots = app.add_subcommand("plots", "Emit figure data and a plotting script for a bundle");
    plots->add_option("bundle", bundle, "Output directory of a run or montecarlo command")->required();

    std::string default_out;
    CLI::App* defaults = app.add_subcommand("default-config", "Print the nominal configuration");
    defaults->add_option("path", default_out, "Write to this file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    auto given = [](CLI::App* cmd, const char* name) { return cmd->count(name) > 0; };
    CLI::App* active = run->parsed() ? run : (mc->parsed() ? mc : nullptr);
    if (active != nullptr) {
        if (given(active, "--seed")) ov.seed = seed;
        if (given(active, "--dt")) ov.dt = dt;
        if (given(active, "--horizon")) ov.horizon = horizon;
        if (given(active, "--snr")) ov.snr = snr;
        if (given(active, "--out")) ov.out = out_dir;
        if (given(active, "--integrator")) ov.integrator = integrator;
        if (active == mc && given(mc, "--runs")) ov.runs = runs;
    }

    if (run->parsed()) return cmd_run(config, ov, std::cout, std::cerr);
    if (mc->parsed()) return cmd_montecarlo(config, ov, std::cout, std::cerr);
    if (plots->parsed()) return cmd_plots(bundle, std::cout, std::cerr);
    return cmd_default_config(default_out, std::cout, std::cerr);
}
