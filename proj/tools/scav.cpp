// scav: batch front end for the scavenger toolkit.
#include "scav/app/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Energy-scavenger power electronics toolkit"};
    app.set_version_flag("--version", scav::kVersion);
    app.require_subcommand(1);

    scav::app::CliOptions opt;
    std::string out;
    double dt = 0.0;
    app.add_option("--out", out, "Output directory (default: $" + std::string(scav::app::kOutRootEnv) +
                                     "/<config name>)");
    auto* dt_opt = app.add_option("--dt", dt, "Override the time step [s]")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", opt.quiet, "Print nothing on success");

    std::string target;
    auto* sim = app.add_subcommand("simulate", "Run one scenario");
    sim->add_option("config", target, "Scenario config")->required();
    auto* swp = app.add_subcommand("sweep", "Run the [sweep] section of a scenario");
    swp->add_option("config", target, "Scenario config")->required();
    auto* rep = app.add_subcommand("report", "Regenerate plots and summary from a run directory");
    rep->add_option("dir", target, "Run directory")->required();
    for (auto* sub : {sim, swp, rep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (!out.empty()) opt.out = out;
    if (dt_opt->count()) opt.dt = dt;

    if (sim->parsed()) return scav::app::cmd_simulate(target, opt);
    if (swp->parsed()) return scav::app::cmd_sweep(target, opt);
    return scav::app::cmd_report(target, opt);
}
