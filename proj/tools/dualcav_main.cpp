#include <CLI11.hpp>

#include "dualcav/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dual-mirror cavity sensitivity, spectrum synthesis and fitting toolkit"};
    app.require_subcommand(1);

    using dualcav::cli::CommandContext;
    CommandContext ctx;
    std::uint64_t seed = 0;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", ctx.config_path, "config file");
        cmd->add_option("--scenario", ctx.scenario,
                        "bundled scenario: paper_defaults, fig2b, fig3c");
        cmd->add_option("--out", ctx.out_dir, "output directory")->required();
        cmd->add_flag("--no-plot", ctx.no_plot, "skip SVG plots");
    };

    CLI::App* budget = app.add_subcommand("budget", "sensitivity-limit curves and dip report");
    add_common(budget);

    CLI::App* campaign =
        app.add_subcommand("campaign", "synthesize an averaged measurement run");
    add_common(campaign);
    CLI::Option* seed_opt =
        campaign->add_option("--seed", seed, "override the campaign RNG seed");

    CLI::App* fit = app.add_subcommand("fit", "fit a thermal doublet to a trace CSV");
    add_common(fit);
    fit->add_option("--trace", ctx.trace_path, "input CSV (freq_hz,asd_m_per_sqrt_hz)")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (!ctx.config_path.empty() && !ctx.scenario.empty()) {
        std::fprintf(stderr, "give either --config or --scenario, not both\n");
        return dualcav::cli::kExitConfig;
    }

    if (budget->parsed()) return dualcav::cli::cmd_budget(ctx);
    if (campaign->parsed()) {
        if (seed_opt->count() > 0) ctx.seed_override = seed;
        return dualcav::cli::cmd_campaign(ctx);
    }
    if (fit->parsed()) return dualcav::cli::cmd_fit(ctx);
    return dualcav::cli::kExitConfig;
}
