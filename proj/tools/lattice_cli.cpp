// Command-line driver: simulate, verify, attractor and converge experiments for the
// nonautonomous lattice system and its periodic truncations.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "lattice/config.hpp"
#include "lattice/error.hpp"
#include "lattice/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "experiment config (INI)")->required();
    cmd->add_option("--out", flags.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", flags.seed, "override run.seed");
    cmd->add_option("--threads", flags.threads, "override run.threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace lattice;
    CLI::App app{"Lattice dynamical system attractor experiments"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* simulate = app.add_subcommand("simulate", "integrate the periodic (2n+1)-system, write trajectory.csv");
    auto* verify = app.add_subcommand("verify", "run the operator, cocycle and energy property suite");
    auto* attractor = app.add_subcommand("attractor", "sample a fiber attractor, write cloud.csv and tail_report.json");
    auto* converge = app.add_subcommand("converge", "beta(I^n, I_ref) convergence study, write convergence.csv");
    for (auto* cmd : {simulate, verify, attractor, converge}) add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : experiment::kConfigError;
    }

    experiment::RunContext ctx;
    ctx.out_dir = flags.out;
    ctx.level = experiment::parse_log_level(std::getenv("LATTICE_LOG"));
    ctx.log = &std::cerr;
    ctx.console = &std::cout;

    try {
        ExperimentConfig cfg = load_config(flags.config);
        if (flags.seed) cfg.seed = *flags.seed;
        if (flags.threads) cfg.threads = *flags.threads;

        experiment::RunResult result;
        if (simulate->parsed()) result = experiment::cmd_simulate(cfg, ctx);
        else if (verify->parsed()) result = experiment::cmd_verify(cfg, ctx);
        else if (attractor->parsed()) result = experiment::cmd_attractor(cfg, ctx);
        else result = experiment::cmd_converge(cfg, ctx);

        if (ctx.level != experiment::LogLevel::Quiet) {
            for (const auto& c : result.report["checks"]) {
                std::cout << (c["passed"].get<bool>() ? "pass " : "FAIL ") << c["name"].get<std::string>();
                if (c.contains("detail")) std::cout << "  (" << c["detail"].get<std::string>() << ")";
                std::cout << '\n';
            }
        }
        return result.exit_code;
    } catch (const DivergenceError& e) {
        std::cerr << "error [divergence at step " << e.step() << "]: " << e.what() << '\n';
        return experiment::kDivergence;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return experiment::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return experiment::kIoError;
    }
}
