// CLI driver: tpns mesh|run|study|check --config <file> [--out <dir>]
// Exit codes: 0 success, 1 usage/config error, 2 solver failure,
// 3 property failure.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tpns/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Projection solver for incompressible flow in an annular sector "
                 "driven by a boundary total-pressure condition"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    for (const std::string name : {"mesh", "run", "study", "check"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file (omit for defaults)");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;  // --help exits 0; any parse failure is a usage error
    }

    return tpns::guarded_command([&]() -> int {
        tpns::RunConfig cfg;
        if (!config_path.empty()) cfg = tpns::parse_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;

        if (app.got_subcommand("mesh")) return tpns::cmd_mesh(cfg);
        if (app.got_subcommand("run")) return tpns::cmd_run(cfg);
        if (app.got_subcommand("study")) return tpns::cmd_study(cfg);
        return tpns::cmd_check(cfg);
    });
}
