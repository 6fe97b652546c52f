// sar_quad: run search missions from a config file.
//
//   sar_quad simulate <config> [--seed N] [--out DIR]
//   sar_quad compare  <config> [--profiles ssd,haar,hog] [--seed N] [--out DIR]
//   sar_quad sweep    <config> --param KEY --values V1,V2,... [--seed N] [--out DIR]

#include "sarquad/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Quadcopter search-and-rescue mission simulator"};
    app.set_version_flag("--version", SARQUAD_VERSION);
    app.require_subcommand(1);

    sarquad::CommandOptions options;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;

    auto common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "Mission config file")->required();
        sub->add_option("--seed", seed, "Override the config's seed");
        sub->add_option("--out", out_dir, "Output directory");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Run one mission");
    common(simulate);

    std::vector<std::string> profiles{"ssd", "haar", "hog"};
    CLI::App* compare = app.add_subcommand("compare", "Run the mission once per detector profile");
    common(compare);
    compare->add_option("--profiles", profiles, "Comma-separated profile presets")->delimiter(',');

    std::string param;
    std::vector<std::string> values;
    CLI::App* sweep = app.add_subcommand("sweep", "Run the mission once per parameter value");
    common(sweep);
    sweep->add_option("--param", param, "Config key to vary")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? sarquad::kExitOk : sarquad::kExitFailure;
    }

    options.config_path = config_path;
    for (CLI::App* sub : {simulate, compare, sweep}) {
        if (sub->count("--seed")) options.seed = seed;
        if (sub->count("--out")) options.out_dir = out_dir;
    }

    if (*simulate) return sarquad::cmd_simulate(options, std::cout, std::cerr);
    if (*compare) return sarquad::cmd_compare(options, profiles, std::cout, std::cerr);
    return sarquad::cmd_sweep(options, param, values, std::cout, std::cerr);
}
