#include "pondera/config.hpp"
#include "pondera/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"pondera - optomechanical cavity noise-spectrum engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format;
    long seed = -1;

    const std::vector<std::string> commands = {"spectrum", "cancel", "map",
                                               "squeeze", "stability",
                                               "validate"};
    const std::vector<std::string> blurbs = {
        "1-D homodyne spectrum with the four-way noise decomposition",
        "cancellation ratio and normalized response curves",
        "detuning-phase or jitter map",
        "squeezing report: sub-shot-noise bands, minimum, optimal phase",
        "detuning sweep of the drift-matrix eigenvalues",
        "run the frequency- and time-domain validation suite"};
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i], blurbs[i]);
        sub->add_option("--config", config_path, "key = value configuration file")
            ->required();
        sub->add_option("--out", out_path, "output path (default: stdout)");
        sub->add_option("--format", format, "csv or json (overrides config)");
        sub->add_option("--seed", seed, "random seed (overrides config)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        pondera::RunConfig cfg = pondera::load_config(config_path);
        if (!out_path.empty()) cfg.out_path = out_path;
        if (!format.empty()) {
            if (format != "csv" && format != "json") {
                std::cerr << "error: --format must be csv or json\n";
                return pondera::exit_config_error;
            }
            cfg.format = format;
        }
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        return pondera::run_command(command, cfg, std::cerr);
    } catch (const pondera::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return pondera::exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pondera::exit_validation_failure;
    }
}
