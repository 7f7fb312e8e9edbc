// Command line front end: run a Monte Carlo sweep, lint a config, or run the
// brute-force verification suite.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irs_cr/harness.hpp"
#include "oracle/suite.hpp"

namespace {

std::vector<irs_cr::Design> parse_design_list(const std::vector<std::string>& names)
{
    std::vector<irs_cr::Design> out;
    for (const auto& name : names) {
        const auto d = irs_cr::parse_design(name);
        if (!d)
            throw irs_cr::ConfigError("--designs: unknown design '" + name + "'");
        out.push_back(*d);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"IRS-assisted spectrum sharing simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_path;
    std::vector<std::string> designs;
    std::optional<int> setup;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::string summary_path;

    auto* run = app.add_subcommand("run", "Run a sweep and write one CSV row per (design, P_max, trial)");
    run->add_option("config", config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("output", output_path, "CSV output path")->required();
    run->add_option("--designs", designs, "Comma-separated design subset")->delimiter(',');
    run->add_option("--setup", setup, "Override the setup (1, 2 or 3)");
    run->add_option("--trials", trials, "Override the trial count");
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--workers", workers, "Worker threads");
    run->add_option("--summary", summary_path, "Also write a mean/stderr table ('-' for stdout)");

    bool dump = false;
    auto* validate = app.add_subcommand("validate", "Check a config and report the first invalid field");
    validate->add_option("config", config_path, "Scenario config (JSON)")->required();
    validate->add_flag("--dump", dump, "Print the config with all defaults filled in");

    std::uint64_t oracle_seed = 20240607;
    auto* oracle_cmd = app.add_subcommand("oracle", "Run the small-N brute-force verification suite");
    oracle_cmd->add_option("--seed", oracle_seed, "Seed for the random instances");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            irs_cr::ScenarioConfig config = irs_cr::load_config(config_path);
            if (!designs.empty())
                config.designs = parse_design_list(designs);
            if (setup)
                config.setup_id = *setup;
            if (trials)
                config.trials = *trials;
            if (seed)
                config.master_seed = *seed;
            if (workers)
                config.workers = *workers;
            config.validate();

            const auto records = irs_cr::run_sweep(config);
            irs_cr::write_results(records, output_path);
            if (!summary_path.empty()) {
                const std::string table = irs_cr::format_summary(irs_cr::summarize(records));
                if (summary_path == "-") {
                    std::cout << table;
                } else {
                    std::ofstream out(summary_path);
                    out << table;
                    if (!out)
                        throw std::runtime_error("cannot write " + summary_path);
                }
            }
            std::cerr << "wrote " << records.size() << " records to " << output_path << "\n";
            return 0;
        }
        if (*validate) {
            const irs_cr::ScenarioConfig config = irs_cr::load_config(config_path);
            if (dump)
                std::cout << irs_cr::dump_config(config);
            else
                std::cout << config_path << ": ok\n";
            return 0;
        }
        if (*oracle_cmd) {
            const auto checks = oracle::run_oracle_suite(oracle_seed);
            bool all = true;
            for (const auto& c : checks) {
                std::cout << oracle::format_check(c) << "\n";
                all = all && c.pass;
            }
            return all ? 0 : 1;
        }
    } catch (const irs_cr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
