// itfhsim - command-line front end

#include "itfh/cli/figures.hpp"
#include "itfh/cli/run_config.hpp"
#include "itfh/cli/runner.hpp"
#include "itfh/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

itfh::cli::Override split_assignment(const std::string& kv)
{
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw itfh::ConfigError("--set expects key=value, got '" + kv + "'");
    return {kv.substr(0, eq), kv.substr(eq + 1)};
}

} // namespace

int main(int argc, char** argv)
{
    using namespace itfh::cli;

    CLI::App app{"Optical index modulation (MPPM with FSK/QAM, SPPM) error-rate and efficiency tool.\n"
                 "Environment: ITFH_WORKERS sets the default number of simulation threads."};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> sets;
    app.add_option("-c,--config", config_path, "configuration file (key=value format)");
    app.add_option("--set", sets, "override any configuration key, as key=value (repeatable)");

    std::map<std::string, std::pair<CLI::Option*, std::string>> flags;
    for (const auto& key : config_keys()) {
        if (key.name == "mode" || key.name == "figure")
            continue;
        auto& slot = flags[key.name];
        slot.first = app.add_option("--" + key.name, slot.second, key.help);
    }

    struct Sub {
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {"efficiency", "spectral and asymptotic power efficiency of one scheme"},
        {"plane", "efficiency plane over N, w and alphabet sizes"},
        {"analytic", "analytic error probabilities over the power grid"},
        {"simulate", "Monte Carlo error rates over the power grid"},
        {"validate-waveform", "compare the discrete model against an oversampled waveform receiver"},
    };
    for (const auto& s : subs)
        app.add_subcommand(s.name, s.help);
    std::string figure_name;
    auto* fig = app.add_subcommand("figure", "regenerate the data of a figure preset");
    fig->add_option("name", figure_name, "fig3 or fig5..fig10")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        std::vector<Override> overrides;
        const auto* sub = app.get_subcommands().front();
        overrides.push_back({"mode", sub->get_name()});
        if (sub == fig)
            overrides.push_back({"figure", figure_name});
        for (const auto& kv : sets)
            overrides.push_back(split_assignment(kv));
        for (const auto& [name, slot] : flags)
            if (slot.first->count() > 0)
                overrides.push_back({name, slot.second});

        const RunConfig cfg = config_path.empty() ? parse_config("", "command line", overrides)
                                                  : load_config(config_path, overrides);
        return run(cfg, std::cout, std::cerr);
    } catch (const itfh::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
