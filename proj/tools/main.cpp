#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "cfbounds/config.hpp"
#include "cfbounds/experiments.hpp"

namespace {

int fail(const std::string& type, const std::string& message, int code) {
    nlohmann::json err = {{"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    return code;
}

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> periods;
    std::optional<long long> mc_draws;
};

std::string execute(const std::string& command, const Options& opts) {
    cfbounds::ExperimentConfig cfg = cfbounds::ExperimentConfig::load(opts.config);
    if (cfg.experiment() != command) {
        throw cfbounds::ConfigError("config is for experiment '" + cfg.experiment() + "' but the command is '" +
                                    command + "'");
    }
    if (opts.seed) cfg.set_seed(*opts.seed);
    if (opts.periods) cfg.set("t_prime", std::to_string(*opts.periods));
    if (opts.mc_draws) cfg.set("mc_draws", std::to_string(*opts.mc_draws));
    const std::string body =
        command == "bounds_query" ? cfbounds::run_bounds_query(cfg) : cfbounds::run_experiment(cfg).render(cfg);
    const std::string out = opts.out.empty() ? cfg.get_string("out", "") : opts.out;
    if (out.empty()) {
        std::cout << body;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write '" + out + "'");
        f << body;
        if (!f) throw std::runtime_error("failed writing '" + out + "'");
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterfactual bounds for nonlinear panel models with fixed effects"};
    app.require_subcommand(1);
    Options opts;
    for (const auto& id : cfbounds::ExperimentConfig::experiments()) {
        CLI::App* sub = app.add_subcommand(id, "run the " + id + " experiment");
        sub->add_option("--config", opts.config, "experiment config file")->required();
        sub->add_option("--out", opts.out, "output path (default: config 'out', else stdout)");
        sub->add_option("--seed", opts.seed, "override the config seed");
        sub->add_option("--periods", opts.periods, "use periods 1..T' only");
        sub->add_option("--mc-draws", opts.mc_draws, "Monte Carlo draws of the regressors");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        execute(command, opts);
    } catch (const cfbounds::ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const std::invalid_argument& e) {
        return fail("invalid_input", e.what(), 3);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 1);
    }
    return 0;
}
