// ftrend: fit, bootstrap, project and calibrate forced temperature trends from one JSON config.

#include "ftrend/experiments/recipes.hpp"
#include "ftrend/version.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

enum Exit : int { ok = 0, usage = 1, data = 2, numerical = 3 };

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::string> overrides;
    bool json_errors = false;
    bool dry_run = false;
    int verbosity = 0;
};

int fail(const Flags& f, int code, const std::string& kind, const std::vector<std::string>& messages) {
    if (f.json_errors) {
        nlohmann::json j = {{"error", kind}, {"exit_code", code}, {"messages", messages}};
        std::cerr << j.dump() << '\n';
    } else {
        std::cerr << "ftrend: " << kind << " error\n";
        for (const auto& m : messages) std::cerr << "  " << m << '\n';
    }
    return code;
}

int run(const std::string& command, const Flags& f) {
    using namespace ftrend;
    using namespace ftrend::experiments;
    try {
        nlohmann::json j = f.config.empty() ? nlohmann::json::object() : read_config_json(f.config);
        for (const auto& o : f.overrides) apply_override(j, o);
        if (f.seed) j["seed"] = *f.seed;
        if (!f.out.empty()) j["output_dir"] = f.out;
        auto res = validate_config(j, command);
        if (!res.config) return fail(f, usage, "config", res.errors);
        const auto& cfg = *res.config;
        if (f.dry_run) {
            std::cout << nlohmann::json(cfg).dump(2) << '\n';
            return ok;
        }
        if (f.verbosity > 0) {
            std::cerr << "ftrend " << command << ": seed " << cfg.seed << ", " << cfg.replicates << " replicates, "
                      << f.threads << " threads -> " << cfg.output_dir << '\n';
        }
        auto results = run_command(command, cfg, {f.threads});
        std::cout << "seed " << cfg.seed << '\n' << "wrote " << cfg.output_dir << '\n';
        if (f.verbosity > 1) std::cout << results.dump(2) << '\n';
        return ok;
    } catch (const ConfigError& e) {
        return fail(f, usage, "config", e.errors());
    } catch (const DataError& e) {
        return fail(f, data, "data", {e.what()});
    } catch (const NumericalError& e) {
        return fail(f, numerical, "numerical", {e.what()});
    } catch (const std::invalid_argument& e) {
        return fail(f, usage, "usage", {e.what()});
    } catch (const std::exception& e) {
        return fail(f, numerical, "numerical", {e.what()});
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forced-trend fitting and uncertainty experiments", "ftrend"};
    app.set_version_flag("--version", ftrend::version);
    app.require_subcommand(1, 1);
    Flags f;
    const std::vector<std::pair<std::string, std::string>> subs = {
        {"fit", "trend fit, noise selection, residual spectrum and bootstrap intervals"},
        {"project", "mean-response bands under the spliced scenario"},
        {"bootstrap", "parametric bootstrap of the two-step fit"},
        {"learn", "lambda_a intervals as the record grows"},
        {"calibrate", "p-value calibration of trend tests on trendless noise"},
        {"spectrum", "residual periodogram and model spectra"},
        {"simulate", "draw series from the configured noise model"},
        {"tcr", "transient climate response with bootstrap interval"},
        {"scale-forcing", "refits with rescaled anthropogenic forcing"},
        {"ensemble", "refit every member of a temperature ensemble"},
    };
    for (const auto& [name, help] : subs) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("-c,--config", f.config, "JSON config file")->check(CLI::ExistingFile);
        s->add_option("--seed", f.seed, "override the config seed");
        s->add_option("-o,--out", f.out, "override the output directory");
        s->add_option("-j,--threads", f.threads, "worker threads (results do not depend on this)")
            ->check(CLI::PositiveNumber);
        s->add_option("--override", f.overrides, "key.path=value, repeatable");
        s->add_flag("--json-errors", f.json_errors, "report errors as JSON on stderr");
        s->add_flag("--dry-run", f.dry_run, "print the effective config and exit");
        s->add_flag("-v,--verbose", f.verbosity, "more output; repeat for the results JSON");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : usage;
    }
    return run(app.get_subcommands().front()->get_name(), f);
}
