#pragma once

// Command-line front end: flag table, config layering and output handling.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcdep/cli/commands.hpp"
#include "hcdep/cli/config.hpp"
#include "hcdep/cli/csv.hpp"

namespace hcdep::cli {

enum class FlagType { uint, integer, number, text, list };

struct FlagSpec {
    const char* name;     ///< without the leading dashes
    const char* pointer;  ///< JSON pointer into the config
    FlagType type;
    const char* help;
};

inline const std::vector<FlagSpec>& flag_table() {
    static const std::vector<FlagSpec> table{
        {"statistic", "/statistic", FlagType::text, "hc | mt"},
        {"range", "/range/form", FlagType::text, "full | loglog | poly | explicit"},
        {"c", "/range/c", FlagType::number, "lower range exponent c"},
        {"d", "/range/d", FlagType::number, "upper range exponent d"},
        {"alpha1", "/range/alpha1", FlagType::number, "explicit lower level (implies --range explicit)"},
        {"alpha2", "/range/alpha2", FlagType::number, "explicit upper level (implies --range explicit)"},
        {"m-trunc", "/range/m_trunc", FlagType::number, "MT truncation M (0: sqrt(2 log p))"},
        {"refine", "/range/refine", FlagType::integer, "MT grid points per jump-free piece"},
        {"p", "/generator/p", FlagType::uint, "dimension"},
        {"n", "/generator/n", FlagType::uint, "sample size (0: z-statistics)"},
        {"dep", "/generator/dependence/kind", FlagType::text, "iid | ar1 | banded"},
        {"rho", "/generator/dependence/rho", FlagType::number, "AR(1) coefficient"},
        {"band", "/generator/dependence/band", FlagType::list, "banded autocorrelations rho_1,...,rho_q"},
        {"marginal", "/generator/marginal/kind", FlagType::text, "gaussian | student_t | pareto_sym"},
        {"df", "/generator/marginal/param", FlagType::number, "Student-t degrees of freedom"},
        {"tail-index", "/generator/marginal/param", FlagType::number, "symmetric Pareto tail index"},
        {"delta", "/generator/marginal/delta", FlagType::number, "moment exponent delta"},
        {"beta", "/generator/alternative/beta", FlagType::number, "sparsity exponent"},
        {"r", "/generator/alternative/r", FlagType::number, "signal strength"},
        {"sign", "/generator/alternative/sign", FlagType::text, "positive | random"},
        {"reps", "/run/replications", FlagType::uint, "replications"},
        {"seed", "/run/seed", FlagType::uint, "master seed"},
        {"grid-size", "/run/grid_size", FlagType::uint, "bridge logit grid size"},
        {"grid-points", "/run/grid_points", FlagType::uint, "covariance / MT limit grid size"},
        {"gamma", "/run/gamma", FlagType::number, "test level"},
        {"calibration", "/run/calibration", FlagType::text, "simulated_null | asymptotic"},
        {"beta-grid", "/power/betas", FlagType::list, "betas, a:b:step or a,b,c"},
        {"r-grid", "/power/rs", FlagType::list, "rs, a:b:step or a,b,c"},
        {"theta", "/boundary/theta", FlagType::number, "trimmed boundary theta"},
        {"eta", "/boundary/eta", FlagType::number, "trimmed boundary eta"},
        {"s", "/boundary/s", FlagType::number, "single-level boundary s"},
        {"d-grid", "/cov_gap/d_values", FlagType::list, "d values"},
        {"lambda-max", "/mdr/lambda_max", FlagType::text, "largest lambda or 'auto'"},
        {"lambda-points", "/mdr/lambda_points", FlagType::uint, "lambda grid intervals"},
        {"quadruples", "/vc/quadruples", FlagType::uint, "random quadruples"},
        {"out", "/output/out", FlagType::text, "CSV path (default stdout)"},
        {"plot", "/output/plot", FlagType::text, "SVG plot path"},
        {"data", "/output/data", FlagType::text, "numeric matrix CSV for hc/mt"},
    };
    return table;
}

inline std::string pointer_field(const std::string& ptr) {
    std::string f = ptr.substr(1);
    std::replace(f.begin(), f.end(), '/', '.');
    return f;
}

inline Json typed_flag_value(const FlagSpec& flag, const std::string& text) {
    const std::string field = pointer_field(flag.pointer);
    try {
        std::size_t used = 0;
        switch (flag.type) {
            case FlagType::uint: {
                if (text.empty() || text[0] == '-') throw std::invalid_argument(text);
                const auto v = std::stoull(text, &used);
                if (used != text.size()) throw std::invalid_argument(text);
                return Json(static_cast<std::uint64_t>(v));
            }
            case FlagType::integer: {
                const auto v = std::stoll(text, &used);
                if (used != text.size()) throw std::invalid_argument(text);
                return Json(static_cast<std::int64_t>(v));
            }
            case FlagType::number: {
                const double v = std::stod(text, &used);
                if (used != text.size()) throw std::invalid_argument(text);
                return Json(v);
            }
            case FlagType::text: return Json(text);
            case FlagType::list: return Json(parse_list(field, text));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(field, "cannot parse '" + text + "' for --" + flag.name);
    }
    return Json();
}

/// Defaults for the command, patched by the config file, then by flags.
inline ExperimentConfig resolve_config(const std::string& command, const std::optional<std::string>& config_path,
                                       const std::map<std::string, std::string>& flags) {
    Json j = command_defaults(command);
    if (config_path) {
        Json file = load_json_file(*config_path);
        if (!file.is_object()) throw ConfigError("config", "top level must be an object");
        if (file.contains("command") && file["command"] != command)
            throw ConfigError("command", "config file is for '" + file["command"].dump() + "'");
        j.merge_patch(file);
    }
    const auto& table = flag_table();
    for (const auto& [name, value] : flags) {
        const auto it = std::find_if(table.begin(), table.end(), [&](const FlagSpec& f) { return name == f.name; });
        if (it == table.end()) throw ConfigError(name, "unknown flag");
        const std::string ptr = it->pointer;
        if (ptr.rfind("/generator/alternative/", 0) == 0 && j["generator"]["alternative"].is_null()) {
            const AlternativeConfig a;
            j["generator"]["alternative"] = {{"beta", a.beta}, {"r", a.r}, {"sign", a.sign}};
        }
        j[Json::json_pointer(ptr)] = typed_flag_value(*it, value);
    }
    if (!flags.count("range") && (flags.count("alpha1") || flags.count("alpha2"))) j["range"]["form"] = "explicit";
    if (!flags.count("marginal")) {
        if (flags.count("df")) j["generator"]["marginal"]["kind"] = "student_t";
        if (flags.count("tail-index")) j["generator"]["marginal"]["kind"] = "pareto_sym";
    }
    auto cfg = from_json(j);
    validate(cfg);
    return cfg;
}

inline const std::vector<std::pair<std::string, std::string>>& subcommands() {
    static const std::vector<std::pair<std::string, std::string>> list{
        {"hc", "higher criticism statistic per replication or on --data"},
        {"mt", "multi-level thresholding statistic per replication or on --data"},
        {"null-dist", "null law against the limit supremum and the Gumbel law"},
        {"bridge-sup", "normalized bridge suprema and their Gumbel distance"},
        {"cov-gap", "dependent vs independent covariance discrepancy over d"},
        {"boundary", "detection boundary table over a beta grid"},
        {"power", "rejection rates over a (beta, r) grid"},
        {"mdr-check", "t-statistic tail ratio against the Gaussian tail"},
        {"vc-check", "subgraph shattering counts for the step family"},
    };
    return list;
}

/// Writes the table (and plot) for a resolved config. Files go through a
/// temporary name so a failure leaves nothing behind.
inline void emit(const ExperimentConfig& cfg, const CommandResult& res, std::ostream& stdout_stream,
                 std::ostream& log_stream) {
    const std::string config_json = to_json(cfg).dump();
    std::optional<AtomicFile> plot_file;
    if (res.plot && !cfg.plot.empty()) {
        plot_file.emplace(cfg.plot);
        res.plot(plot_file->stream());
    }
    if (cfg.out.empty()) {
        write_csv(stdout_stream, res.table, cfg.command, config_json);
        stdout_stream.flush();
    } else {
        AtomicFile f(cfg.out);
        write_csv(f.stream(), res.table, cfg.command, config_json);
        if (plot_file) plot_file->commit();
        f.commit();
    }
    if (plot_file && cfg.out.empty()) plot_file->commit();
    write_summary(log_stream, res.table);
}

inline int run_main(int argc, char** argv) {
    CLI::App app{"hcdep: higher criticism and multi-level thresholding under dependence"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::map<std::string, std::string> values;
    std::string config_path;
    unsigned threads = 0;
    std::vector<CLI::App*> subs;
    for (const auto& [name, desc] : subcommands()) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--threads", threads, "worker threads (0: $HCDEP_THREADS or hardware)");
        for (const auto& f : flag_table())
            sub->add_option_function<std::string>(
                std::string("--") + f.name, [&values, n = f.name](const std::string& v) { values[n] = v; }, f.help);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::string command;
        for (auto* s : subs)
            if (s->parsed()) command = s->get_name();
        const auto cfg = resolve_config(command, config_path.empty() ? std::nullopt : std::optional(config_path), values);
        const auto res = run_command(cfg, threads);
        emit(cfg, res, std::cout, std::cerr);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace hcdep::cli
