#pragma once

// Experiment configuration: nested JSON sections, command-specific defaults,
// file values, then flag overrides, validated into typed objects.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcdep/boundary.hpp"
#include "hcdep/datagen.hpp"
#include "hcdep/errors.hpp"
#include "hcdep/experiment.hpp"
#include "hcdep/limits.hpp"
#include "hcdep/statistics.hpp"

namespace hcdep::cli {

using Json = nlohmann::ordered_json;

enum class RangeForm { full, loglog, poly, explicit_levels };

inline RangeForm parse_range_form(const std::string& s) {
    if (s == "full") return RangeForm::full;
    if (s == "loglog") return RangeForm::loglog;
    if (s == "poly") return RangeForm::poly;
    if (s == "explicit") return RangeForm::explicit_levels;
    throw ConfigError("range.form", "expected full|loglog|poly|explicit, got '" + s + "'");
}

inline std::string to_string(RangeForm f) {
    switch (f) {
        case RangeForm::full: return "full";
        case RangeForm::loglog: return "loglog";
        case RangeForm::poly: return "poly";
        case RangeForm::explicit_levels: return "explicit";
    }
    return "";
}

struct RangeConfig {
    RangeForm form = RangeForm::loglog;
    double c = 1.0;
    double d = 2.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double m_trunc = 0.0;  ///< 0 selects sqrt(2 log p)
    int refine = kDefaultMtRefine;
};

struct DependenceConfig {
    std::string kind = "iid";
    double rho = 0.0;
    std::vector<double> band;
};

struct MarginalConfig {
    std::string kind = "gaussian";
    double param = 0.0;
    double delta = 1.0;
};

struct AlternativeConfig {
    double beta = 0.7;
    double r = 0.0;
    std::string sign = "random";
};

struct ExperimentConfig {
    std::string command;
    std::string statistic = "hc";
    RangeConfig range;
    std::size_t p = 1000;
    std::size_t n = 0;  ///< 0: test statistics drawn directly as z; >= 2: t-statistics of an n x p panel
    DependenceConfig dependence;
    MarginalConfig marginal;
    std::optional<AlternativeConfig> alternative;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    std::size_t grid_size = 4096;
    std::size_t grid_points = 64;
    double gamma = 0.05;
    std::string calibration = "simulated_null";
    std::vector<double> betas;
    std::vector<double> rs;
    double theta = 0.5;
    double eta = 0.0;
    double s = 1.0;
    std::vector<double> d_values;
    std::string lambda_max = "auto";
    std::size_t lambda_points = 50;
    std::size_t quadruples = 500;
    std::string out;
    std::string plot;
    std::string data;
};

// ---------------------------------------------------------------------------
// Lists: "a:b:step" or "x,y,z".

inline std::vector<double> parse_list(const std::string& field, const std::string& text) {
    std::vector<double> out;
    auto num = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(field, "not a number: '" + s + "'");
        }
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() != 3) throw ConfigError(field, "range syntax is start:stop:step");
        const double a = num(parts[0]);
        const double b = num(parts[1]);
        const double step = num(parts[2]);
        if (!(step > 0.0) || !(b >= a)) throw ConfigError(field, "need stop >= start and step > 0");
        const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9));
        // Snap to 12 decimals so 0.55:0.95:0.05 yields 0.6 rather than 0.6000000000000001.
        for (long i = 0; i <= count; ++i) out.push_back(std::round((a + step * static_cast<double>(i)) * 1e12) / 1e12);
        return out;
    }
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');)
        if (!part.empty()) out.push_back(num(part));
    if (out.empty()) throw ConfigError(field, "empty list");
    return out;
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const ExperimentConfig& c) {
    Json j;
    j["command"] = c.command;
    j["statistic"] = c.statistic;
    j["range"] = {{"form", to_string(c.range.form)}, {"c", c.range.c},           {"d", c.range.d},
                  {"alpha1", c.range.alpha1},        {"alpha2", c.range.alpha2}, {"m_trunc", c.range.m_trunc},
                  {"refine", c.range.refine}};
    Json gen;
    gen["p"] = c.p;
    gen["n"] = c.n;
    gen["dependence"] = {{"kind", c.dependence.kind}, {"rho", c.dependence.rho}, {"band", c.dependence.band}};
    gen["marginal"] = {{"kind", c.marginal.kind}, {"param", c.marginal.param}, {"delta", c.marginal.delta}};
    if (c.alternative)
        gen["alternative"] = {{"beta", c.alternative->beta}, {"r", c.alternative->r}, {"sign", c.alternative->sign}};
    else
        gen["alternative"] = nullptr;
    j["generator"] = gen;
    j["run"] = {{"replications", c.replications}, {"seed", c.seed},   {"grid_size", c.grid_size},
                {"grid_points", c.grid_points},   {"gamma", c.gamma}, {"calibration", c.calibration}};
    j["power"] = {{"betas", c.betas}, {"rs", c.rs}};
    j["boundary"] = {{"theta", c.theta}, {"eta", c.eta}, {"s", c.s}};
    j["cov_gap"] = {{"d_values", c.d_values}};
    j["mdr"] = {{"lambda_max", c.lambda_max}, {"lambda_points", c.lambda_points}};
    j["vc"] = {{"quadruples", c.quadruples}};
    j["output"] = {{"out", c.out}, {"plot", c.plot}, {"data", c.data}};
    return j;
}

namespace detail {

template <class T>
void read(const Json& j, const char* section, const char* key, T& dst, const std::string& prefix = "") {
    const Json* node = &j;
    std::string field = key;
    if (section) {
        field = prefix + section + "." + key;
        if (!j.contains(section)) return;
        node = &j.at(section);
        if (!node->is_object()) throw ConfigError(prefix + section, "must be an object");
    }
    if (!node->contains(key)) return;
    const auto& v = node->at(key);
    try {
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
            if (!v.is_number_unsigned()) throw ConfigError(field, "must be a non-negative integer");
        } else if constexpr (std::is_same_v<T, int>) {
            if (!v.is_number_integer()) throw ConfigError(field, "must be an integer");
        } else if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ConfigError(field, "must be a number");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(field, "must be a string");
        }
        dst = v.get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(field, e.what());
    }
}

}  // namespace detail

inline ExperimentConfig from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("config", "top level must be an object");
    static const std::vector<std::string> known{"command", "statistic", "range", "generator", "run",    "power",
                                                "boundary", "cov_gap",  "mdr",   "vc",        "output"};
    for (const auto& [k, _] : j.items())
        if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError(k, "unknown section");
    ExperimentConfig c;
    using detail::read;
    read(j, nullptr, "command", c.command);
    read(j, nullptr, "statistic", c.statistic);
    std::string form = to_string(c.range.form);
    read(j, "range", "form", form);
    c.range.form = parse_range_form(form);
    read(j, "range", "c", c.range.c);
    read(j, "range", "d", c.range.d);
    read(j, "range", "alpha1", c.range.alpha1);
    read(j, "range", "alpha2", c.range.alpha2);
    read(j, "range", "m_trunc", c.range.m_trunc);
    read(j, "range", "refine", c.range.refine);
    if (j.contains("generator")) {
        const auto& g = j.at("generator");
        read(j, "generator", "p", c.p);
        read(j, "generator", "n", c.n);
        read(g, "dependence", "kind", c.dependence.kind, "generator.");
        read(g, "dependence", "rho", c.dependence.rho, "generator.");
        read(g, "dependence", "band", c.dependence.band, "generator.");
        read(g, "marginal", "kind", c.marginal.kind, "generator.");
        read(g, "marginal", "param", c.marginal.param, "generator.");
        read(g, "marginal", "delta", c.marginal.delta, "generator.");
        if (g.contains("alternative") && !g.at("alternative").is_null()) {
            AlternativeConfig a;
            read(g, "alternative", "beta", a.beta, "generator.");
            read(g, "alternative", "r", a.r, "generator.");
            read(g, "alternative", "sign", a.sign, "generator.");
            c.alternative = a;
        }
    }
    read(j, "run", "replications", c.replications);
    read(j, "run", "seed", c.seed);
    read(j, "run", "grid_size", c.grid_size);
    read(j, "run", "grid_points", c.grid_points);
    read(j, "run", "gamma", c.gamma);
    read(j, "run", "calibration", c.calibration);
    read(j, "power", "betas", c.betas);
    read(j, "power", "rs", c.rs);
    read(j, "boundary", "theta", c.theta);
    read(j, "boundary", "eta", c.eta);
    read(j, "boundary", "s", c.s);
    read(j, "cov_gap", "d_values", c.d_values);
    read(j, "mdr", "lambda_max", c.lambda_max);
    read(j, "mdr", "lambda_points", c.lambda_points);
    read(j, "vc", "quadruples", c.quadruples);
    read(j, "output", "out", c.out);
    read(j, "output", "plot", c.plot);
    read(j, "output", "data", c.data);
    return c;
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config", "parse error in '" + path + "': " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Defaults and validation

/// Resolved defaults for `command`, as JSON so later layers can patch them.
inline Json command_defaults(const std::string& command) {
    ExperimentConfig c;
    c.command = command;
    if (command == "mt") c.statistic = "mt";
    if (command == "power") {
        c.p = 10000;
        c.range.form = RangeForm::full;
        c.betas = {0.7};
        c.rs = {0.0, 0.05, 0.4};
        c.replications = 500;
    }
    if (command == "boundary") c.betas = parse_list("boundary.betas", "0.55:0.95:0.05");
    if (command == "bridge-sup" || command == "null-dist") c.range.form = RangeForm::full;
    if (command == "cov-gap") {
        c.p = 1000000;
        c.dependence.kind = "ar1";
        c.dependence.rho = 0.3;
        c.d_values = {2.0, 3.0, 4.0};
        c.grid_points = 48;
    }
    if (command == "mdr-check") {
        c.p = 10000;
        c.n = 500;
        c.range.form = RangeForm::poly;
        c.range.d = 0.5;
        c.marginal = {"student_t", 5.0, 1.0};
        c.replications = 1000000;
    }
    return to_json(c);
}

inline void require(bool ok, const std::string& field, const std::string& msg) {
    if (!ok) throw ConfigError(field, msg);
}

inline void validate(const ExperimentConfig& c) {
    static const std::vector<std::string> commands{"hc",    "mt",        "null-dist", "bridge-sup", "cov-gap",
                                                   "boundary", "power", "mdr-check", "vc-check"};
    require(std::find(commands.begin(), commands.end(), c.command) != commands.end(), "command",
            "unknown command '" + c.command + "'");
    require(c.statistic == "hc" || c.statistic == "mt", "statistic", "expected hc|mt");
    if (c.command == "hc" || c.command == "mt")
        require(c.statistic == c.command, "statistic", "the " + c.command + " command evaluates " + c.command);
    require(c.p >= 2, "generator.p", "must be >= 2");
    require(c.n == 0 || c.n >= 2, "generator.n", "must be 0 (z-statistics) or >= 2");
    if (c.command == "mdr-check") require(c.n >= 2, "generator.n", "mdr-check needs n >= 2");
    else if (c.n == 0)
        require(c.marginal.kind == "gaussian", "generator.marginal.kind",
                "non-Gaussian marginals need a panel (n >= 2)");
    require(c.replications >= 1, "run.replications", "must be >= 1");
    require(c.grid_size >= 1, "run.grid_size", "must be >= 1");
    require(c.grid_points >= 1, "run.grid_points", "must be >= 1");
    require(c.gamma > 0.0 && c.gamma < 1.0, "run.gamma", "must lie in (0,1)");
    require(c.calibration == "simulated_null" || c.calibration == "asymptotic", "run.calibration",
            "expected simulated_null|asymptotic");
    require(c.range.refine >= 1, "range.refine", "must be >= 1");
    require(c.range.m_trunc >= 0.0, "range.m_trunc", "must be >= 0 (0 selects sqrt(2 log p))");
    if (c.range.form == RangeForm::explicit_levels)
        require(c.range.alpha1 > 0.0 && c.range.alpha1 < c.range.alpha2 && c.range.alpha2 < 1.0, "range.alpha1",
                "explicit range needs 0 < alpha1 < alpha2 < 1");
    else
        require(c.range.c > 0.0 && c.range.d > 0.0, "range.d", "c and d must be > 0");
    require(c.dependence.kind == "iid" || c.dependence.kind == "ar1" || c.dependence.kind == "banded",
            "generator.dependence.kind", "expected iid|ar1|banded");
    require(c.marginal.kind == "gaussian" || c.marginal.kind == "student_t" || c.marginal.kind == "pareto_sym",
            "generator.marginal.kind", "expected gaussian|student_t|pareto_sym");
    if (c.alternative) {
        require(c.alternative->beta > 0.5 && c.alternative->beta < 1.0, "generator.alternative.beta",
                "must lie in (1/2,1)");
        require(c.alternative->r >= 0.0, "generator.alternative.r", "must be >= 0");
        require(c.alternative->sign == "positive" || c.alternative->sign == "random", "generator.alternative.sign",
                "expected positive|random");
    }
    for (double b : c.betas) require(b > 0.5 && b < 1.0, "power.betas", "each beta must lie in (1/2,1)");
    for (double r : c.rs) require(r >= 0.0, "power.rs", "each r must be >= 0");
    require(c.eta >= 0.0 && c.eta < c.theta && c.theta < 1.0, "boundary.theta", "need 0 <= eta < theta < 1");
    require(c.s >= 0.0 && c.s <= 1.0, "boundary.s", "must lie in [0,1]");
    for (double d : c.d_values) require(d > 0.0, "cov_gap.d_values", "each d must be > 0");
    require(c.lambda_points >= 1, "mdr.lambda_points", "must be >= 1");
    if (c.lambda_max != "auto") {
        try {
            require(std::stod(c.lambda_max) > 0.0, "mdr.lambda_max", "must be > 0 or 'auto'");
        } catch (const std::logic_error&) {
            throw ConfigError("mdr.lambda_max", "must be a number or 'auto'");
        }
    }
    require(c.quadruples >= 1, "vc.quadruples", "must be >= 1");
}

// ---------------------------------------------------------------------------
// Typed views, each re-running the module's own validation under a field name.

inline DependenceSpec dependence_spec(const ExperimentConfig& c) {
    try {
        if (c.dependence.kind == "ar1") return DependenceSpec::ar1(c.dependence.rho);
        if (c.dependence.kind == "banded") return DependenceSpec::banded(c.dependence.band);
        return DependenceSpec::iid();
    } catch (const DomainError& e) {
        throw ConfigError("generator.dependence", e.what());
    }
}

inline MarginalSpec marginal_spec(const ExperimentConfig& c) {
    try {
        if (c.marginal.kind == "student_t") return MarginalSpec::student_t(c.marginal.param, c.marginal.delta);
        if (c.marginal.kind == "pareto_sym") return MarginalSpec::pareto_sym(c.marginal.param, c.marginal.delta);
        return MarginalSpec::gaussian();
    } catch (const DomainError& e) {
        throw ConfigError("generator.marginal", e.what());
    }
}

inline std::optional<AlternativeSpec> alternative_spec(const ExperimentConfig& c) {
    if (!c.alternative) return std::nullopt;
    try {
        AlternativeSpec a(c.alternative->beta, c.alternative->r,
                          c.alternative->sign == "positive" ? SignalSign::positive : SignalSign::random);
        a.signal_count(c.p);
        return a;
    } catch (const DomainError& e) {
        throw ConfigError("generator.alternative", e.what());
    }
}

inline LevelRange level_range(const ExperimentConfig& c) {
    const double p = static_cast<double>(c.p);
    try {
        switch (c.range.form) {
            case RangeForm::full: return level_range_full(p);
            case RangeForm::loglog: return level_range_loglog(p, c.range.c, c.range.d);
            case RangeForm::poly: return level_range_poly(p, c.range.c, c.range.d);
            case RangeForm::explicit_levels: return LevelRange(c.range.alpha1, c.range.alpha2);
        }
    } catch (const DomainError& e) {
        throw ConfigError("range", e.what());
    }
    throw ConfigError("range.form", "unhandled");
}

inline double truncation(const ExperimentConfig& c) {
    return c.range.m_trunc > 0.0 ? c.range.m_trunc : mt_default_truncation(static_cast<double>(c.p));
}

inline StatisticEvaluator statistic_evaluator(const ExperimentConfig& c) {
    const auto range = level_range(c);
    if (c.statistic == "hc") return StatisticEvaluator::hc(range);
    try {
        return StatisticEvaluator::mt(range, truncation(c), c.range.refine);
    } catch (const DomainError& e) {
        throw ConfigError("range", std::string("MT threshold conversion: ") + e.what());
    }
}

/// Gumbel scale for the configured range: (1 - d)/(2 sqrt pi) for the
/// polynomially trimmed range, 1/(2 sqrt pi) otherwise.
inline double gumbel_kappa(const ExperimentConfig& c) {
    if (c.range.form == RangeForm::poly) {
        require(c.range.d < 1.0, "range.d", "poly range needs d < 1 for the trimmed Gumbel scale");
        return trimmed_gumbel_kappa(c.range.d);
    }
    return kHcGumbelKappa;
}

}  // namespace hcdep::cli
