#pragma once

// Sparse-signal detection boundaries for the local alternative with p^{1-beta}
// signals of size sqrt(2 r log p), and a simulated-power driver.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hcdep/datagen.hpp"
#include "hcdep/errors.hpp"
#include "hcdep/experiment.hpp"
#include "hcdep/limits.hpp"
#include "hcdep/parallel.hpp"
#include "hcdep/rng.hpp"

namespace hcdep {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline void check_beta(double beta) {
    if (!(beta > 0.5 && beta < 1.0)) throw DomainError("beta must lie in (1/2, 1)");
}

/// Boundary of the single-level HC at alpha = L_p / p^s.
inline double rho_single(double s, double beta) {
    check_beta(beta);
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("rho_single: s must lie in [0,1]");
    if (beta > 0.5 * (1.0 + s)) return kInfinity;
    const double d = std::sqrt(s) - std::sqrt(0.5 * (1.0 + s) - beta);
    return d * d;
}

/// Optimal boundary: inf over s of rho_single(s, beta).
inline double rho_star(double beta) {
    check_beta(beta);
    if (beta <= 0.75) return beta - 0.5;
    const double d = 1.0 - std::sqrt(1.0 - beta);
    return d * d;
}

/// Boundary for alpha in [L_p / p^{1-eta}, L_p / p^{1-theta}].
inline double rho_star_trimmed(double theta, double eta, double beta) {
    check_beta(beta);
    if (!(eta >= 0.0 && eta < theta && theta < 1.0))
        throw DomainError("rho_star_trimmed: need 0 <= eta < theta < 1");
    if (beta <= 0.75 - 0.25 * theta) {
        const double d = std::sqrt(1.0 - theta) - std::sqrt(1.0 - beta - 0.5 * theta);
        return d * d;
    }
    if (beta <= 0.75 - 0.25 * eta) return beta - 0.5;
    if (beta <= 1.0 - 0.5 * eta) {
        const double d = std::sqrt(1.0 - eta) - std::sqrt(1.0 - beta - 0.5 * eta);
        return d * d;
    }
    return kInfinity;
}

/// min over s in {s_lo, s_lo + step, ..., s_hi} of rho_single(s, beta).
inline double rho_envelope_grid(double beta, double step = 1e-3, double s_lo = 0.0, double s_hi = 1.0) {
    double best = kInfinity;
    const auto n = static_cast<long>(std::floor((s_hi - s_lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) best = std::min(best, rho_single(std::min(s_lo + step * i, s_hi), beta));
    return std::min(best, rho_single(s_hi, beta));
}

// ---------------------------------------------------------------------------
// Power experiment

enum class Calibration { simulated_null, asymptotic };

inline std::string to_string(Calibration c) {
    return c == Calibration::simulated_null ? "simulated_null" : "asymptotic";
}

struct PowerConfig {
    StatisticEvaluator statistic;
    std::size_t p;
    DependenceSpec dependence = DependenceSpec::iid();
    std::vector<double> betas;
    std::vector<double> rs;
    std::size_t replications = 500;
    double gamma = 0.05;
    std::uint64_t seed = 1;
    Calibration calibration = Calibration::simulated_null;
    SignalSign sign = SignalSign::random;
    unsigned threads = 0;
};

struct PowerCell {
    double beta;
    double r;
    std::size_t signals;
    std::size_t rejections;
    double rejection_rate;
    double std_error;
};

struct PowerTable {
    double critical_value;
    Calibration calibration;
    bool low_replications;
    std::vector<PowerCell> cells;
};

inline constexpr std::size_t kMinPowerReplications = 100;

/// Statistic values for `reps` replications drawn from substream `substream`.
/// Replication i always uses stream (seed, i, substream).
inline std::vector<double> simulate_statistic(const StatisticEvaluator& stat, std::size_t p,
                                              const DependenceSpec& dep, const std::optional<AlternativeSpec>& alt,
                                              std::size_t reps, std::uint64_t seed, std::uint32_t substream,
                                              unsigned threads = 0) {
    std::vector<double> out(reps);
    parallel_for(
        reps,
        [&](std::size_t i) {
            auto rng = rng_stream(seed, i, substream);
            const auto z = gen_dependent_z(p, dep, alt, rng);
            out[i] = stat(z.z).value;
        },
        threads);
    return out;
}

/// Rejection rate of `statistic > critical value` on each (beta, r) cell. The
/// simulated-null critical value is the empirical 1 - gamma quantile of
/// replications on substream 0; cell c uses substream c + 1, so an r = 0 cell
/// is an independent check of the calibration.
inline PowerTable power_experiment(const PowerConfig& cfg) {
    if (cfg.replications == 0) throw DomainError("power_experiment: replications must be > 0");
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw DomainError("power_experiment: gamma must lie in (0,1)");
    for (double b : cfg.betas) check_beta(b);
    for (double r : cfg.rs)
        if (!(r >= 0.0)) throw DomainError("power_experiment: r must be >= 0");

    PowerTable table;
    table.calibration = cfg.calibration;
    table.low_replications = cfg.replications < kMinPowerReplications;
    if (cfg.calibration == Calibration::simulated_null) {
        const auto null = simulate_statistic(cfg.statistic, cfg.p, cfg.dependence, std::nullopt, cfg.replications,
                                             cfg.seed, 0, cfg.threads);
        table.critical_value = empirical_quantile(null, 1.0 - cfg.gamma);
    } else {
        table.critical_value = hc_critical_value(static_cast<double>(cfg.p), cfg.gamma);
    }

    std::uint32_t cell_index = 0;
    for (double beta : cfg.betas)
        for (double r : cfg.rs) {
            ++cell_index;
            std::optional<AlternativeSpec> alt;
            std::size_t signals = 0;
            if (r > 0.0) {
                alt.emplace(beta, r, cfg.sign);
                signals = alt->signal_count(cfg.p);
            }
            const auto values = simulate_statistic(cfg.statistic, cfg.p, cfg.dependence, alt, cfg.replications,
                                                   cfg.seed, cell_index, cfg.threads);
            std::size_t rejections = 0;
            for (double v : values) rejections += v > table.critical_value ? 1 : 0;
            const double rate = static_cast<double>(rejections) / static_cast<double>(cfg.replications);
            table.cells.push_back({beta, r, signals, rejections, rate,
                                   std::sqrt(rate * (1.0 - rate) / static_cast<double>(cfg.replications))});
        }
    return table;
}

}  // namespace hcdep
