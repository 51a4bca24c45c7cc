#pragma once

// One function per subcommand. Each turns a validated config into a table,
// a summary block and an optional plot renderer.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hcdep/boundary.hpp"
#include "hcdep/cli/config.hpp"
#include "hcdep/cli/csv.hpp"
#include "hcdep/cli/plot.hpp"
#include "hcdep/datagen.hpp"
#include "hcdep/experiment.hpp"
#include "hcdep/gauss_kernel.hpp"
#include "hcdep/gp_sim.hpp"
#include "hcdep/limits.hpp"
#include "hcdep/parallel.hpp"
#include "hcdep/rng.hpp"
#include "hcdep/statistics.hpp"
#include "hcdep/vc_check.hpp"

namespace hcdep::cli {

struct CommandResult {
    Table table;
    std::function<void(std::ostream&)> plot;  ///< empty when the command has no plot
};

namespace detail {

inline void add_quantiles(Table& t, const std::string& prefix, const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x / static_cast<double>(v.size());
    t.add_summary(prefix + "mean", mean);
    for (double q : {0.05, 0.5, 0.9, 0.95, 0.99}) t.add_summary(prefix + "q" + format_number(q), empirical_quantile(v, q));
}

/// Statistic vector for replication `i` on `substream`: z-statistics when
/// n = 0, t-statistics of an n x p panel otherwise.
inline std::vector<double> draw_statistics(const ExperimentConfig& c, const DependenceSpec& dep,
                                           const MarginalSpec& marg, const std::optional<AlternativeSpec>& alt,
                                           std::size_t i, std::uint32_t substream) {
    auto rng = rng_stream(c.seed, i, substream);
    if (c.n == 0) return gen_dependent_z(c.p, dep, alt, rng).z;
    const auto panel = gen_heavy_panel(c.n, c.p, dep, marg, alt, rng);
    return t_statistics(panel.data).t_stats;
}

inline std::vector<double> simulate(const ExperimentConfig& c, const StatisticEvaluator& stat,
                                    const std::optional<AlternativeSpec>& alt, std::uint32_t substream,
                                    unsigned threads, std::vector<StatisticResult>* details = nullptr) {
    const auto dep = dependence_spec(c);
    const auto marg = marginal_spec(c);
    std::vector<StatisticResult> res(c.replications);
    parallel_for(
        c.replications, [&](std::size_t i) { res[i] = stat(draw_statistics(c, dep, marg, alt, i, substream)); },
        threads);
    std::vector<double> out(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) out[i] = res[i].value;
    if (details) *details = std::move(res);
    return out;
}

/// Limit-process supremum draws: the normalized bridge for HC, the Gaussian
/// MT limit on `grid_points` thresholds for MT.
inline std::vector<double> limit_sups(const ExperimentConfig& c, const StatisticEvaluator& stat,
                                      std::uint32_t substream, unsigned threads) {
    std::vector<double> out(c.replications);
    if (stat.kind() == StatisticKind::hc) {
        const auto grid = LogitGrid::logit_uniform(stat.range(), c.grid_size);
        parallel_for(
            c.replications,
            [&](std::size_t i) {
                auto rng = rng_stream(c.seed, i, substream);
                out[i] = bridge_sup_sample(grid, rng);
            },
            threads);
        return out;
    }
    const auto th = stat.thresholds();
    std::vector<double> lam(c.grid_points);
    for (std::size_t k = 0; k < lam.size(); ++k)
        lam[k] = lam.size() == 1 ? th.lambda1
                                 : th.lambda1 + (th.lambda2 - th.lambda1) * static_cast<double>(k) /
                                                    static_cast<double>(lam.size() - 1);
    const GaussianMaxSampler sampler(mt_limit_cov(lam, stat.m_trunc()).matrix);
    parallel_for(
        c.replications,
        [&](std::size_t i) {
            auto rng = rng_stream(c.seed, i, substream);
            out[i] = sampler.sample_max(rng);
        },
        threads);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// hc / mt: one row per replication, or a single row for --data input.
inline CommandResult run_statistic(const ExperimentConfig& c, unsigned threads) {
    const auto stat = statistic_evaluator(c);
    CommandResult r;
    r.table.columns = {"replication", "statistic", "argmax_level", "candidates", "clamped"};
    std::vector<StatisticResult> res;
    if (!c.data.empty()) {
        const auto m = read_matrix_csv(c.data);
        std::vector<double> stats;
        if (m.rows() == 1) {
            stats.assign(m.data(), m.data() + m.size());
        } else {
            try {
                stats = t_statistics(m).t_stats;
            } catch (const DomainError& e) {
                throw ConfigError("output.data", e.what());
            }
        }
        require(stats.size() == c.p, "generator.p",
                "must equal the number of data columns (" + std::to_string(stats.size()) + ")");
        res.push_back(stat(stats));
    } else {
        detail::simulate(c, stat, alternative_spec(c), 0, threads, &res);
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < res.size(); ++i) {
        r.table.add_row({static_cast<std::uint64_t>(i), res[i].value, res[i].argmax_level,
                         static_cast<std::uint64_t>(res[i].candidate_count),
                         static_cast<std::uint64_t>(res[i].clamped_count)});
        values.push_back(res[i].value);
    }
    r.table.add_summary("range_lo", stat.range().alpha1);
    r.table.add_summary("range_hi", stat.range().alpha2);
    if (stat.kind() == StatisticKind::mt) {
        r.table.add_summary("lambda1", stat.thresholds().lambda1);
        r.table.add_summary("lambda2", stat.thresholds().lambda2);
    }
    detail::add_quantiles(r.table, "", values);
    if (!c.plot.empty())
        r.plot = [values, name = c.statistic](std::ostream& os) {
            svg_cdf_overlay(os, name + " statistic", {{name, values}}, {});
        };
    return r;
}

/// Empirical null law against the limit supremum and the Gumbel law.
inline CommandResult run_null_dist(const ExperimentConfig& c, unsigned threads) {
    const auto stat = statistic_evaluator(c);
    const double kappa = gumbel_kappa(c);
    const GumbelLimit g(static_cast<double>(c.p), kappa);
    const auto values = detail::simulate(c, stat, std::nullopt, 0, threads);
    const auto sups = detail::limit_sups(c, stat, 1, threads);
    CommandResult r;
    r.table.columns = {"replication", "statistic", "limit_sup", "normalized_statistic"};
    std::vector<double> normalized(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        normalized[i] = g.normalize(values[i]);
        r.table.add_row({static_cast<std::uint64_t>(i), values[i], sups[i], normalized[i]});
    }
    r.table.add_summary("ks_limit", ks_two_sample(values, sups));
    r.table.add_summary("ks_gumbel", ks_one_sample(normalized, [kappa](double x) { return gumbel_cdf(kappa, x); }));
    r.table.add_summary("gumbel_kappa", kappa);
    r.table.add_summary("a_p", g.a_p);
    r.table.add_summary("b_p", g.b_p);
    detail::add_quantiles(r.table, "statistic_", values);
    detail::add_quantiles(r.table, "limit_", sups);
    if (!c.plot.empty())
        r.plot = [values, sups, g, name = c.statistic](std::ostream& os) {
            svg_cdf_overlay(os, name + " null law", {{name + " statistic", values}, {"limit sup", sups}},
                            {{"Gumbel", [g](double x) { return gumbel_cdf(g.scale_kappa, g.normalize(x)); }}});
        };
    return r;
}

/// Normalized-bridge suprema and their distance to the Gumbel law.
inline CommandResult run_bridge_sup(const ExperimentConfig& c, unsigned threads) {
    const auto range = level_range(c);
    const double kappa = gumbel_kappa(c);
    const GumbelLimit g(static_cast<double>(c.p), kappa);
    const auto sups = detail::limit_sups(c, StatisticEvaluator::hc(range), 0, threads);
    CommandResult r;
    r.table.columns = {"replication", "sup", "normalized"};
    std::vector<double> normalized(sups.size());
    for (std::size_t i = 0; i < sups.size(); ++i) {
        normalized[i] = g.normalize(sups[i]);
        r.table.add_row({static_cast<std::uint64_t>(i), sups[i], normalized[i]});
    }
    r.table.add_summary("ks_gumbel", ks_one_sample(normalized, [kappa](double x) { return gumbel_cdf(kappa, x); }));
    r.table.add_summary("gumbel_kappa", kappa);
    detail::add_quantiles(r.table, "", sups);
    if (!c.plot.empty())
        r.plot = [normalized, kappa](std::ostream& os) {
            svg_cdf_overlay(os, "normalized bridge supremum", {{"a_p (sup - b_p)", normalized}},
                            {{"Gumbel", [kappa](double x) { return gumbel_cdf(kappa, x); }}});
        };
    return r;
}

/// Covariance discrepancy between the dependent and independent HC kernels
/// on the range for each d.
inline CommandResult run_cov_gap(const ExperimentConfig& c, unsigned threads) {
    const auto dep = dependence_spec(c);
    const auto rho = dep.rho_sequence(std::min<std::size_t>(c.p - 1, 100000));
    CommandResult r;
    r.table.columns = {"d", "alpha1", "alpha2", "discrepancy"};
    std::vector<std::vector<Cell>> rows(c.d_values.size());
    std::vector<std::string> errors(c.d_values.size());
    parallel_for(
        c.d_values.size(),
        [&](std::size_t k) {
            auto cfg = c;
            cfg.range.d = c.d_values[k];
            const auto range = level_range(cfg);
            const auto grid = LogitGrid::logit_uniform(range, c.grid_points);
            std::vector<double> lam;
            for (double a : grid.levels()) lam.push_back(hc_lambda_from_alpha(a));
            const double gap = cov_discrepancy(hc_cov_dependent(lam, rho, static_cast<long>(c.p)),
                                               hc_cov_independent(lam));
            rows[k] = {c.d_values[k], range.alpha1, range.alpha2, gap};
        },
        threads);
    for (auto& row : rows) r.table.add_row(std::move(row));
    bool decreasing = true;
    for (std::size_t k = 1; k < r.table.rows.size(); ++k)
        decreasing = decreasing && std::get<double>(r.table.rows[k][3]) < std::get<double>(r.table.rows[k - 1][3]);
    r.table.add_summary("dependence", dep.describe());
    r.table.add_summary("strictly_decreasing", decreasing ? "true" : "false");
    return r;
}

inline CommandResult run_boundary(const ExperimentConfig& c, unsigned) {
    CommandResult r;
    r.table.columns = {"beta", "rho_star", "rho_star_trimmed", "rho_single"};
    for (double b : c.betas)
        r.table.add_row({b, rho_star(b), rho_star_trimmed(c.theta, c.eta, b), rho_single(c.s, b)});
    r.table.add_summary("theta", c.theta);
    r.table.add_summary("eta", c.eta);
    r.table.add_summary("s", c.s);
    return r;
}

inline CommandResult run_power(const ExperimentConfig& c, unsigned threads) {
    require(c.n == 0, "generator.n", "power runs on z-statistics (n = 0)");
    require(c.alternative == std::nullopt, "generator.alternative", "power takes its alternatives from power.betas/rs");
    PowerConfig pc{statistic_evaluator(c), c.p, dependence_spec(c), c.betas, c.rs};
    pc.replications = c.replications;
    pc.gamma = c.gamma;
    pc.seed = c.seed;
    pc.calibration = c.calibration == "asymptotic" ? Calibration::asymptotic : Calibration::simulated_null;
    pc.threads = threads;
    const auto t = power_experiment(pc);
    CommandResult r;
    r.table.columns = {"beta", "r", "signals", "rejections", "rejection_rate", "std_error"};
    std::vector<double> rates;
    for (const auto& cell : t.cells) {
        r.table.add_row({cell.beta, cell.r, static_cast<std::uint64_t>(cell.signals),
                         static_cast<std::uint64_t>(cell.rejections), cell.rejection_rate, cell.std_error});
        rates.push_back(cell.rejection_rate);
    }
    r.table.add_summary("critical_value", t.critical_value);
    r.table.add_summary("calibration", to_string(t.calibration));
    r.table.add_summary("low_replications", t.low_replications ? "true" : "false");
    if (!c.plot.empty())
        r.plot = [rates, betas = c.betas, rs = c.rs](std::ostream& os) {
            svg_heatmap(os, "rejection rate", betas, rs, rates);
        };
    return r;
}

/// Tail ratio P(|T| >= lambda) / P(|Z| >= lambda) for the one-sample t
/// statistic of n draws from the configured marginal.
inline CommandResult run_mdr_check(const ExperimentConfig& c, unsigned threads) {
    const auto marg = marginal_spec(c);
    const double lmax = c.lambda_max == "auto"
                            ? std::sqrt(2.0 * c.range.d * std::log(static_cast<double>(c.p)))
                            : std::stod(c.lambda_max);
    std::vector<double> abs_t(c.replications);
    parallel_for(
        c.replications,
        [&](std::size_t i) {
            auto rng = rng_stream(c.seed, i, 0);
            double mean = 0.0;
            double m2 = 0.0;
            for (std::size_t k = 0; k < c.n; ++k) {
                const double x = marg.sample(rng);
                const double delta = x - mean;
                mean += delta / static_cast<double>(k + 1);
                m2 += delta * (x - mean);
            }
            const double sd = std::sqrt(m2 / static_cast<double>(c.n - 1));
            abs_t[i] = std::abs(std::sqrt(static_cast<double>(c.n)) * mean / sd);
        },
        threads);
    std::sort(abs_t.begin(), abs_t.end());
    CommandResult r;
    r.table.columns = {"lambda", "empirical_tail", "pi0", "ratio", "abs_dev"};
    double worst = 0.0;
    const double reps = static_cast<double>(c.replications);
    for (std::size_t k = 0; k <= c.lambda_points; ++k) {
        const double lam = lmax * static_cast<double>(k) / static_cast<double>(c.lambda_points);
        const auto below = std::lower_bound(abs_t.begin(), abs_t.end(), lam) - abs_t.begin();
        const double tail = (reps - static_cast<double>(below)) / reps;
        const double ref = pi0(lam);
        const double ratio = tail / ref;
        worst = std::max(worst, std::abs(ratio - 1.0));
        r.table.add_row({lam, tail, ref, ratio, std::abs(ratio - 1.0)});
    }
    r.table.add_summary("lambda_max", lmax);
    r.table.add_summary("marginal", marg.describe());
    r.table.add_summary("max_abs_dev", worst);
    return r;
}

/// Subgraph shattering check for the step family.
inline CommandResult run_vc_check(const ExperimentConfig& c, unsigned threads) {
    CommandResult r;
    r.table.columns = {"instance", "points", "subsets", "shattered"};
    const auto triple = shattered_triple();
    const auto fig = achievable_subsets(triple);
    r.table.add_row({std::string("figure"), std::uint64_t{3}, static_cast<std::uint64_t>(fig.size()),
                     std::string(is_shattered(fig, 3) ? "true" : "false")});
    std::vector<std::size_t> counts(c.quadruples);
    parallel_for(
        c.quadruples,
        [&](std::size_t i) {
            auto rng = rng_stream(c.seed, i, 0);
            counts[i] = achievable_subsets(random_points(4, rng)).size();
        },
        threads);
    std::size_t worst = 0;
    std::size_t shattered = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        worst = std::max(worst, counts[i]);
        shattered += counts[i] == 16 ? 1 : 0;
        r.table.add_row({"quadruple_" + std::to_string(i), std::uint64_t{4}, static_cast<std::uint64_t>(counts[i]),
                         std::string(counts[i] == 16 ? "true" : "false")});
    }
    r.table.add_summary("figure_subsets", static_cast<double>(fig.size()));
    r.table.add_summary("max_quadruple_subsets", static_cast<double>(worst));
    r.table.add_summary("shattered_quadruples", static_cast<double>(shattered));
    return r;
}

inline CommandResult run_command(const ExperimentConfig& c, unsigned threads) {
    if (c.command == "hc" || c.command == "mt") return run_statistic(c, threads);
    if (c.command == "null-dist") return run_null_dist(c, threads);
    if (c.command == "bridge-sup") return run_bridge_sup(c, threads);
    if (c.command == "cov-gap") return run_cov_gap(c, threads);
    if (c.command == "boundary") return run_boundary(c, threads);
    if (c.command == "power") return run_power(c, threads);
    if (c.command == "mdr-check") return run_mdr_check(c, threads);
    if (c.command == "vc-check") return run_vc_check(c, threads);
    throw ConfigError("command", "unknown command '" + c.command + "'");
}

}  // namespace hcdep::cli
