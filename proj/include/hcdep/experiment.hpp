#pragma once

// Shared Monte Carlo plumbing: a statistic evaluator resolved once per run,
// empirical quantiles, and Kolmogorov-Smirnov distances.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hcdep/errors.hpp"
#include "hcdep/statistics.hpp"

namespace hcdep {

enum class StatisticKind { hc, mt };

inline std::string to_string(StatisticKind k) { return k == StatisticKind::hc ? "hc" : "mt"; }

/// HC or MT statistic with its level range resolved once.
class StatisticEvaluator {
public:
    static StatisticEvaluator hc(LevelRange range) { return StatisticEvaluator(StatisticKind::hc, range, 0.0, 0); }

    static StatisticEvaluator mt(LevelRange range, double m_trunc, int refine = kDefaultMtRefine) {
        StatisticEvaluator e(StatisticKind::mt, range, m_trunc, refine);
        e.thresholds_ = mt_threshold_range(range, m_trunc);
        return e;
    }

    StatisticKind kind() const { return kind_; }
    const LevelRange& range() const { return range_; }
    double m_trunc() const { return m_trunc_; }
    int refine() const { return refine_; }
    const ThresholdRange& thresholds() const { return thresholds_; }

    /// Evaluates on test statistics (z or t); HC goes through p_j = pi0(|T_j|).
    StatisticResult operator()(std::span<const double> stats) const {
        if (kind_ == StatisticKind::hc) return hc_statistic(pvalues_from_t(stats), range_);
        return mt_statistic(MtObjective(stats, m_trunc_), thresholds_, refine_);
    }

private:
    StatisticEvaluator(StatisticKind k, LevelRange r, double m, int refine)
        : kind_(k), range_(r), m_trunc_(m), refine_(refine), thresholds_{0.0, 0.0} {}

    StatisticKind kind_;
    LevelRange range_;
    double m_trunc_;
    int refine_;
    ThresholdRange thresholds_;
};

/// Order-statistic quantile: the ceil(q n)-th smallest value.
inline double empirical_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DomainError("empirical_quantile: empty sample");
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("empirical_quantile: q must lie in (0,1]");
    std::sort(values.begin(), values.end());
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::clamp<std::size_t>(k, 1, values.size()) - 1];
}

/// sup_x |F_a(x) - F_b(x)| between two empirical distributions.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// sup_x |F_n(x) - F(x)| against a continuous reference CDF.
inline double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw DomainError("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

struct MeanSe {
    double mean;
    double se;
};

inline MeanSe mean_and_se(std::span<const double> x) {
    if (x.size() < 2) throw DomainError("mean_and_se: need at least 2 values");
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    const double var = ss / static_cast<double>(x.size() - 1);
    return {m, std::sqrt(var / static_cast<double>(x.size()))};
}

}  // namespace hcdep
