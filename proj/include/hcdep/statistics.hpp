#pragma once

// Higher criticism (HC) and multi-level thresholding (MT) global statistics.
//
// HC is the supremum over alpha in [alpha1, alpha2] of
//     W(alpha) = (#{p_j <= alpha} - p alpha) / sqrt(p alpha (1 - alpha)).
// Between consecutive order statistics the count k is constant, and
// dW/dalpha = 0 forces alpha (2k - p) = k, which has no root in (0, 1) for
// 0 <= k <= p. W is therefore monotone on every jump-free piece and the
// supremum is attained on the finite candidate set {alpha1, alpha2, p_(j)}
// (left-limits at each p_(j) are included too, but never win because the
// closed inequality adds the tie multiplicity at p_(j)).
//
// MT has no such structure because mu0 and sigma0 vary with lambda, so each
// jump-free piece is refined on a uniform grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hcdep/errors.hpp"
#include "hcdep/gauss_kernel.hpp"

namespace hcdep {

inline constexpr double kPValueFloor = 1e-16;
inline constexpr double kPValueCeil = 1.0 - 1e-16;

struct LevelRange {
    double alpha1;
    double alpha2;

    LevelRange(double a1, double a2) : alpha1(a1), alpha2(a2) {
        if (!(a1 > 0.0 && a1 < a2 && a2 < 1.0))
            throw DomainError("LevelRange: need 0 < alpha1 < alpha2 < 1 (alpha1=" +
                              std::to_string(a1) + ", alpha2=" + std::to_string(a2) + ")");
    }

    bool contains(double a) const { return a >= alpha1 && a <= alpha2; }
};

/// [1/p, 1/2], the classical range.
inline LevelRange level_range_full(double p) { return LevelRange(1.0 / p, 0.5); }

/// [(log p)^c / p, (log p)^-d], the Gaussian-case range.
inline LevelRange level_range_loglog(double p, double c, double d) {
    const double lp = std::log(p);
    const double a1 = std::pow(lp, c) / p;
    const double a2 = std::pow(lp, -d);
    if (!(a1 < a2))
        throw DomainError("level_range_loglog: empty range, (log p)^c/p = " + std::to_string(a1) +
                          " >= (log p)^-d = " + std::to_string(a2));
    return LevelRange(a1, a2);
}

/// [(log p)^c / p, p^-d], the t-statistic range.
inline LevelRange level_range_poly(double p, double c, double d) {
    const double lp = std::log(p);
    const double a1 = std::pow(lp, c) / p;
    const double a2 = std::pow(p, -d);
    if (!(a1 < a2))
        throw DomainError("level_range_poly: empty range, (log p)^c/p = " + std::to_string(a1) +
                          " >= p^-d = " + std::to_string(a2));
    return LevelRange(a1, a2);
}

/// Individual p-values, sorted ascending, with original positions retained.
/// Values of exactly 0 or 1 are clamped into [1e-16, 1 - 1e-16] and counted.
class PValueSample {
public:
    explicit PValueSample(std::span<const double> values) {
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<double> v(values.begin(), values.end());
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!(v[i] >= 0.0 && v[i] <= 1.0))
                throw DomainError("PValueSample: value " + std::to_string(i) +
                                  " outside [0,1]: " + std::to_string(v[i]));
            if (v[i] < kPValueFloor || v[i] > kPValueCeil) {
                v[i] = std::clamp(v[i], kPValueFloor, kPValueCeil);
                ++clamped_;
            }
        }
        std::stable_sort(order.begin(), order.end(),
                         [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        sorted_.reserve(v.size());
        for (auto i : order) sorted_.push_back(v[i]);
        index_ = std::move(order);
    }

    std::span<const double> sorted() const { return sorted_; }
    std::span<const std::size_t> original_index() const { return index_; }
    std::size_t size() const { return sorted_.size(); }
    std::size_t clamped_count() const { return clamped_; }

    /// #{p_j <= alpha}.
    std::size_t count_at_most(double alpha) const {
        return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), alpha) -
                                        sorted_.begin());
    }
    /// #{p_j < alpha}.
    std::size_t count_below(double alpha) const {
        return static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), alpha) -
                                        sorted_.begin());
    }

private:
    std::vector<double> sorted_;
    std::vector<std::size_t> index_;
    std::size_t clamped_ = 0;
};

struct TStatPanel {
    std::vector<double> t_stats;
    long n = 0;
};

struct StatisticResult {
    double value = -std::numeric_limits<double>::infinity();
    double argmax_level = 0.0;
    std::size_t candidate_count = 0;
    /// p-values clamped away from {0, 1} before evaluation.
    std::size_t clamped_count = 0;
    /// True when the maximizing candidate is a one-sided limit rather than an
    /// attained value.
    bool argmax_is_limit = false;
};

/// One-sample t-statistics sqrt(n) mean / sd for each column of an n x p matrix.
inline TStatPanel t_statistics(const Eigen::Ref<const Eigen::MatrixXd>& data) {
    const auto n = data.rows();
    if (n < 2) throw DomainError("t_statistics: need at least 2 rows, got " + std::to_string(n));
    TStatPanel out;
    out.n = static_cast<long>(n);
    out.t_stats.resize(static_cast<std::size_t>(data.cols()));
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        const auto col = data.col(j);
        const double mean = col.mean();
        const double ss = (col.array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 0.0)) throw DomainError("t_statistics: column " + std::to_string(j) + " is constant");
        out.t_stats[static_cast<std::size_t>(j)] = std::sqrt(static_cast<double>(n)) * mean / sd;
    }
    return out;
}

/// p_j = pi0(|T_j|), clamped into [1e-16, 1 - 1e-16].
inline PValueSample pvalues_from_t(std::span<const double> t_stats) {
    std::vector<double> p(t_stats.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = pi0(std::abs(t_stats[j]));
    return PValueSample(p);
}

inline PValueSample pvalues_from_t(const TStatPanel& panel) { return pvalues_from_t(panel.t_stats); }

/// W(alpha) given the exceedance count.
inline double hc_objective(std::size_t count, std::size_t p, double alpha) {
    const double pd = static_cast<double>(p);
    return (static_cast<double>(count) - pd * alpha) / std::sqrt(pd * alpha * (1.0 - alpha));
}

inline double hc_objective(const PValueSample& sample, double alpha) {
    return hc_objective(sample.count_at_most(alpha), sample.size(), alpha);
}

/// Exact supremum of W over the range.
inline StatisticResult hc_statistic(const PValueSample& sample, const LevelRange& range) {
    if (sample.size() == 0) throw DomainError("hc_statistic: empty sample");
    const std::size_t p = sample.size();
    const auto v = sample.sorted();
    StatisticResult res;
    res.clamped_count = sample.clamped_count();
    auto consider = [&](double level, std::size_t count, bool limit) {
        ++res.candidate_count;
        const double w = hc_objective(count, p, level);
        if (w > res.value) {
            res.value = w;
            res.argmax_level = level;
            res.argmax_is_limit = limit;
        }
    };
    consider(range.alpha1, sample.count_at_most(range.alpha1), false);
    auto it = std::lower_bound(v.begin(), v.end(), range.alpha1);
    while (it != v.end() && *it <= range.alpha2) {
        const double level = *it;
        const auto below = static_cast<std::size_t>(it - v.begin());
        const auto upto = static_cast<std::size_t>(std::upper_bound(it, v.end(), level) - v.begin());
        if (level > range.alpha1) consider(level, below, true);
        if (level > range.alpha1 && level < range.alpha2) consider(level, upto, false);
        it = v.begin() + static_cast<std::ptrdiff_t>(upto);
    }
    consider(range.alpha2, sample.count_at_most(range.alpha2), false);
    return res;
}

// ---------------------------------------------------------------------------
// MT

inline constexpr int kDefaultMtRefine = 64;

/// Default truncation M = sqrt(2 log p).
inline double mt_default_truncation(double p) { return std::sqrt(2.0 * std::log(p)); }

struct ThresholdRange {
    double lambda1;
    double lambda2;
};

/// [lambda1, lambda2] with sigma0_sq_mt(lambda1) = alpha2, sigma0_sq_mt(lambda2) = alpha1.
inline ThresholdRange mt_threshold_range(const LevelRange& range, double m_trunc) {
    const double l1 = mt_lambda_from_alpha(range.alpha2, m_trunc);
    const double l2 = mt_lambda_from_alpha(range.alpha1, m_trunc);
    if (!(l1 < l2))
        throw DomainError("mt_threshold_range: empty lambda range after conversion (" +
                          std::to_string(l1) + ", " + std::to_string(l2) + ")");
    return {l1, l2};
}

/// Precomputed sorted |T_j| with prefix sums of squares for O(log p) evaluation
/// of S(lambda) = (sum_j T_j^2 1{lambda <= |T_j| <= M} - p mu0) / (sqrt(p) sigma0).
class MtObjective {
public:
    MtObjective(std::span<const double> stats, double m_trunc) : m_(m_trunc), p_(stats.size()) {
        if (stats.empty()) throw DomainError("MtObjective: empty statistics");
        abs_.reserve(stats.size());
        for (double t : stats) abs_.push_back(std::abs(t));
        std::sort(abs_.begin(), abs_.end());
        prefix_.resize(abs_.size() + 1, 0.0);
        for (std::size_t i = 0; i < abs_.size(); ++i) prefix_[i + 1] = prefix_[i] + abs_[i] * abs_[i];
        upto_m_ = static_cast<std::size_t>(std::upper_bound(abs_.begin(), abs_.end(), m_) - abs_.begin());
    }

    /// sum of T^2 over lambda <= |T| <= M.
    double thresholded_sum(double lambda) const {
        const auto lo = static_cast<std::size_t>(std::lower_bound(abs_.begin(), abs_.end(), lambda) -
                                                 abs_.begin());
        return lo >= upto_m_ ? 0.0 : prefix_[upto_m_] - prefix_[lo];
    }

    double evaluate(double lambda, double sum) const {
        const MtMomentParams mp{lambda, m_};
        const double pd = static_cast<double>(p_);
        return (sum - pd * mu0_mt(mp)) / (std::sqrt(pd) * std::sqrt(sigma0_sq_mt(mp)));
    }

    double evaluate(double lambda) const { return evaluate(lambda, thresholded_sum(lambda)); }

    std::span<const double> sorted_abs() const { return abs_; }
    double truncation() const { return m_; }
    std::size_t size() const { return p_; }

private:
    double m_;
    std::size_t p_;
    std::vector<double> abs_;
    std::vector<double> prefix_;
    std::size_t upto_m_ = 0;
};

/// Supremum of S over [lambda1, lambda2]: jump points, right-limits at jumps,
/// and `refine` uniform steps on every jump-free piece.
inline StatisticResult mt_statistic(const MtObjective& obj, ThresholdRange lr, int refine) {
    if (refine < 1) throw DomainError("mt_statistic: refine must be >= 1");
    if (!(lr.lambda1 < lr.lambda2) || !(lr.lambda2 < obj.truncation()))
        throw DomainError("mt_statistic: need lambda1 < lambda2 < M");
    StatisticResult res;
    auto consider = [&](double level, double sum, bool limit) {
        ++res.candidate_count;
        const double s = obj.evaluate(level, sum);
        if (s > res.value) {
            res.value = s;
            res.argmax_level = level;
            res.argmax_is_limit = limit;
        }
    };
    std::vector<double> breaks{lr.lambda1};
    const auto a = obj.sorted_abs();
    for (auto it = std::upper_bound(a.begin(), a.end(), lr.lambda1);
         it != a.end() && *it < lr.lambda2; ++it)
        if (*it > breaks.back()) breaks.push_back(*it);
    breaks.push_back(lr.lambda2);

    consider(lr.lambda1, obj.thresholded_sum(lr.lambda1), false);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double lo = breaks[i];
        const double hi = breaks[i + 1];
        // |T| >= lambda  <=>  |T| >= hi  for lambda in (lo, hi).
        const double sum = obj.thresholded_sum(hi);
        const bool lo_is_jump = i > 0 && sum != obj.thresholded_sum(lo);
        if (lo_is_jump) consider(lo, sum, true);
        for (int k = 1; k <= refine; ++k) {
            const double level = k == refine ? hi : lo + (hi - lo) * k / refine;
            consider(level, sum, false);
        }
    }
    return res;
}

inline StatisticResult mt_statistic(std::span<const double> stats, const LevelRange& range,
                                    double m_trunc, int refine = kDefaultMtRefine) {
    return mt_statistic(MtObjective(stats, m_trunc), mt_threshold_range(range, m_trunc), refine);
}

inline StatisticResult mt_statistic(const TStatPanel& panel, const LevelRange& range, double m_trunc,
                                    int refine = kDefaultMtRefine) {
    return mt_statistic(std::span<const double>(panel.t_stats), range, m_trunc, refine);
}

}  // namespace hcdep
