#pragma once

// Gumbel-type limit laws and normalizing sequences for HC and MT suprema.

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "hcdep/errors.hpp"
#include "hcdep/gauss_kernel.hpp"

namespace hcdep {

/// kappa = 1 / (2 sqrt(pi)), the full-range HC constant.
inline const double kHcGumbelKappa = 0.5 / std::sqrt(std::numbers::pi);

/// kappa = (1 - d) / (2 sqrt(pi)) for a range trimmed at p^-d.
inline double trimmed_gumbel_kappa(double d) {
    if (!(d >= 0.0 && d < 1.0)) throw DomainError("trimmed_gumbel_kappa: d must lie in [0,1)");
    return (1.0 - d) * kHcGumbelKappa;
}

/// Limit law exp(-kappa e^{-x}) with the HC normalization
///   a_p = sqrt(2 log log p),  b_p = (2 log log p + (1/2) log log log p) / a_p.
struct GumbelLimit {
    double scale_kappa;
    double a_p;
    double b_p;

    GumbelLimit(double p, double kappa) : scale_kappa(kappa) {
        if (!(kappa > 0.0)) throw DomainError("GumbelLimit: kappa must be > 0");
        if (!(p >= 16.0)) throw DomainError("GumbelLimit: need p >= 16 so log log log p is real");
        const double ll = std::log(std::log(p));
        a_p = std::sqrt(2.0 * ll);
        b_p = (2.0 * ll + 0.5 * std::log(ll)) / a_p;
    }

    /// a_p (statistic - b_p), the variable whose law tends to exp(-kappa e^{-x}).
    double normalize(double statistic) const { return a_p * (statistic - b_p); }
    double denormalize(double x) const { return b_p + x / a_p; }
};

inline double gumbel_cdf(double kappa, double x) {
    if (!(kappa > 0.0)) throw DomainError("gumbel_cdf: kappa must be > 0");
    return std::exp(-kappa * std::exp(-x));
}

/// x with exp(-kappa e^{-x}) = u, i.e. x = log kappa - log(log(1/u)).
inline double gumbel_quantile(double kappa, double u) {
    if (!(kappa > 0.0)) throw DomainError("gumbel_quantile: kappa must be > 0");
    if (!(u > 0.0 && u < 1.0)) throw DomainError("gumbel_quantile: u must lie in (0,1)");
    return std::log(kappa) - std::log(-std::log(u));
}

inline double gumbel_cdf(const GumbelLimit& g, double x) { return gumbel_cdf(g.scale_kappa, x); }
inline double gumbel_quantile(const GumbelLimit& g, double u) {
    return gumbel_quantile(g.scale_kappa, u);
}

/// Asymptotic level-gamma critical value for the HC statistic:
/// (2 log log p + (1/2) log log log p + x_gamma) / sqrt(2 log log p).
inline double hc_critical_value(double p, double gamma, double kappa = kHcGumbelKappa) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("hc_critical_value: gamma must lie in (0,1)");
    const GumbelLimit g(p, kappa);
    return g.denormalize(gumbel_quantile(kappa, 1.0 - gamma));
}

// ---------------------------------------------------------------------------
// Threshold-range expansions

enum class RangeVariant {
    hc_loglog,  ///< [(log p)^c / p, (log p)^-d]
    hc_poly,    ///< [(log p)^c / p, p^-d]
};

struct LambdaRangeExpansion {
    double lambda1_approx;
    double lambda2_approx;
    double lambda1_exact;
    double lambda2_exact;
};

/// Leading-order expansions of the thresholds with the o(1) terms dropped,
/// reported next to the exact roots of pi0(lambda) = alpha:
///   lambda1^2 = 2d log log p - log log log p - log(pi d)      (hc_loglog)
///   lambda1^2 = 2d log p     - log log p     - log(pi d)      (hc_poly)
///   lambda2^2 = 2 log p - (2c + 1) log log p - log pi
inline LambdaRangeExpansion lambda_range_expansion(double p, double c, double d, RangeVariant variant) {
    if (!(p >= 16.0)) throw DomainError("lambda_range_expansion: need p >= 16");
    if (!(c > 0.0) || !(d > 0.0)) throw DomainError("lambda_range_expansion: need c, d > 0");
    const double lp = std::log(p);
    const double ll = std::log(lp);
    const double lll = std::log(ll);
    const double pi = std::numbers::pi;
    const double sq1 = variant == RangeVariant::hc_loglog ? 2.0 * d * ll - lll - std::log(pi * d)
                                                          : 2.0 * d * lp - ll - std::log(pi * d);
    const double sq2 = 2.0 * lp - (2.0 * c + 1.0) * ll - std::log(pi);
    if (!(sq1 > 0.0) || !(sq2 > 0.0))
        throw DomainError("lambda_range_expansion: expansion is not real for these (p, c, d)");
    const double a1 = std::pow(lp, c) / p;
    const double a2 = variant == RangeVariant::hc_loglog ? std::pow(lp, -d) : std::pow(p, -d);
    if (!(a1 > 0.0 && a1 < a2 && a2 < 1.0))
        throw DomainError("lambda_range_expansion: empty alpha range for these (p, c, d)");
    return {std::sqrt(sq1), std::sqrt(sq2), hc_lambda_from_alpha(a2), hc_lambda_from_alpha(a1)};
}

// ---------------------------------------------------------------------------
// Locally stationary Gaussian processes

/// Pickands-type constant; closed forms exist only for alpha in {1, 2}.
inline double pickands_constant(double alpha_index) {
    if (alpha_index == 1.0) return 1.0;
    if (alpha_index == 2.0) return 1.0 / std::sqrt(std::numbers::pi);
    throw DomainError("pickands_constant: no closed form for alpha=" + std::to_string(alpha_index));
}

struct LocalStationaryConstants {
    double alpha_index;
    double c_fun;  ///< time average C*_T of C^{1/alpha}
    double h_alpha;
    double horizon_T;

    LocalStationaryConstants(double alpha, double c, double t)
        : LocalStationaryConstants(alpha, c, pickands_constant(alpha), t) {}

    LocalStationaryConstants(double alpha, double c, double h, double t)
        : alpha_index(alpha), c_fun(c), h_alpha(h), horizon_T(t) {
        if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("LocalStationaryConstants: alpha in (0,2]");
        if (!(c > 0.0)) throw DomainError("LocalStationaryConstants: C must be > 0");
        if (!(h > 0.0)) throw DomainError("LocalStationaryConstants: H_alpha must be > 0");
        if ((alpha == 1.0 || alpha == 2.0) && std::abs(h - pickands_constant(alpha)) > 1e-15)
            throw DomainError("LocalStationaryConstants: H_1 = 1 and H_2 = pi^-1/2");
    }
};

/// C*_T H_alpha (2 pi)^{-1/2} 2^{(2 - alpha) / (2 alpha)}.
inline double mt_gumbel_log_argument(const LocalStationaryConstants& k) {
    const double e = (2.0 - k.alpha_index) / (2.0 * k.alpha_index);
    return k.c_fun * k.h_alpha / std::sqrt(2.0 * std::numbers::pi) * std::pow(2.0, e);
}

/// a_T = sqrt(2 log T),
/// b_T = a_T + ((2 - alpha)/(2 alpha) log log T + log(C*_T H_alpha (2pi)^-1/2 2^{(2-alpha)/2alpha})) / a_T.
inline std::pair<double, double> mt_gumbel_params(const LocalStationaryConstants& k) {
    if (!(k.horizon_T > std::numbers::e))
        throw DomainError("mt_gumbel_params: need T > e, got " + std::to_string(k.horizon_T));
    const double a = std::sqrt(2.0 * std::log(k.horizon_T));
    const double coef = (2.0 - k.alpha_index) / (2.0 * k.alpha_index);
    const double b = a + (coef * std::log(std::log(k.horizon_T)) + std::log(mt_gumbel_log_argument(k))) / a;
    return {a, b};
}

/// Horizon T_p = (1 - d) log p - c log log p of the time-changed MT limit process.
inline double mt_horizon(double p, double c, double d) {
    return (1.0 - d) * std::log(p) - c * std::log(std::log(p));
}

/// a_{T_p} times the gap between the level-u quantiles of the two MT
/// normalizations: the locally stationary one with (alpha, C) = (1, 1/2) and
/// the HC-style one with kappa = (1 - d)/(2 sqrt(pi)). Tends to zero as p grows.
inline double mt_normalization_gap(double p, double c, double d, double u) {
    const LocalStationaryConstants k(1.0, 0.5, mt_horizon(p, c, d));
    const auto [a_t, b_t] = mt_gumbel_params(k);
    const double crit_local = b_t + (-std::log(-std::log(u))) / a_t;
    const double kappa = trimmed_gumbel_kappa(d);
    const GumbelLimit g(p, kappa);
    const double crit_hc = g.denormalize(gumbel_quantile(kappa, u));
    return a_t * (crit_local - crit_hc);
}

}  // namespace hcdep
