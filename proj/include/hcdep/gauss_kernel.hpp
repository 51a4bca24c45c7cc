#pragma once

// Scalar and bivariate Gaussian kernels used by the HC and MT statistics.
//
// Two different "sigma0^2" quantities appear in this library: the HC variance
// pi0(l)(1 - pi0(l)) (sigma0_sq_hc) and the MT variance of the truncated
// squared statistic (sigma0_sq_mt). They share a symbol in the literature but
// are unrelated functions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hcdep/errors.hpp"

namespace hcdep {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
inline constexpr double kSqrt1_2 = 0.7071067811865475244008443621048490;
inline constexpr double kTailFloor = 1e-300;

inline double std_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double std_cdf(double x) { return 0.5 * std::erfc(-x * kSqrt1_2); }

/// Upper tail 1 - Phi(x), accurate far into the right tail.
inline double std_sf(double x) { return 0.5 * std::erfc(x * kSqrt1_2); }

namespace detail {

// Acklam's rational approximation (relative error ~1e-9) for u <= 0.5.
inline double quantile_guess_lower(double u) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    if (u < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double quantile_lower(double u) {
    double x = quantile_guess_lower(u);
    for (int it = 0; it < 3; ++it) {
        const double e = std_cdf(x) - u;
        const double t = e / std_pdf(x);
        x -= t / (1.0 + 0.5 * x * t);
    }
    return x;
}

}  // namespace detail

inline double std_quantile(double u) {
    if (!(u > 0.0 && u < 1.0))
        throw DomainError("std_quantile: argument must lie in (0,1), got " + std::to_string(u));
    if (u <= 0.5) return detail::quantile_lower(u);
    return -detail::quantile_lower(1.0 - u);
}

/// Tail probability with an explicit underflow flag.
struct TailProbability {
    double value;
    bool underflow;
};

/// P(|N(0,1)| >= lambda).
inline double pi0(double lambda) {
    if (!(lambda >= 0.0)) throw DomainError("pi0: lambda must be >= 0");
    return std::erfc(lambda * kSqrt1_2);
}

/// pi0 clamped to kTailFloor; `underflow` is set when the clamp was applied.
inline TailProbability pi0_guarded(double lambda) {
    const double v = pi0(lambda);
    if (v < kTailFloor) return {kTailFloor, true};
    return {v, false};
}

/// HC variance pi0(l)(1 - pi0(l)). Zero at lambda = 0.
inline double sigma0_sq_hc(double lambda) {
    const double q = pi0(lambda);
    return q * (1.0 - q);
}

/// Threshold lambda with pi0(lambda) = alpha.
inline double hc_lambda_from_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("hc_lambda_from_alpha: alpha must lie in (0,1)");
    return -std_quantile(0.5 * alpha);
}

// ---------------------------------------------------------------------------
// MT moments

struct MtMomentParams {
    double lambda;
    double m_trunc;

    MtMomentParams(double lambda_, double m_trunc_) : lambda(lambda_), m_trunc(m_trunc_) {
        if (!(lambda >= 0.0) || !(lambda < m_trunc))
            throw DomainError("MtMomentParams: need 0 <= lambda < M (lambda=" +
                              std::to_string(lambda) + ", M=" + std::to_string(m_trunc) + ")");
    }
};

/// E Z^2 1{lambda <= |Z| <= M}.
inline double mu0_mt(const MtMomentParams& p) {
    const double l = p.lambda;
    const double m = p.m_trunc;
    return 2.0 * (l * std_pdf(l) - m * std_pdf(m) + (std_sf(l) - std_sf(m)));
}

/// Var Z^2 1{lambda <= |Z| <= M}.
inline double sigma0_sq_mt(const MtMomentParams& p) {
    const double l = p.lambda;
    const double m = p.m_trunc;
    const double mu = mu0_mt(p);
    return 2.0 * (l * l * l * std_pdf(l) - m * m * m * std_pdf(m)) + (3.0 - mu) * mu;
}

/// Left end of the maximal interval [lo, M) on which sigma0_sq_mt is strictly
/// decreasing. d sigma0^2 / d lambda = 2 lambda^2 phi(lambda) (2 mu0 - lambda^2).
inline double mt_decreasing_lower_bound(double m_trunc) {
    if (!(m_trunc > 0.0)) throw DomainError("mt_decreasing_lower_bound: M must be > 0");
    auto slope_sign = [m_trunc](double l) {
        return 2.0 * mu0_mt(MtMomentParams{l, m_trunc}) - l * l;
    };
    constexpr double step = 1e-3;
    // slope_sign(0) = 2 mu0(0) > 0 and slope_sign -> -M^2 < 0 as lambda -> M.
    double hi = m_trunc;
    double lo = m_trunc - step;
    while (lo > 0.0 && slope_sign(lo) < 0.0) {
        hi = lo;
        lo -= step;
    }
    lo = std::max(lo, 0.0);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (slope_sign(mid) >= 0.0 ? lo : hi) = mid;
    }
    return hi;
}

/// Threshold lambda in the decreasing region with sigma0_sq_mt(lambda) = alpha.
inline double mt_lambda_from_alpha(double alpha, double m_trunc) {
    const double lo_bound = mt_decreasing_lower_bound(m_trunc);
    const double top = sigma0_sq_mt(MtMomentParams{lo_bound, m_trunc});
    if (!(alpha > 0.0 && alpha <= top))
        throw BracketError("mt_lambda_from_alpha: alpha=" + std::to_string(alpha) +
                               " outside attainable interval (0, " + std::to_string(top) +
                               "] for M=" + std::to_string(m_trunc),
                           0.0, top);
    double lo = lo_bound;
    double hi = m_trunc;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double v = sigma0_sq_mt(MtMomentParams{mid, m_trunc});
        if (v == alpha) return mid;
        (v > alpha ? lo : hi) = mid;
    }
    const double vlo = sigma0_sq_mt(MtMomentParams{lo, m_trunc});
    const double vhi = hi < m_trunc ? sigma0_sq_mt(MtMomentParams{hi, m_trunc}) : 0.0;
    return std::abs(vlo - alpha) <= std::abs(vhi - alpha) ? lo : hi;
}

// ---------------------------------------------------------------------------
// Bivariate normal

struct BivariateNormalParams {
    double x;
    double y;
    double rho;

    BivariateNormalParams(double x_, double y_, double rho_) : x(x_), y(y_), rho(rho_) {
        if (!(std::abs(rho) < 1.0))
            throw DomainError("bivariate normal: |rho| must be < 1, got " + std::to_string(rho));
        if (!std::isfinite(x) || !std::isfinite(y))
            throw DomainError("bivariate normal: x and y must be finite");
    }
};

/// Density of the standard bivariate normal with correlation rho.
inline double biv_pdf(double x, double y, double rho) {
    const double one_m = 1.0 - rho * rho;
    const double q = (x * x - 2.0 * rho * x * y + y * y) / one_m;
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(one_m));
}

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance `tol`.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    // Two forced levels so narrow peaks are not missed by the first estimate.
    const double q1 = 0.5 * (a + m);
    const double q3 = 0.5 * (m + b);
    const double fq1 = f(q1);
    const double fq3 = f(q3);
    const double left = (m - a) / 6.0 * (fa + 4.0 * fq1 + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * fq3 + fb);
    return detail::simpson_step(f, a, m, fa, fq1, fm, left, 0.5 * tol, max_depth) +
           detail::simpson_step(f, m, b, fm, fq3, fb, right, 0.5 * tol, max_depth);
}

/// \int_0^rho phi(x, y; r) dr, the correlation increment of Phi(x, y; .).
inline double biv_cdf_increment(double x, double y, double rho, double tol = 1e-10) {
    if (!(std::abs(rho) < 1.0)) throw DomainError("biv_cdf_increment: |rho| must be < 1");
    return adaptive_simpson([x, y](double r) { return biv_pdf(x, y, r); }, 0.0, rho, tol);
}

/// P(X <= x, Y <= y) via Phi(x)Phi(y) + \int_0^rho phi(x, y; r) dr.
inline double biv_cdf(const BivariateNormalParams& p, double tol = 1e-10) {
    const double v = std_cdf(p.x) * std_cdf(p.y) + biv_cdf_increment(p.x, p.y, p.rho, tol);
    return std::clamp(v, 0.0, 1.0);
}

/// Psi(l, n; rho) = P(|X| >= l, |Y| >= n).
inline double psi_tail(double lambda, double nu, double rho, double tol = 1e-10) {
    if (!(lambda >= 0.0 && nu >= 0.0)) throw DomainError("psi_tail: thresholds must be >= 0");
    return 2.0 * biv_cdf(BivariateNormalParams{-lambda, -nu, rho}, tol) +
           2.0 * biv_cdf(BivariateNormalParams{-lambda, -nu, -rho}, tol);
}

/// Psi(l, n; rho) - Psi(l, n; 0), integrated directly so no O(1) terms cancel.
inline double psi_tail_increment(double lambda, double nu, double rho, double tol = 1e-10) {
    if (!(lambda >= 0.0 && nu >= 0.0))
        throw DomainError("psi_tail_increment: thresholds must be >= 0");
    return 2.0 * biv_cdf_increment(-lambda, -nu, rho, 0.25 * tol) +
           2.0 * biv_cdf_increment(-lambda, -nu, -rho, 0.25 * tol);
}

/// d/drho Psi(l, n; rho) = 2 phi(l, n; rho) - 2 phi(l, n; -rho).
/// Psi is even in rho, so the derivative is odd and vanishes at rho = 0.
inline double psi_density(double lambda, double nu, double rho) {
    if (!(std::abs(rho) < 1.0)) throw DomainError("psi_density: |rho| must be < 1");
    return 2.0 * biv_pdf(lambda, nu, rho) - 2.0 * biv_pdf(lambda, nu, -rho);
}

}  // namespace hcdep
