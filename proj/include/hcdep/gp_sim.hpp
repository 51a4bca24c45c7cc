#pragma once

// Limiting Gaussian processes of the HC and MT statistics.
//
// The normalized Brownian bridge U(a) = B0(a) / sqrt(a (1 - a)) has
// cov(U(a), U(b)) = sqrt(a (1 - b) / ((1 - a) b)) = exp(-|logit a - logit b| / 2)
// for a <= b, so in logit time it is a stationary Ornstein-Uhlenbeck process
// and is sampled exactly on any grid by a first-order autoregression.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hcdep/errors.hpp"
#include "hcdep/gauss_kernel.hpp"
#include "hcdep/rng.hpp"
#include "hcdep/statistics.hpp"

namespace hcdep {

inline constexpr std::size_t kDefaultBridgeGrid = 4096;

inline double logit(double a) { return std::log(a / (1.0 - a)); }
inline double inv_logit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

class LogitGrid {
public:
    /// `size` levels uniform in logit between the range endpoints (inclusive).
    /// A single-point grid holds alpha1 only.
    static LogitGrid logit_uniform(const LevelRange& range, std::size_t size) {
        if (size == 0) throw DomainError("LogitGrid: size must be >= 1");
        std::vector<double> t(size);
        const double t1 = logit(range.alpha1);
        const double t2 = logit(range.alpha2);
        for (std::size_t k = 0; k < size; ++k)
            t[k] = size == 1 ? t1 : t1 + (t2 - t1) * static_cast<double>(k) / static_cast<double>(size - 1);
        std::vector<double> a(size);
        for (std::size_t k = 0; k < size; ++k) a[k] = inv_logit(t[k]);
        a.front() = range.alpha1;
        if (size > 1) a.back() = range.alpha2;
        return LogitGrid(std::move(a), std::move(t));
    }

    static LogitGrid from_levels(std::vector<double> levels) {
        if (levels.empty()) throw DomainError("LogitGrid: no levels");
        for (std::size_t k = 0; k < levels.size(); ++k) {
            if (!(levels[k] > 0.0 && levels[k] < 1.0)) throw DomainError("LogitGrid: levels must lie in (0,1)");
            if (k > 0 && !(levels[k] > levels[k - 1]))
                throw DomainError("LogitGrid: levels must be strictly increasing");
        }
        std::vector<double> t(levels.size());
        for (std::size_t k = 0; k < levels.size(); ++k) t[k] = logit(levels[k]);
        return LogitGrid(std::move(levels), std::move(t));
    }

    std::span<const double> levels() const { return levels_; }
    std::span<const double> logits() const { return logits_; }
    std::size_t size() const { return levels_.size(); }

private:
    LogitGrid(std::vector<double> a, std::vector<double> t) : levels_(std::move(a)), logits_(std::move(t)) {}

    std::vector<double> levels_;
    std::vector<double> logits_;
};

/// One path of the normalized bridge on the grid.
inline std::vector<double> bridge_path_sample(const LogitGrid& grid, RngStream& rng) {
    const auto t = grid.logits();
    std::vector<double> u(grid.size());
    u[0] = rng.normal();
    for (std::size_t k = 1; k < u.size(); ++k) {
        const double decay = std::exp(-(t[k] - t[k - 1]));
        u[k] = std::sqrt(decay) * u[k - 1] + std::sqrt(1.0 - decay) * rng.normal();
    }
    return u;
}

/// One draw of max_k U(alpha_k).
inline double bridge_sup_sample(const LogitGrid& grid, RngStream& rng) {
    const auto t = grid.logits();
    double u = rng.normal();
    double best = u;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double decay = std::exp(-(t[k] - t[k - 1]));
        u = std::sqrt(decay) * u + std::sqrt(1.0 - decay) * rng.normal();
        best = std::max(best, u);
    }
    return best;
}

inline double bridge_sup_sample(const LevelRange& range, std::size_t grid_size, RngStream& rng) {
    return bridge_sup_sample(LogitGrid::logit_uniform(range, grid_size), rng);
}

/// Closed-form bridge correlation sqrt(a (1 - b) / ((1 - a) b)) for a <= b.
inline double bridge_correlation(double a, double b) {
    if (a > b) std::swap(a, b);
    return std::sqrt(a * (1.0 - b) / ((1.0 - a) * b));
}

// ---------------------------------------------------------------------------
// Covariance grids

struct CovProvenance {
    enum class Kind { independent, dependent, block, mt_limit };
    Kind kind = Kind::independent;
    std::vector<double> rho_seq;
    long p = 0;
    long a1 = 0;
    long a2 = 0;
    long m = 0;
    double m_trunc = 0.0;
};

struct CovGrid {
    std::vector<double> grid_levels;
    Eigen::MatrixXd matrix;
    CovProvenance provenance;
};

namespace detail {

inline void check_hc_lambda_grid(std::span<const double> grid) {
    if (grid.empty()) throw DomainError("covariance grid: empty lambda grid");
    for (double l : grid)
        if (!(l > 0.0) || !(sigma0_sq_hc(l) > 0.0))
            throw DomainError("covariance grid: lambda must be > 0 with sigma0(lambda) > 0");
}

inline void check_rho_seq(std::span<const double> rho_seq) {
    for (double r : rho_seq)
        if (!(std::abs(r) < 1.0)) throw DomainError("covariance grid: |rho_k| must be < 1");
}

// sigma0(l) sigma0(n) times the covariance over a window of `window`
// consecutive variables (p for the whole sequence, a1 for one big block).
inline double hc_cov_numerator(double lam, double nu, std::span<const double> rho_seq, long window) {
    const double l = std::min(lam, nu);
    const double n = std::max(lam, nu);
    double acc = pi0(n) * (1.0 - pi0(l));
    const double tol = 1e-11 * std::sqrt(sigma0_sq_hc(l) * sigma0_sq_hc(n));
    const auto lags = std::min<long>(static_cast<long>(rho_seq.size()), window - 1);
    for (long k = 1; k <= lags; ++k) {
        const double r = rho_seq[static_cast<std::size_t>(k - 1)];
        if (std::abs(r) < 1e-12) continue;
        const double w = static_cast<double>(window - k) / static_cast<double>(window);
        acc += 2.0 * w * psi_tail_increment(l, n, r, tol);
    }
    return acc;
}

}  // namespace detail

/// sigma0(l, n) = pi0(n)(1 - pi0(l)) / (sigma0(l) sigma0(n)) for l <= n.
inline CovGrid hc_cov_independent(std::span<const double> lambda_grid) {
    detail::check_hc_lambda_grid(lambda_grid);
    const auto g = static_cast<Eigen::Index>(lambda_grid.size());
    CovGrid out{{lambda_grid.begin(), lambda_grid.end()}, Eigen::MatrixXd(g, g), {}};
    for (Eigen::Index i = 0; i < g; ++i)
        for (Eigen::Index j = i; j < g; ++j) {
            const double a = lambda_grid[static_cast<std::size_t>(i)];
            const double b = lambda_grid[static_cast<std::size_t>(j)];
            const double l = std::min(a, b);
            const double n = std::max(a, b);
            const double v = pi0(n) * (1.0 - pi0(l)) / std::sqrt(sigma0_sq_hc(l) * sigma0_sq_hc(n));
            out.matrix(i, j) = out.matrix(j, i) = v;
        }
    return out;
}

/// Exact covariance of the normalized indicator process for a stationary
/// Gaussian sequence of length p with autocorrelations rho_seq:
///   sigma0(l) sigma0(n) sigma_P0 = pi0(n)(1 - pi0(l))
///       + 2 sum_{k=1}^{p-1} (p - k)/p (Psi(l, n; rho_k) - Psi(l, n; 0)).
/// Lags with |rho_k| < 1e-12 are dropped.
inline CovGrid hc_cov_dependent(std::span<const double> lambda_grid, std::span<const double> rho_seq, long p) {
    detail::check_hc_lambda_grid(lambda_grid);
    detail::check_rho_seq(rho_seq);
    if (p < 1) throw DomainError("hc_cov_dependent: p must be >= 1");
    const auto g = static_cast<Eigen::Index>(lambda_grid.size());
    CovGrid out{{lambda_grid.begin(), lambda_grid.end()}, Eigen::MatrixXd(g, g), {}};
    out.provenance.kind = CovProvenance::Kind::dependent;
    out.provenance.rho_seq.assign(rho_seq.begin(), rho_seq.end());
    out.provenance.p = p;
    for (Eigen::Index i = 0; i < g; ++i)
        for (Eigen::Index j = i; j < g; ++j) {
            const double a = lambda_grid[static_cast<std::size_t>(i)];
            const double b = lambda_grid[static_cast<std::size_t>(j)];
            const double v = detail::hc_cov_numerator(a, b, rho_seq, p) /
                             std::sqrt(sigma0_sq_hc(a) * sigma0_sq_hc(b));
            out.matrix(i, j) = out.matrix(j, i) = v;
        }
    return out;
}

/// Big-block covariance (m a1 / n) E(G_{a1} f G_{a1} g) with n = m (a1 + a2):
/// the dependent formula with window a1 and the block prefactor.
inline CovGrid hc_cov_block(std::span<const double> lambda_grid, std::span<const double> rho_seq, long a1,
                            long a2, long m) {
    detail::check_hc_lambda_grid(lambda_grid);
    detail::check_rho_seq(rho_seq);
    if (!(a2 >= 1 && a1 >= a2)) throw DomainError("hc_cov_block: need a1 >= a2 >= 1");
    if (m < 3) throw DomainError("hc_cov_block: need m >= 3");
    const double n = static_cast<double>(m) * static_cast<double>(a1 + a2);
    const double prefactor = static_cast<double>(m) * static_cast<double>(a1) / n;
    const auto g = static_cast<Eigen::Index>(lambda_grid.size());
    CovGrid out{{lambda_grid.begin(), lambda_grid.end()}, Eigen::MatrixXd(g, g), {}};
    out.provenance.kind = CovProvenance::Kind::block;
    out.provenance.rho_seq.assign(rho_seq.begin(), rho_seq.end());
    out.provenance.a1 = a1;
    out.provenance.a2 = a2;
    out.provenance.m = m;
    for (Eigen::Index i = 0; i < g; ++i)
        for (Eigen::Index j = i; j < g; ++j) {
            const double a = lambda_grid[static_cast<std::size_t>(i)];
            const double b = lambda_grid[static_cast<std::size_t>(j)];
            const double v = prefactor * detail::hc_cov_numerator(a, b, rho_seq, a1) /
                             std::sqrt(sigma0_sq_hc(a) * sigma0_sq_hc(b));
            out.matrix(i, j) = out.matrix(j, i) = v;
        }
    return out;
}

/// MT limit covariance for l <= n:
///   sigma0(n)/sigma0(l) + mu0(n)(mu0(n) - mu0(l)) / (sigma0(l) sigma0(n)).
inline CovGrid mt_limit_cov(std::span<const double> lambda_grid, double m_trunc) {
    if (lambda_grid.empty()) throw DomainError("mt_limit_cov: empty lambda grid");
    const double lo = mt_decreasing_lower_bound(m_trunc);
    for (double l : lambda_grid)
        if (!(l >= lo && l < m_trunc))
            throw DomainError("mt_limit_cov: lambda " + std::to_string(l) + " outside the decreasing region [" +
                              std::to_string(lo) + ", " + std::to_string(m_trunc) + ")");
    const auto g = static_cast<Eigen::Index>(lambda_grid.size());
    CovGrid out{{lambda_grid.begin(), lambda_grid.end()}, Eigen::MatrixXd(g, g), {}};
    out.provenance.kind = CovProvenance::Kind::mt_limit;
    out.provenance.m_trunc = m_trunc;
    for (Eigen::Index i = 0; i < g; ++i)
        for (Eigen::Index j = i; j < g; ++j) {
            const double a = lambda_grid[static_cast<std::size_t>(i)];
            const double b = lambda_grid[static_cast<std::size_t>(j)];
            const MtMomentParams pl{std::min(a, b), m_trunc};
            const MtMomentParams pn{std::max(a, b), m_trunc};
            const double sl = std::sqrt(sigma0_sq_mt(pl));
            const double sn = std::sqrt(sigma0_sq_mt(pn));
            const double ml = mu0_mt(pl);
            const double mn = mu0_mt(pn);
            const double v = sn / sl + mn * (mn - ml) / (sl * sn);
            out.matrix(i, j) = out.matrix(j, i) = v;
        }
    return out;
}

/// Max absolute entrywise difference between two covariance grids on the same levels.
inline double cov_discrepancy(const CovGrid& a, const CovGrid& b) {
    if (a.grid_levels.size() != b.grid_levels.size())
        throw DomainError("cov_discrepancy: grid sizes differ");
    for (std::size_t i = 0; i < a.grid_levels.size(); ++i)
        if (std::abs(a.grid_levels[i] - b.grid_levels[i]) > 1e-12 * std::max(1.0, std::abs(a.grid_levels[i])))
            throw DomainError("cov_discrepancy: grid levels differ at index " + std::to_string(i));
    return (a.matrix - b.matrix).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Sampling a Gaussian vector with given covariance

/// Max of a mean-zero Gaussian vector; Cholesky factor computed once with
/// diagonal jitter 1e-12, escalated x10 up to 1e-8.
class GaussianMaxSampler {
public:
    explicit GaussianMaxSampler(const Eigen::MatrixXd& cov) {
        if (cov.rows() != cov.cols() || cov.rows() == 0)
            throw DomainError("GaussianMaxSampler: covariance must be square and non-empty");
        const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
        const auto n = sym.rows();
        for (double jitter = 1e-12; jitter <= 1e-8 * 1.0000001; jitter *= 10.0) {
            Eigen::LLT<Eigen::MatrixXd> llt(sym + jitter * Eigen::MatrixXd::Identity(n, n));
            if (llt.info() == Eigen::Success) {
                factor_ = llt.matrixL();
                jitter_ = jitter;
                return;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
        throw NumericalError("GaussianMaxSampler: covariance not positive semidefinite within jitter 1e-8; "
                             "smallest eigenvalue " + std::to_string(eig.eigenvalues().minCoeff()));
    }

    const Eigen::MatrixXd& factor() const { return factor_; }
    double jitter() const { return jitter_; }

    Eigen::VectorXd sample_vector(RngStream& rng) const {
        Eigen::VectorXd xi(factor_.rows());
        for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
        return factor_.triangularView<Eigen::Lower>() * xi;
    }

    double sample_max(RngStream& rng) const { return sample_vector(rng).maxCoeff(); }

private:
    Eigen::MatrixXd factor_;
    double jitter_ = 0.0;
};

/// One draw of the maximum of the MT limit process on `lambda_grid`.
inline double mt_limit_sup_sample(std::span<const double> lambda_grid, double m_trunc, RngStream& rng) {
    return GaussianMaxSampler(mt_limit_cov(lambda_grid, m_trunc).matrix).sample_max(rng);
}

}  // namespace hcdep
