#pragma once

// Reproducible generators: stationary dependent Gaussian sequences, heavy-tailed
// panels with Gaussian-copula cross-sectional dependence, and sparse
// alternatives with p^{1 - beta} signals of size sqrt(2 r log p).
//
// Mixing is structural: AR(1) is geometrically beta-mixing and the banded
// (finite moving average) construction is q-dependent.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "hcdep/errors.hpp"
#include "hcdep/gauss_kernel.hpp"
#include "hcdep/rng.hpp"

namespace hcdep {

class DependenceSpec {
public:
    enum class Kind { iid, ar1, banded };

    static DependenceSpec iid() { return DependenceSpec(Kind::iid, 0.0, {}); }

    static DependenceSpec ar1(double rho) {
        if (!(std::abs(rho) < 1.0)) throw DomainError("DependenceSpec::ar1: |rho| must be < 1");
        return DependenceSpec(Kind::ar1, rho, {});
    }

    /// Target autocorrelations rho_1..rho_q; zero beyond lag q.
    static DependenceSpec banded(std::vector<double> rho_seq) {
        for (double r : rho_seq)
            if (!(std::abs(r) < 1.0)) throw DomainError("DependenceSpec::banded: |rho_k| must be < 1");
        DependenceSpec spec(Kind::banded, 0.0, std::move(rho_seq));
        spec.ma_ = moving_average_coefficients(spec.band_);
        return spec;
    }

    Kind kind() const { return kind_; }
    double rho() const { return rho_; }
    const std::vector<double>& band() const { return band_; }
    std::size_t bandwidth() const { return band_.size(); }
    /// Unit-variance MA filter psi_0..psi_q for banded specs.
    const std::vector<double>& ma_filter() const { return ma_; }

    double autocorrelation(std::size_t lag) const {
        if (lag == 0) return 1.0;
        switch (kind_) {
            case Kind::iid: return 0.0;
            case Kind::ar1: return std::pow(rho_, static_cast<double>(lag));
            case Kind::banded: return lag <= band_.size() ? band_[lag - 1] : 0.0;
        }
        return 0.0;
    }

    /// rho_1, rho_2, ... up to max_lag, stopping after the last lag with |rho_k| >= tol.
    std::vector<double> rho_sequence(std::size_t max_lag, double tol = 1e-12) const {
        std::vector<double> out;
        if (kind_ == Kind::banded) {
            out.assign(band_.begin(), band_.begin() + static_cast<std::ptrdiff_t>(std::min(max_lag, band_.size())));
        } else if (kind_ == Kind::ar1) {
            for (std::size_t k = 1; k <= max_lag; ++k) {
                const double r = autocorrelation(k);
                if (std::abs(r) < tol) break;
                out.push_back(r);
            }
        }
        while (!out.empty() && std::abs(out.back()) < tol) out.pop_back();
        return out;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::iid: return "iid";
            case Kind::ar1: return "ar1(" + std::to_string(rho_) + ")";
            case Kind::banded: {
                std::string s = "banded(";
                for (std::size_t i = 0; i < band_.size(); ++i)
                    s += (i ? "," : "") + std::to_string(band_[i]);
                return s + ")";
            }
        }
        return "";
    }

private:
    DependenceSpec(Kind k, double rho, std::vector<double> band)
        : kind_(k), rho_(rho), band_(std::move(band)) {}

    // Innovations algorithm on the MA(q) autocovariance; converges to the
    // invertible factor when the spectral density 1 + 2 sum rho_k cos(k w) is
    // positive.
    static std::vector<double> moving_average_coefficients(const std::vector<double>& band) {
        const std::size_t q = band.size();
        if (q == 0) return {1.0};
        constexpr int kFreqs = 8192;
        double min_density = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kFreqs; ++i) {
            const double w = std::numbers::pi * i / kFreqs;
            double f = 1.0;
            for (std::size_t k = 0; k < q; ++k) f += 2.0 * band[k] * std::cos((k + 1.0) * w);
            min_density = std::min(min_density, f);
        }
        if (min_density <= 0.0)
            throw DomainError("DependenceSpec::banded: autocorrelations are not positive definite "
                              "(spectral density minimum " + std::to_string(min_density) + ")");
        auto gamma = [&](std::size_t h) { return h == 0 ? 1.0 : (h <= q ? band[h - 1] : 0.0); };
        // rows[n % (q+1)] holds theta_{n,1..q}; v[n % (q+1)] holds v_n.
        std::vector<std::vector<double>> rows(q + 1, std::vector<double>(q + 1, 0.0));
        std::vector<double> v(q + 1, 0.0);
        v[0] = 1.0;
        std::vector<double> prev(q + 1, 0.0);
        double prev_v = 1.0;
        constexpr std::size_t kMaxIter = 200000;
        for (std::size_t n = 1; n < kMaxIter; ++n) {
            auto& cur = rows[n % (q + 1)];
            std::fill(cur.begin(), cur.end(), 0.0);
            const std::size_t kmin = n > q ? n - q : 0;
            for (std::size_t k = kmin; k < n; ++k) {
                double acc = gamma(n - k);
                const auto& row_k = rows[k % (q + 1)];
                for (std::size_t j = kmin; j < k; ++j)
                    acc -= row_k[k - j] * cur[n - j] * v[j % (q + 1)];
                cur[n - k] = acc / v[k % (q + 1)];
            }
            double vn = 1.0;
            for (std::size_t j = kmin; j < n; ++j) vn -= cur[n - j] * cur[n - j] * v[j % (q + 1)];
            if (!(vn > 0.0)) throw NumericalError("DependenceSpec::banded: innovations variance <= 0");
            v[n % (q + 1)] = vn;
            double change = std::abs(vn - prev_v);
            for (std::size_t j = 1; j <= q; ++j) change = std::max(change, std::abs(cur[j] - prev[j]));
            prev = cur;
            prev_v = vn;
            if (n > q && change < 1e-15) break;
            if (n + 1 == kMaxIter)
                throw NumericalError("DependenceSpec::banded: MA factorization did not converge");
        }
        std::vector<double> psi(q + 1);
        psi[0] = 1.0;
        for (std::size_t j = 1; j <= q; ++j) psi[j] = prev[j];
        double norm = 0.0;
        for (double c : psi) norm += c * c;
        norm = std::sqrt(norm);
        for (double& c : psi) c /= norm;
        return psi;
    }

    Kind kind_;
    double rho_;
    std::vector<double> band_;
    std::vector<double> ma_{1.0};
};

class MarginalSpec {
public:
    enum class Kind { gaussian, student_t, pareto_sym };

    static MarginalSpec gaussian() { return MarginalSpec(Kind::gaussian, 0.0, 1.0); }

    /// Student t with `df` degrees of freedom; requires df > 2 + delta.
    static MarginalSpec student_t(double df, double delta = 1.0) {
        check_delta(delta);
        if (!(df > 2.0 + delta))
            throw DomainError("MarginalSpec::student_t: need df > 2 + delta (df=" + std::to_string(df) +
                              ", delta=" + std::to_string(delta) + ")");
        return MarginalSpec(Kind::student_t, df, delta);
    }

    /// Symmetric Pareto: P(|X| > y) = y^{-a} for y >= 1 before standardization.
    static MarginalSpec pareto_sym(double tail_index, double delta = 1.0) {
        check_delta(delta);
        if (!(tail_index > 2.0 + delta))
            throw DomainError("MarginalSpec::pareto_sym: need tail_index > 2 + delta");
        return MarginalSpec(Kind::pareto_sym, tail_index, delta);
    }

    Kind kind() const { return kind_; }
    double parameter() const { return param_; }
    double delta() const { return delta_; }

    /// Factor that makes the raw law unit-variance.
    double standardizer() const {
        switch (kind_) {
            case Kind::gaussian: return 1.0;
            case Kind::student_t: return std::sqrt((param_ - 2.0) / param_);
            case Kind::pareto_sym: return std::sqrt((param_ - 2.0) / param_);
        }
        return 1.0;
    }

    /// Standardized marginal quantile evaluated at Phi(z) (Gaussian copula).
    double from_gaussian(double z) const {
        switch (kind_) {
            case Kind::gaussian: return z;
            case Kind::student_t: {
                const boost::math::students_t dist(param_);
                const double x = z <= 0.0 ? boost::math::quantile(dist, std_cdf(z))
                                          : boost::math::quantile(boost::math::complement(dist, std_sf(z)));
                return standardizer() * x;
            }
            case Kind::pareto_sym: {
                const double q = 2.0 * std_sf(std::abs(z));
                const double y = std::pow(q, -1.0 / param_);
                return standardizer() * std::copysign(y, z);
            }
        }
        return z;
    }

    /// Direct standardized draw (used when there is no dependence to carry).
    double sample(RngStream& rng) const {
        switch (kind_) {
            case Kind::gaussian: return rng.normal();
            case Kind::student_t: {
                std::student_t_distribution<double> t(param_);
                return standardizer() * t(rng);
            }
            case Kind::pareto_sym: {
                const double u = rng.uniform();
                const double y = std::pow(u, -1.0 / param_);
                return standardizer() * ((rng() >> 63) ? y : -y);
            }
        }
        return 0.0;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::gaussian: return "gaussian";
            case Kind::student_t: return "student_t(" + std::to_string(param_) + ")";
            case Kind::pareto_sym: return "pareto_sym(" + std::to_string(param_) + ")";
        }
        return "";
    }

private:
    MarginalSpec(Kind k, double param, double delta) : kind_(k), param_(param), delta_(delta) {}

    static void check_delta(double delta) {
        if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("MarginalSpec: delta must lie in (0,1]");
    }

    Kind kind_;
    double param_;
    double delta_;
};

enum class SignalSign { positive, random };

struct AlternativeSpec {
    double beta_sparsity;
    double r_strength;
    SignalSign signal_sign = SignalSign::random;

    AlternativeSpec(double beta, double r, SignalSign sign = SignalSign::random)
        : beta_sparsity(beta), r_strength(r), signal_sign(sign) {
        if (!(beta > 0.5 && beta < 1.0)) throw DomainError("AlternativeSpec: beta must lie in (1/2,1)");
        if (!(r >= 0.0)) throw DomainError("AlternativeSpec: r must be >= 0");
    }

    std::size_t signal_count(std::size_t p) const {
        const auto k = static_cast<std::size_t>(
            std::llround(std::pow(static_cast<double>(p), 1.0 - beta_sparsity)));
        if (k < 1) throw DomainError("AlternativeSpec: round(p^{1-beta}) must be >= 1");
        return std::min(k, p);
    }

    double magnitude(std::size_t p) const {
        return std::sqrt(2.0 * r_strength * std::log(static_cast<double>(p)));
    }
};

struct SignalPlacement {
    std::vector<std::size_t> indices;  ///< sorted ascending
    std::vector<double> shifts;        ///< signed mean shift, aligned with indices
};

/// Uniformly random signal set (partial Fisher-Yates) with signed magnitudes.
inline SignalPlacement place_signals(std::size_t p, const AlternativeSpec& alt, RngStream& rng) {
    const std::size_t k = alt.signal_count(p);
    std::vector<std::size_t> perm(p);
    for (std::size_t i = 0; i < p; ++i) perm[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(p - i));
        std::swap(perm[i], perm[std::min(j, p - 1)]);
    }
    std::vector<std::size_t> idx(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(idx.begin(), idx.end());
    const double mu = alt.magnitude(p);
    SignalPlacement out;
    out.indices = idx;
    out.shifts.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const bool negative = alt.signal_sign == SignalSign::random && (rng() >> 63) != 0;
        out.shifts.push_back(negative ? -mu : mu);
    }
    return out;
}

/// Stationary N(0,1) sequence with the autocorrelation of `dep`, no signals.
inline std::vector<double> gen_stationary_gaussian(std::size_t p, const DependenceSpec& dep, RngStream& rng) {
    std::vector<double> z(p);
    switch (dep.kind()) {
        case DependenceSpec::Kind::iid:
            for (auto& x : z) x = rng.normal();
            break;
        case DependenceSpec::Kind::ar1: {
            const double r = dep.rho();
            const double s = std::sqrt(1.0 - r * r);
            double prev = rng.normal();
            if (p > 0) z[0] = prev;
            for (std::size_t t = 1; t < p; ++t) {
                prev = r * prev + s * rng.normal();
                z[t] = prev;
            }
            break;
        }
        case DependenceSpec::Kind::banded: {
            const auto& psi = dep.ma_filter();
            const std::size_t q = psi.size() - 1;
            std::vector<double> eps(p + q);
            for (auto& e : eps) e = rng.normal();
            for (std::size_t t = 0; t < p; ++t) {
                double acc = 0.0;
                for (std::size_t j = 0; j <= q; ++j) acc += psi[j] * eps[t + q - j];
                z[t] = acc;
            }
            break;
        }
    }
    return z;
}

struct GeneratedZ {
    std::vector<double> z;
    SignalPlacement signals;
};

inline GeneratedZ gen_dependent_z(std::size_t p, const DependenceSpec& dep,
                                  const std::optional<AlternativeSpec>& alt, RngStream& rng) {
    GeneratedZ out;
    out.z = gen_stationary_gaussian(p, dep, rng);
    if (alt) {
        out.signals = place_signals(p, *alt, rng);
        for (std::size_t i = 0; i < out.signals.indices.size(); ++i)
            out.z[out.signals.indices[i]] += out.signals.shifts[i];
    }
    return out;
}

struct GeneratedPanel {
    Eigen::MatrixXd data;  ///< n x p
    SignalPlacement signals;
};

/// n i.i.d. rows; within a row, columns follow `dep` through a Gaussian copula
/// with standardized `marg` marginals. Signal columns are shifted by
/// sqrt(2 r log p) / sqrt(n) per observation so E T_j is about sqrt(2 r log p).
inline GeneratedPanel gen_heavy_panel(std::size_t n, std::size_t p, const DependenceSpec& dep,
                                      const MarginalSpec& marg,
                                      const std::optional<AlternativeSpec>& alt, RngStream& rng) {
    if (n < 2) throw DomainError("gen_heavy_panel: n must be >= 2");
    GeneratedPanel out;
    out.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    const bool independent = dep.kind() == DependenceSpec::Kind::iid;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        if (independent) {
            for (std::size_t j = 0; j < p; ++j) out.data(row, static_cast<Eigen::Index>(j)) = marg.sample(rng);
        } else {
            const auto z = gen_stationary_gaussian(p, dep, rng);
            for (std::size_t j = 0; j < p; ++j)
                out.data(row, static_cast<Eigen::Index>(j)) = marg.from_gaussian(z[j]);
        }
    }
    if (alt) {
        out.signals = place_signals(p, *alt, rng);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (std::size_t i = 0; i < out.signals.indices.size(); ++i)
            out.data.col(static_cast<Eigen::Index>(out.signals.indices[i])).array() +=
                out.signals.shifts[i] * scale;
    }
    return out;
}

}  // namespace hcdep
