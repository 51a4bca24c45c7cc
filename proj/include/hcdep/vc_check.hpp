#pragma once

// Shattering checks for subgraph families {(x, t) : t < f(x, s)}.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hcdep/errors.hpp"
#include "hcdep/rng.hpp"

namespace hcdep {

struct PlanePoint {
    double x;
    double t;
};

using Subset = std::uint32_t;  ///< bit i set when point i is picked out

inline constexpr std::size_t kMaxExactPoints = 6;

/// f(x, s) = s + 2 on x >= s, s - 2 on x < s.
inline double step_family(double x, double s) { return x >= s ? s + 2.0 : s - 2.0; }

inline bool in_subgraph(double x, double t, double s) { return t < step_family(x, s); }

inline Subset picked_out(std::span<const PlanePoint> pts, const std::function<bool(const PlanePoint&, double)>& member,
                         double s) {
    Subset mask = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (member(pts[i], s)) mask |= Subset{1} << i;
    return mask;
}

/// Every subset cut out by the step family, found exactly: membership of point
/// i changes only at s in {x_i, t_i - 2, t_i + 2}, so probing those values,
/// midpoints between consecutive ones, and two outer sentinels visits every cell.
inline std::set<Subset> achievable_subsets(std::span<const PlanePoint> pts) {
    if (pts.empty()) throw DomainError("achievable_subsets: need at least one point");
    if (pts.size() > kMaxExactPoints)
        throw DomainError("achievable_subsets: exact enumeration supports at most " +
                          std::to_string(kMaxExactPoints) + " points");
    std::vector<double> crit;
    for (const auto& p : pts) {
        crit.push_back(p.x);
        crit.push_back(p.t - 2.0);
        crit.push_back(p.t + 2.0);
    }
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

    std::vector<double> probes{crit.front() - 1.0, crit.back() + 1.0};
    for (std::size_t i = 0; i < crit.size(); ++i) {
        probes.push_back(crit[i]);
        if (i + 1 < crit.size()) probes.push_back(0.5 * (crit[i] + crit[i + 1]));
    }
    const auto member = [](const PlanePoint& q, double s) { return in_subgraph(q.x, q.t, s); };
    std::set<Subset> out;
    for (double s : probes) out.insert(picked_out(pts, member, s));
    return out;
}

inline bool is_shattered(const std::set<Subset>& achieved, std::size_t n) {
    return achieved.size() == (std::size_t{1} << n);
}

inline bool is_shattered(std::span<const PlanePoint> pts) {
    return is_shattered(achievable_subsets(pts), pts.size());
}

/// Subsets the family misses, in increasing bitmask order.
inline std::vector<Subset> missing_subsets(const std::set<Subset>& achieved, std::size_t n) {
    std::vector<Subset> out;
    for (Subset m = 0; m < (Subset{1} << n); ++m)
        if (!achieved.count(m)) out.push_back(m);
    return out;
}

/// Brute-force variant for an arbitrary family f(x, s) over a supplied s grid.
/// Reports a lower bound on the achievable subsets.
struct VcFamily {
    std::function<double(double, double)> f;

    std::set<Subset> achievable(std::span<const PlanePoint> pts, std::span<const double> s_grid) const {
        if (pts.size() > 8 * sizeof(Subset) - 1) throw DomainError("VcFamily: too many points");
        const auto member = [this](const PlanePoint& q, double s) { return q.t < f(q.x, s); };
        std::set<Subset> out;
        for (double s : s_grid) out.insert(picked_out(pts, member, s));
        return out;
    }
};

inline std::string subset_label(Subset m, std::size_t n) {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < n; ++i)
        if (m & (Subset{1} << i)) {
            if (!first) s += ",";
            s += std::to_string(i + 1);
            first = false;
        }
    return s + "}";
}

/// `n` points uniform on [x_lo, x_hi] x [t_lo, t_hi].
inline std::vector<PlanePoint> random_points(std::size_t n, RngStream& rng, double x_lo = 0.0, double x_hi = 10.0,
                                             double t_lo = -5.0, double t_hi = 10.0) {
    std::vector<PlanePoint> out(n);
    for (auto& q : out) {
        q.x = x_lo + (x_hi - x_lo) * rng.uniform();
        q.t = t_lo + (t_hi - t_lo) * rng.uniform();
    }
    return out;
}

/// The three-point configuration shattered by the step family.
inline std::vector<PlanePoint> shattered_triple() { return {{2.75, 2.25}, {3.75, 3.25}, {6.25, 5.25}}; }

}  // namespace hcdep
