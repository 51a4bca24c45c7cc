#pragma once

// Standalone SVG output: empirical CDF overlays and power heatmaps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hcdep/cli/csv.hpp"

namespace hcdep::cli {

struct CdfSeries {
    std::string label;
    std::vector<double> sample;  ///< plotted as an empirical step CDF
};

struct CdfCurve {
    std::string label;
    std::function<double(double)> cdf;  ///< plotted as a smooth curve
};

namespace detail {

inline const char* palette(std::size_t i) {
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    return colours[i % 5];
}

inline std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace detail

inline void svg_cdf_overlay(std::ostream& os, const std::string& title, const std::vector<CdfSeries>& series,
                            const std::vector<CdfCurve>& curves) {
    const double w = 640;
    const double h = 420;
    const double ml = 60;
    const double mr = 20;
    const double mt = 40;
    const double mb = 50;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& s : series)
        for (double x : s.sample)
            if (std::isfinite(x)) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
    if (!(lo < hi)) {
        lo = -1;
        hi = 1;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    auto px = [&](double x) { return ml + (x - lo) / (hi - lo) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - y * (h - mt - mb); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << detail::svg_escape(title)
       << "</text>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << py(0) << "\" x2=\"" << w - mr << "\" y2=\"" << py(0)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << py(0) << "\" x2=\"" << ml << "\" y2=\"" << py(1)
       << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double x = lo + (hi - lo) * k / 4.0;
        os << "<text x=\"" << px(x) << "\" y=\"" << h - mb + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
           << format_number(std::round(x * 100) / 100) << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(k / 4.0) + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
           << format_number(k / 4.0) << "</text>\n";
    }

    std::size_t colour = 0;
    auto legend = [&](const std::string& label, const char* stroke, bool dashed) {
        const double y = mt + 14.0 * static_cast<double>(colour);
        os << "<line x1=\"" << ml + 10 << "\" y1=\"" << y << "\" x2=\"" << ml + 30 << "\" y2=\"" << y << "\" stroke=\""
           << stroke << "\"" << (dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
        os << "<text x=\"" << ml + 36 << "\" y=\"" << y + 4 << "\" font-size=\"11\">" << detail::svg_escape(label)
           << "</text>\n";
    };
    for (const auto& s : series) {
        auto v = s.sample;
        std::sort(v.begin(), v.end());
        const char* stroke = detail::palette(colour);
        os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" points=\"";
        os << px(lo) << ',' << py(0);
        const double n = static_cast<double>(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = std::clamp(v[i], lo, hi);
            os << ' ' << px(x) << ',' << py(static_cast<double>(i) / n) << ' ' << px(x) << ','
               << py(static_cast<double>(i + 1) / n);
        }
        os << ' ' << px(hi) << ',' << py(1) << "\"/>\n";
        legend(s.label, stroke, false);
        ++colour;
    }
    for (const auto& c : curves) {
        const char* stroke = detail::palette(colour);
        os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-dasharray=\"4 3\" points=\"";
        for (int k = 0; k <= 200; ++k) {
            const double x = lo + (hi - lo) * k / 200.0;
            os << (k ? " " : "") << px(x) << ',' << py(std::clamp(c.cdf(x), 0.0, 1.0));
        }
        os << "\"/>\n";
        legend(c.label, stroke, true);
        ++colour;
    }
    os << "</svg>\n";
}

/// Grid of cells coloured by value in [0, 1]; rows are betas, columns are rs.
inline void svg_heatmap(std::ostream& os, const std::string& title, const std::vector<double>& betas,
                        const std::vector<double>& rs, const std::vector<double>& values) {
    const double cell = 48;
    const double ml = 70;
    const double mt = 50;
    const double w = ml + cell * static_cast<double>(rs.size()) + 20;
    const double h = mt + cell * static_cast<double>(betas.size()) + 50;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << detail::svg_escape(title)
       << "</text>\n";
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double y = mt + cell * static_cast<double>(i);
        os << "<text x=\"" << ml - 6 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
           << format_number(betas[i]) << "</text>\n";
        for (std::size_t j = 0; j < rs.size(); ++j) {
            const double v = std::clamp(values[i * rs.size() + j], 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255 * (1 - v)));
            const double x = ml + cell * static_cast<double>(j);
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
               << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"white\"/>\n";
            os << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
               << "\" text-anchor=\"middle\" font-size=\"10\" fill=\"" << (v > 0.5 ? "white" : "black") << "\">"
               << format_number(std::round(v * 100) / 100) << "</text>\n";
        }
    }
    const double yb = mt + cell * static_cast<double>(betas.size());
    for (std::size_t j = 0; j < rs.size(); ++j)
        os << "<text x=\"" << ml + cell * (static_cast<double>(j) + 0.5) << "\" y=\"" << yb + 16
           << "\" text-anchor=\"middle\" font-size=\"11\">" << format_number(rs[j]) << "</text>\n";
    os << "<text x=\"" << ml + cell * static_cast<double>(rs.size()) / 2 << "\" y=\"" << yb + 36
       << "\" text-anchor=\"middle\" font-size=\"12\">r</text>\n";
    os << "<text x=\"14\" y=\"" << mt + cell * static_cast<double>(betas.size()) / 2
       << "\" font-size=\"12\">beta</text>\n";
    os << "</svg>\n";
}

}  // namespace hcdep::cli
