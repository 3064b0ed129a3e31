#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eulag/errors.hpp"

namespace eulag {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

// Static SVG line chart; log-scale y by default since every quantity of
// interest spans many decades.
struct PlotSpec {
    std::string title;
    std::string x_label = "k";
    std::string y_label = "f(x_k) - f(x*)";
    bool log_x = false;
    bool log_y = true;
    std::vector<PlotSeries> series;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string short_number(double v) {
    char buf[32];
    if (v != 0.0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-3))
        std::snprintf(buf, sizeof(buf), "%.0e", v);
    else
        std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace detail

inline std::string render_svg(const PlotSpec& spec) {
    require(!spec.series.empty(), errc::invalid_argument, "plot needs at least one series");

    const double width = 720, height = 480;
    const double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    auto usable = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return false;
        if (spec.log_x && x <= 0.0) return false;
        if (spec.log_y && y <= 0.0) return false;
        return true;
    };

    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool any = false;
    for (const PlotSeries& s : spec.series) {
        for (const auto& [x, y] : s.points) {
            if (!usable(x, y)) continue;
            if (!any) {
                xmin = xmax = x;
                ymin = ymax = y;
                any = true;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    require(any, errc::invalid_argument, "plot has no drawable points");
    if (xmin == xmax) xmax = xmin + 1.0;
    if (ymin == ymax) ymax = ymin * 2.0 + 1.0;

    auto fwd = [](bool lg, double v) { return lg ? std::log10(v) : v; };
    const double fx0 = fwd(spec.log_x, xmin), fx1 = fwd(spec.log_x, xmax);
    const double fy0 = fwd(spec.log_y, ymin), fy1 = fwd(spec.log_y, ymax);
    auto px = [&](double x) { return left + (fwd(spec.log_x, x) - fx0) / (fx1 - fx0) * pw; };
    auto py = [&](double y) { return top + ph - (fwd(spec.log_y, y) - fy0) / (fy1 - fy0) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << detail::xml_escape(spec.title)
            << "</text>\n";

    // axes
    svg << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw
        << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + ph << "\" stroke=\"black\"/>\n";

    auto tick_values = [&](bool lg, double lo, double hi) {
        std::vector<double> ticks;
        if (lg) {
            const int d0 = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
            const int d1 = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
            const int step = std::max(1, (d1 - d0) / 8);
            for (int d = d0; d <= d1; d += step) ticks.push_back(std::pow(10.0, d));
        } else {
            for (int i = 0; i <= 5; ++i) ticks.push_back(lo + (hi - lo) * i / 5.0);
        }
        return ticks;
    };
    for (double tx : tick_values(spec.log_x, xmin, xmax)) {
        const double x = px(tx);
        svg << "<line x1=\"" << x << "\" y1=\"" << top + ph << "\" x2=\"" << x << "\" y2=\""
            << top + ph + 4 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << top + ph + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::short_number(tx) << "</text>\n";
    }
    for (double ty : tick_values(spec.log_y, ymin, ymax)) {
        const double y = py(ty);
        svg << "<line x1=\"" << left - 4 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\""
            << y << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::short_number(ty) << "</text>\n";
    }
    svg << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << detail::xml_escape(spec.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << top + ph / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << top + ph / 2 << ")\">"
        << detail::xml_escape(spec.y_label) << "</text>\n";

    // series, split into segments at undrawable points
    for (std::size_t s = 0; s < spec.series.size(); ++s) {
        const char* color = palette[s % (sizeof(palette) / sizeof(palette[0]))];
        std::ostringstream seg;
        bool open = false;
        auto flush = [&]() {
            if (open) {
                svg << "<polyline fill=\"none\" stroke=\"" << color
                    << "\" stroke-width=\"1.5\" points=\"" << seg.str() << "\"/>\n";
                seg.str("");
                open = false;
            }
        };
        for (const auto& [x, y] : spec.series[s].points) {
            if (!usable(x, y)) {
                flush();
                continue;
            }
            seg << px(x) << "," << py(y) << " ";
            open = true;
        }
        flush();

        const double ly = top + 16.0 * static_cast<double>(s);
        svg << "<line x1=\"" << left + pw - 130 << "\" y1=\"" << ly << "\" x2=\""
            << left + pw - 110 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << left + pw - 104 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">"
            << detail::xml_escape(spec.series[s].label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace eulag
