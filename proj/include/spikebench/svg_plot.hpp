#pragma once

// Minimal standalone SVG line/scatter charts for the sweep reports. Output is
// a pure function of the input tables, so plot files regenerate
// byte-identically.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace spikebench {

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
    bool dashed = false;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline const char* series_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                    "#bcbd22", "#17becf", "#393b79", "#ad494a"};
    return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

}  // namespace detail

inline std::string render_chart(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
    const double x0 = 70, y0 = 46, x1 = 640, y1 = 440;
    const double width = 880, height = 500;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series) {
        for (const auto& [px, py] : s.points) {
            const double x = opt.log_x ? std::log10(std::max(px, 1e-300)) : px;
            if (first) {
                xmin = xmax = x;
                ymin = ymax = py;
                first = false;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, py);
                ymax = std::max(ymax, py);
            }
        }
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
    const double xpad = 0.05 * (xmax - xmin);
    const double ypad = 0.05 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) {
        const double x = opt.log_x ? std::log10(std::max(v, 1e-300)) : v;
        return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0);
    };
    auto sy = [&](double v) { return y1 - (v - ymin) / (ymax - ymin) * (y1 - y0); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      detail::svg_num(width) + "\" height=\"" + detail::svg_num(height) +
                      "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + detail::svg_num((x0 + x1) / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-size=\"15\">" + opt.title + "</text>\n";

    // axes + ticks
    svg += "<line x1=\"" + detail::svg_num(x0) + "\" y1=\"" + detail::svg_num(y1) + "\" x2=\"" +
           detail::svg_num(x1) + "\" y2=\"" + detail::svg_num(y1) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + detail::svg_num(x0) + "\" y1=\"" + detail::svg_num(y0) + "\" x2=\"" +
           detail::svg_num(x0) + "\" y2=\"" + detail::svg_num(y1) +
           "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        const double px = x0 + (x1 - x0) * i / 4.0;
        const double py = y1 - (y1 - y0) * i / 4.0;
        const double xv = opt.log_x ? std::pow(10.0, fx) : fx;
        svg += "<line x1=\"" + detail::svg_num(px) + "\" y1=\"" + detail::svg_num(y1) +
               "\" x2=\"" + detail::svg_num(px) + "\" y2=\"" + detail::svg_num(y1 + 5) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::svg_num(px) + "\" y=\"" + detail::svg_num(y1 + 18) +
               "\" text-anchor=\"middle\">" + detail::tick_label(xv) + "</text>\n";
        svg += "<line x1=\"" + detail::svg_num(x0 - 5) + "\" y1=\"" + detail::svg_num(py) +
               "\" x2=\"" + detail::svg_num(x0) + "\" y2=\"" + detail::svg_num(py) +
               "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + detail::svg_num(x0 - 8) + "\" y=\"" + detail::svg_num(py + 4) +
               "\" text-anchor=\"end\">" + detail::tick_label(fy) + "</text>\n";
    }
    svg += "<text x=\"" + detail::svg_num((x0 + x1) / 2) + "\" y=\"" +
           detail::svg_num(y1 + 38) + "\" text-anchor=\"middle\">" + opt.x_label + "</text>\n";
    svg += "<text x=\"16\" y=\"" + detail::svg_num((y0 + y1) / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::svg_num((y0 + y1) / 2) + ")\">" + opt.y_label + "</text>\n";

    // series
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = detail::series_color(si);
        if (s.points.size() > 1) {
            svg += "<polyline fill=\"none\" stroke=\"";
            svg += color;
            svg += "\" stroke-width=\"1.5\"";
            if (s.dashed) svg += " stroke-dasharray=\"6 3\"";
            svg += " points=\"";
            for (const auto& [px, py] : s.points) {
                svg += detail::svg_num(sx(px)) + "," + detail::svg_num(sy(py)) + " ";
            }
            svg += "\"/>\n";
        }
        for (const auto& [px, py] : s.points) {
            svg += "<circle cx=\"" + detail::svg_num(sx(px)) + "\" cy=\"" +
                   detail::svg_num(sy(py)) + "\" r=\"3\" fill=\"";
            svg += color;
            svg += "\"/>\n";
        }
        const double ly = y0 + 16.0 * static_cast<double>(si);
        svg += "<line x1=\"" + detail::svg_num(x1 + 14) + "\" y1=\"" + detail::svg_num(ly) +
               "\" x2=\"" + detail::svg_num(x1 + 38) + "\" y2=\"" + detail::svg_num(ly) +
               "\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"2\"";
        if (s.dashed) svg += " stroke-dasharray=\"6 3\"";
        svg += "/>\n";
        svg += "<text x=\"" + detail::svg_num(x1 + 44) + "\" y=\"" + detail::svg_num(ly + 4) +
               "\">" + s.name + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace spikebench
