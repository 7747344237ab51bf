// plot.hpp - static SVG line plots with no external dependencies: linear or
// log-log axes, multi-series overlays, and least-squares slope annotation for
// error-order figures. Output is a pure function of the input data.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace hamsym::plot {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    bool log_x = false;
    bool log_y = false;
    bool annotate_slope = false;  // least-squares slope of the first series
    std::string title;
    std::string x_label = "x";
    std::string y_label = "y";
    int width = 640;
    int height = 480;
};

inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_slope: need at least two points");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0 || y[i] <= 0) continue;
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_slope(lx, ly);
}

namespace svg_detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline const char* color(size_t idx) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    return palette[idx % 6];
}

}  // namespace svg_detail

// Renders the series into a self-contained SVG document. Log axes require
// strictly positive data; empty series are rejected.
inline std::string svg_line_plot(const std::vector<Series>& series, const PlotOptions& opt = {}) {
    if (series.empty()) throw std::invalid_argument("svg_line_plot: no series");
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size()) {
            throw std::invalid_argument("svg_line_plot: empty or ragged series '" + s.name + "'");
        }
    }

    auto tx = [&](double v) {
        if (!opt.log_x) return v;
        if (v <= 0) throw std::invalid_argument("svg_line_plot: log axis requires positive x");
        return std::log10(v);
    };
    auto ty = [&](double v) {
        if (!opt.log_y) return v;
        if (v <= 0) throw std::invalid_argument("svg_line_plot: log axis requires positive y");
        return std::log10(v);
    };

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (xmax == xmin) { xmax += 0.5; xmin -= 0.5; }
    if (ymax == ymin) { ymax += 0.5; ymin -= 0.5; }

    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = opt.width - ml - mr;
    const double ph = opt.height - mt - mb;
    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - ymin) / (ymax - ymin) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) +
           "\" height=\"" + std::to_string(opt.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<rect x=\"" + svg_detail::num(ml) + "\" y=\"" + svg_detail::num(mt) + "\" width=\"" +
           svg_detail::num(pw) + "\" height=\"" + svg_detail::num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    // axis ticks and grid
    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / n_ticks;
        const double fy = ymin + (ymax - ymin) * i / n_ticks;
        const double gx = ml + pw * i / n_ticks;
        const double gy = mt + ph - ph * i / n_ticks;
        const double label_x = opt.log_x ? std::pow(10.0, fx) : fx;
        const double label_y = opt.log_y ? std::pow(10.0, fy) : fy;
        out += "<line x1=\"" + svg_detail::num(gx) + "\" y1=\"" + svg_detail::num(mt + ph) +
               "\" x2=\"" + svg_detail::num(gx) + "\" y2=\"" + svg_detail::num(mt + ph + 5) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + svg_detail::num(gx) + "\" y=\"" + svg_detail::num(mt + ph + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + svg_detail::num(label_x) +
               "</text>\n";
        out += "<line x1=\"" + svg_detail::num(ml - 5) + "\" y1=\"" + svg_detail::num(gy) +
               "\" x2=\"" + svg_detail::num(ml) + "\" y2=\"" + svg_detail::num(gy) +
               "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + svg_detail::num(ml - 8) + "\" y=\"" + svg_detail::num(gy + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + svg_detail::num(label_y) +
               "</text>\n";
    }

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        std::string points;
        for (size_t i = 0; i < s.x.size(); ++i) {
            points += svg_detail::num(px(s.x[i])) + "," + svg_detail::num(py(s.y[i])) + " ";
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(svg_detail::color(si)) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        out += "<text x=\"" + svg_detail::num(ml + 10) + "\" y=\"" +
               svg_detail::num(mt + 16 + 14 * static_cast<double>(si)) +
               "\" font-size=\"12\" fill=\"" + svg_detail::color(si) + "\">" + s.name +
               "</text>\n";
    }

    if (!opt.title.empty()) {
        out += "<text x=\"" + svg_detail::num(opt.width / 2.0) + "\" y=\"20\" font-size=\"14\" "
               "text-anchor=\"middle\">" + opt.title + "</text>\n";
    }
    out += "<text x=\"" + svg_detail::num(ml + pw / 2) + "\" y=\"" +
           svg_detail::num(opt.height - 12.0) + "\" font-size=\"12\" text-anchor=\"middle\">" +
           opt.x_label + "</text>\n";
    out += "<text x=\"16\" y=\"" + svg_detail::num(mt + ph / 2) +
           "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           svg_detail::num(mt + ph / 2) + ")\">" + opt.y_label + "</text>\n";

    if (opt.annotate_slope) {
        const double slope = (opt.log_x && opt.log_y)
                                 ? fit_loglog_slope(series.front().x, series.front().y)
                                 : fit_slope(series.front().x, series.front().y);
        out += "<text x=\"" + svg_detail::num(ml + pw - 10) + "\" y=\"" +
               svg_detail::num(mt + 16) + "\" font-size=\"12\" text-anchor=\"end\">slope " +
               svg_detail::num(slope) + "</text>\n";
    }

    out += "</svg>\n";
    return out;
}

}  // namespace hamsym::plot
