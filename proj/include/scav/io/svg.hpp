// Static SVG line plots: stacked panels with linear axes, tick labels,
// axis titles and a legend. Output depends only on the data.
#pragma once

#include "scav/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace scav::io {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

struct Panel {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
};

namespace svg_detail {

inline const char* palette(std::size_t k) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    return colors[k % 8];
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string label(double v) {
    char buf[32];
    if (v == 0.0)
        return "0";
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

/// Roughly five round ticks covering [lo, hi].
inline std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
        out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return out;
}

}  // namespace svg_detail

/// Renders the panels one above the other.
[[nodiscard]] inline std::string render_svg(const std::vector<Panel>& panels, int width = 720,
                                            int panel_height = 300) {
    using namespace svg_detail;
    const double ml = 80, mr = 170, mt = 36, mb = 50;
    const int height = panel_height * static_cast<int>(panels.size());
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const auto& pn = panels[p];
        const double y0 = static_cast<double>(p) * panel_height;
        const double px = ml, py = y0 + mt, pw = width - ml - mr, ph = panel_height - mt - mb;

        double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
        for (const auto& s : pn.series)
            for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
                if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
                xlo = std::min(xlo, s.x[k]);
                xhi = std::max(xhi, s.x[k]);
                ylo = std::min(ylo, s.y[k]);
                yhi = std::max(yhi, s.y[k]);
            }
        if (!std::isfinite(xlo)) {
            xlo = 0;
            xhi = 1;
            ylo = 0;
            yhi = 1;
        }
        if (xhi == xlo) xhi = xlo + 1.0;
        if (yhi == ylo) {
            yhi += 0.5 * std::max(1.0, std::abs(yhi));
            ylo -= 0.5 * std::max(1.0, std::abs(ylo));
        }
        const double pad = 0.05 * (yhi - ylo);
        ylo -= pad;
        yhi += pad;
        auto X = [&](double x) { return px + (x - xlo) / (xhi - xlo) * pw; };
        auto Y = [&](double y) { return py + ph - (y - ylo) / (yhi - ylo) * ph; };

        os << "<text x=\"" << num(px + pw / 2) << "\" y=\"" << num(y0 + 22)
           << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(pn.title) << "</text>\n";
        os << "<rect x=\"" << num(px) << "\" y=\"" << num(py) << "\" width=\"" << num(pw)
           << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double t : ticks(xlo, xhi)) {
            os << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(py + ph) << "\" x2=\"" << num(X(t))
               << "\" y2=\"" << num(py + ph + 5) << "\" stroke=\"black\"/>";
            os << "<text x=\"" << num(X(t)) << "\" y=\"" << num(py + ph + 18)
               << "\" text-anchor=\"middle\">" << label(t) << "</text>\n";
        }
        for (double t : ticks(ylo, yhi)) {
            os << "<line x1=\"" << num(px - 5) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(px)
               << "\" y2=\"" << num(Y(t)) << "\" stroke=\"black\"/>";
            os << "<line x1=\"" << num(px) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(px + pw)
               << "\" y2=\"" << num(Y(t)) << "\" stroke=\"#e0e0e0\"/>";
            os << "<text x=\"" << num(px - 8) << "\" y=\"" << num(Y(t) + 4)
               << "\" text-anchor=\"end\">" << label(t) << "</text>\n";
        }
        os << "<text x=\"" << num(px + pw / 2) << "\" y=\"" << num(py + ph + 38)
           << "\" text-anchor=\"middle\">" << escape(pn.xlabel) << "</text>\n";
        os << "<text transform=\"translate(" << num(px - 62) << ',' << num(py + ph / 2)
           << ") rotate(-90)\" text-anchor=\"middle\">" << escape(pn.ylabel) << "</text>\n";

        for (std::size_t s = 0; s < pn.series.size(); ++s) {
            const auto& sr = pn.series[s];
            os << "<polyline fill=\"none\" stroke=\"" << palette(s) << "\" stroke-width=\"1.5\" points=\"";
            bool first = true;
            for (std::size_t k = 0; k < std::min(sr.x.size(), sr.y.size()); ++k) {
                if (!std::isfinite(sr.x[k]) || !std::isfinite(sr.y[k])) continue;
                os << (first ? "" : " ") << num(X(sr.x[k])) << ',' << num(Y(sr.y[k]));
                first = false;
            }
            os << "\"/>\n";
            if (sr.markers)
                for (std::size_t k = 0; k < std::min(sr.x.size(), sr.y.size()); ++k)
                    if (std::isfinite(sr.x[k]) && std::isfinite(sr.y[k]))
                        os << "<circle cx=\"" << num(X(sr.x[k])) << "\" cy=\"" << num(Y(sr.y[k]))
                           << "\" r=\"3\" fill=\"" << palette(s) << "\"/>\n";
            const double ly = py + 12 + 18.0 * static_cast<double>(s);
            os << "<line x1=\"" << num(px + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
               << num(px + pw + 34) << "\" y2=\"" << num(ly) << "\" stroke=\"" << palette(s)
               << "\" stroke-width=\"2\"/>";
            os << "<text x=\"" << num(px + pw + 40) << "\" y=\"" << num(ly + 4) << "\">"
               << escape(sr.name) << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

inline void write_svg(const std::string& path, const std::vector<Panel>& panels) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write '" + path + "'");
    out << render_svg(panels);
}

/// Keeps at most n points of a series, evenly strided, to bound SVG size.
[[nodiscard]] inline Series decimate(Series s, std::size_t n) {
    if (s.x.size() <= n || n < 2) return s;
    Series out{s.name, {}, {}, s.markers};
    const double step = static_cast<double>(s.x.size() - 1) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const auto j = static_cast<std::size_t>(std::llround(step * static_cast<double>(k)));
        out.x.push_back(s.x[j]);
        out.y.push_back(s.y[j]);
    }
    return out;
}

/// Bucketed min and max, for pulse trains that plain striding would alias.
[[nodiscard]] inline Series minmax_decimate(const Series& s, std::size_t buckets) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (n <= 2 * buckets || buckets == 0) return s;
    Series out{s.name, {}, {}, s.markers};
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t a = b * n / buckets, e = (b + 1) * n / buckets;
        std::size_t lo = a, hi = a;
        for (std::size_t k = a; k < e; ++k) {
            if (s.y[k] < s.y[lo]) lo = k;
            if (s.y[k] > s.y[hi]) hi = k;
        }
        const std::size_t first = std::min(lo, hi), second = std::max(lo, hi);
        out.x.push_back(s.x[first]);
        out.y.push_back(s.y[first]);
        if (second != first) {
            out.x.push_back(s.x[second]);
            out.y.push_back(s.y[second]);
        }
    }
    return out;
}

}  // namespace scav::io
