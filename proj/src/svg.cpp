#include "hybridsp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace hybridsp::svg {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

}  // namespace

std::string palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % (sizeof colors / sizeof colors[0])];
}

std::string render(const Plot& plot, int width, int height, std::size_t max_points) {
    Range rx;
    Range ry;
    for (const auto& s : plot.series) {
        for (const double v : s.x) rx.add(v);
        for (const double v : s.y) ry.add(v);
    }
    for (const auto& m : plot.markers) {
        rx.add(m.x);
        ry.add(m.y);
    }
    for (const auto& r : plot.ref_lines) {
        (r.horizontal ? ry : rx).add(r.value);
    }
    rx.finish();
    ry.finish();

    const double left = 70.0;
    const double right = 150.0;
    const double top = 40.0;
    const double bottom = 50.0;
    double pw = width - left - right;
    double ph = height - top - bottom;
    if (plot.equal_aspect) {
        const double scale = std::min(pw / (rx.hi - rx.lo), ph / (ry.hi - ry.lo));
        const double cx = 0.5 * (rx.lo + rx.hi);
        const double cy = 0.5 * (ry.lo + ry.hi);
        rx.lo = cx - 0.5 * pw / scale;
        rx.hi = cx + 0.5 * pw / scale;
        ry.lo = cy - 0.5 * ph / scale;
        ry.hi = cy + 0.5 * ph / scale;
    }
    auto X = [&](double v) { return left + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return top + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
       << escape(plot.title) << "</text>\n";
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double vx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
        const double vy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
        os << "<text x=\"" << fmt(X(vx)) << "\" y=\"" << fmt(top + ph + 16) << "\" text-anchor=\"middle\" font-size=\"11\">"
           << tick_label(vx) << "</text>\n";
        os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(Y(vy) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
           << tick_label(vy) << "</text>\n";
    }
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\" font-size=\"13\">"
       << escape(plot.xlabel) << "</text>\n";
    os << "<text x=\"16\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
       << fmt(top + ph / 2) << ")\">" << escape(plot.ylabel) << "</text>\n";

    for (const auto& r : plot.ref_lines) {
        double x1 = left, x2 = left + pw, y1 = 0, y2 = 0;
        if (r.horizontal) {
            y1 = y2 = Y(r.value);
        } else {
            x1 = x2 = X(r.value);
            y1 = top;
            y2 = top + ph;
        }
        os << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\"" << fmt(y2)
           << "\" stroke=\"" << r.color << "\" stroke-dasharray=\"6 4\"/>\n";
    }

    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        const std::size_t stride = n > max_points ? (n + max_points - 1) / max_points : 1;
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t k = 0; k < n; k += stride) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            os << (first ? "" : " ") << fmt(X(s.x[k])) << ',' << fmt(Y(s.y[k]));
            first = false;
        }
        if (n > 0 && (n - 1) % stride != 0 && std::isfinite(s.x[n - 1]) && std::isfinite(s.y[n - 1])) {
            os << (first ? "" : " ") << fmt(X(s.x[n - 1])) << ',' << fmt(Y(s.y[n - 1]));
        }
        os << "\"><title>" << escape(s.name) << "</title></polyline>\n";

        const double ly = top + 14.0 * static_cast<double>(si) + 8.0;
        os << "<line x1=\"" << fmt(left + pw + 10) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + pw + 30)
           << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fmt(left + pw + 35) << "\" y=\"" << fmt(ly + 4) << "\" font-size=\"11\">" << escape(s.name)
           << "</text>\n";
    }

    for (const auto& m : plot.markers) {
        const double cx = X(m.x);
        const double cy = Y(m.y);
        if (m.shape == MarkerShape::Circle) {
            os << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\"6\" fill=\"none\" stroke=\"" << m.color
               << "\" stroke-width=\"2\"/>\n";
        } else {
            os << "<path d=\"M" << fmt(cx - 6) << ' ' << fmt(cy - 6) << " L" << fmt(cx + 6) << ' ' << fmt(cy + 6) << " M"
               << fmt(cx - 6) << ' ' << fmt(cy + 6) << " L" << fmt(cx + 6) << ' ' << fmt(cy - 6) << "\" stroke=\""
               << m.color << "\" stroke-width=\"2\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace hybridsp::svg
