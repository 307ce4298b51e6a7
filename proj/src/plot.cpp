#include "hysta/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace hysta {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b"};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo <= hi)) { lo = 0.0; hi = 1.0; }
        if (lo == hi) { lo -= 0.5; hi += 0.5; }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

void write_svg_panels(const std::vector<Panel>& panels, const std::string& path,
                      int width, int panel_height, std::size_t max_points) {
    if (panels.empty()) throw std::invalid_argument("write_svg_panels: no panels");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_panels: cannot open " + path);

    const int total_h = panel_height * static_cast<int>(panels.size());
    const double ml = 70, mr = 20, mt = 34, mb = 44;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << total_h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& panel = panels[p];
        const double y0 = static_cast<double>(p) * panel_height;
        const double px = ml, py = y0 + mt;
        const double pw = width - ml - mr, ph = panel_height - mt - mb;

        Range rx, ry;
        for (const Series& s : panel.series) {
            for (double v : s.x) rx.add(v);
            for (double v : s.y) ry.add(v);
        }
        rx.pad();
        ry.pad();
        const auto X = [&](double v) { return px + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
        const auto Y = [&](double v) { return py + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

        out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << pw
            << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#888\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << y0 + 20
            << "\" font-weight=\"bold\">" << panel.title << "</text>\n";
        // axis ticks
        for (int k = 0; k <= 4; ++k) {
            const double xv = rx.lo + k * (rx.hi - rx.lo) / 4.0;
            const double yv = ry.lo + k * (ry.hi - ry.lo) / 4.0;
            out << "<line x1=\"" << X(xv) << "\" y1=\"" << py + ph << "\" x2=\""
                << X(xv) << "\" y2=\"" << py + ph + 4 << "\" stroke=\"#888\"/>\n";
            out << "<text x=\"" << X(xv) << "\" y=\"" << py + ph + 16
                << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
            out << "<line x1=\"" << px - 4 << "\" y1=\"" << Y(yv) << "\" x2=\"" << px
                << "\" y2=\"" << Y(yv) << "\" stroke=\"#888\"/>\n";
            out << "<text x=\"" << px - 6 << "\" y=\"" << Y(yv) + 4
                << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
        }
        out << "<text x=\"" << px + pw / 2 << "\" y=\"" << py + ph + 34
            << "\" text-anchor=\"middle\">" << panel.x_label << "</text>\n";
        out << "<text x=\"14\" y=\"" << py + ph / 2
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << py + ph / 2
            << ")\">" << panel.y_label << "</text>\n";

        for (std::size_t si = 0; si < panel.series.size(); ++si) {
            const Series& s = panel.series[si];
            const std::string color =
                s.color.empty() ? kPalette[si % 6] : s.color;
            const std::size_t n = std::min(s.x.size(), s.y.size());
            if (n < 2) continue;
            const std::size_t stride = std::max<std::size_t>(1, n / max_points);
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t i = 0; i < n; i += stride)
                out << fmt(X(s.x[i])) << "," << fmt(Y(s.y[i])) << " ";
            out << "\"/>\n";
            // legend entry
            const double lx = px + pw - 150, ly = py + 16 + 16.0 * si;
            out << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\""
                << lx + 24 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
                << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << lx + 30 << "\" y=\"" << ly << "\">" << s.label
                << "</text>\n";
        }
    }
    out << "</svg>\n";
}

} // namespace hysta
