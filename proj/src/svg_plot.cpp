#include "co2bench/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "co2bench/errors.hpp"

namespace co2bench {

namespace {

constexpr int kWidth = 900;
constexpr int kPanelHeight = 260;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 34;
constexpr int kMarginBottom = 26;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void panel(std::ostream& out, int y0, const std::vector<PlotSeries>& series) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t n = 0;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (n < 2 || !(hi > lo)) {
        lo = (n ? lo : 0.0) - 1.0;
        hi = lo + 2.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const int plot_w = kWidth - kMarginLeft - kMarginRight;
    const int plot_h = kPanelHeight - kMarginTop - kMarginBottom;
    auto X = [&](std::size_t i) {
        return kMarginLeft + plot_w * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n - 1, 1));
    };
    auto Y = [&](double v) { return y0 + kMarginTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

    out << "<rect x='" << kMarginLeft << "' y='" << y0 + kMarginTop << "' width='" << plot_w
        << "' height='" << plot_h << "' fill='none' stroke='#999'/>\n";
    for (int g = 0; g <= 4; ++g) {
        const double v = lo + (hi - lo) * g / 4.0;
        const double y = Y(v);
        out << "<line x1='" << kMarginLeft << "' y1='" << num(y) << "' x2='"
            << kMarginLeft + plot_w << "' y2='" << num(y) << "' stroke='#ddd'/>\n";
        out << "<text x='" << kMarginLeft - 6 << "' y='" << num(y + 4)
            << "' font-size='11' text-anchor='end' fill='#444'>" << num(v) << "</text>\n";
    }
    int legend_x = kMarginLeft + 8;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.values.size(); ++i)
            out << num(X(i)) << ',' << num(Y(s.values[i])) << ' ';
        out << "'/>\n";
        out << "<text x='" << legend_x << "' y='" << y0 + kMarginTop - 8
            << "' font-size='12' fill='" << s.color << "'>" << s.label << "</text>\n";
        legend_x += 14 * static_cast<int>(s.label.size()) / 2 + 30;
    }
}

} // namespace

void write_day_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& top, const std::vector<PlotSeries>& bottom) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open for writing: " + path);
    const int height = 2 * kPanelHeight + 20;
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << height
        << "' viewBox='0 0 " << kWidth << ' ' << height << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << kWidth / 2 << "' y='18' font-size='14' text-anchor='middle'>" << title
        << "</text>\n";
    panel(out, 10, top);
    panel(out, kPanelHeight + 10, bottom);
    out << "</svg>\n";
    if (!out) throw FormatError("write failed: " + path);
}

} // namespace co2bench
