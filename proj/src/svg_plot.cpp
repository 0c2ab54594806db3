#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "initlab/cli.hpp"

namespace initlab {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr int kMargin = 70;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

double transform(double v, bool log_scale) { return log_scale ? std::log10(v) : v; }

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title, const std::string& xlabel,
                    const std::string& ylabel, const std::vector<PlotSeries>& series, bool log_x,
                    bool log_y) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const PlotSeries& s : series)
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            if (log_x && s.xs[i] <= 0.0) continue;
            if (log_y && s.ys[i] <= 0.0) continue;
            const double x = transform(s.xs[i], log_x);
            const double y = transform(s.ys[i], log_y);
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(xmin <= xmax)) {
        xmin = 0.0;
        xmax = 1.0;
    }
    if (!(ymin <= ymax)) {
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    auto px = [&](double x) {
        return kMargin + (transform(x, log_x) - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin);
    };
    auto py = [&](double y) {
        return kHeight - kMargin -
               (transform(y, log_y) - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open plot file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    // axes
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
        << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
        << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    auto untransform = [&](double v, bool log_scale) {
        return log_scale ? std::pow(10.0, v) : v;
    };
    out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 20
        << "\" font-size=\"11\">" << format_double(untransform(xmin, log_x)) << "</text>\n";
    out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 20
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(untransform(xmax, log_x))
        << "</text>\n";
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kHeight - kMargin
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(untransform(ymin, log_y))
        << "</text>\n";
    out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_double(untransform(ymax, log_y))
        << "</text>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2 << "\" font-size=\"13\" transform=\"rotate(-90 16 "
        << kHeight / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const PlotSeries& s = series[k];
        const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            if (log_x && s.xs[i] <= 0.0) continue;
            if (log_y && s.ys[i] <= 0.0) continue;
            if (!first) out << ' ';
            out << format_double(px(s.xs[i])) << ',' << format_double(py(s.ys[i]));
            first = false;
        }
        out << "\"/>\n";
        out << "<text x=\"" << kWidth - kMargin + 4 << "\" y=\"" << kMargin + 16 * (k + 1)
            << "\" font-size=\"11\" fill=\"" << color << "\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace initlab
