#include "forgetlens/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "forgetlens/errors.hpp"

namespace forgetlens {
namespace svg {

namespace {

constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 52;

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

struct Mapper {
    double x_min, x_max, y_min, y_max;
    int width, height;

    double px(double x) const {
        const double span = x_max > x_min ? x_max - x_min : 1.0;
        return kMarginLeft + (x - x_min) / span * (width - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        const double span = y_max > y_min ? y_max - y_min : 1.0;
        return height - kMarginBottom - (y - y_min) / span * (height - kMarginTop - kMarginBottom);
    }
};

std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
    if (hi <= lo) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
        ticks.push_back(t);
    }
    return ticks;
}

void open_svg(std::ofstream& out, const PlotOptions& options) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        out << "<text x=\"" << options.width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">" << escape(options.title)
            << "</text>\n";
    }
}

void draw_axes(std::ofstream& out, const Mapper& m, const PlotOptions& options) {
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << m.height - kMarginBottom << "\" x2=\""
        << m.width - kMarginRight << "\" y2=\"" << m.height - kMarginBottom
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << m.height - kMarginBottom << "\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(m.x_min, m.x_max)) {
        const double x = m.px(t);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << m.height - kMarginBottom << "\" x2=\""
            << num(x) << "\" y2=\"" << m.height - kMarginBottom + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << m.height - kMarginBottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
            << "</text>\n";
    }
    for (double t : nice_ticks(m.y_min, m.y_max)) {
        const double y = m.py(t);
        out << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << num(y) << "\" x2=\"" << kMarginLeft
            << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
            << "</text>\n";
    }
    if (!options.x_label.empty()) {
        out << "<text x=\"" << (kMarginLeft + m.width - kMarginRight) / 2 << "\" y=\""
            << m.height - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"12\">" << escape(options.x_label) << "</text>\n";
    }
    if (!options.y_label.empty()) {
        const int y_mid = (kMarginTop + m.height - kMarginBottom) / 2;
        out << "<text x=\"16\" y=\"" << y_mid << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " << y_mid
            << ")\">" << escape(options.y_label) << "</text>\n";
    }
}

}  // namespace

void render_histogram(const analytics::Histogram& hist, const PlotOptions& options,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    const std::size_t n_bins = hist.counts.size();
    double max_count = static_cast<double>(hist.never_learnt);
    for (std::int64_t c : hist.counts) max_count = std::max(max_count, static_cast<double>(c));
    if (max_count <= 0.0) max_count = 1.0;

    // The never-learnt bar sits one slot to the right of the last bin.
    Mapper m{-0.5, static_cast<double>(n_bins) + 1.5, 0.0, max_count, options.width,
             options.height};
    open_svg(out, options);
    draw_axes(out, m, options);
    const double slot = m.px(1.0) - m.px(0.0);
    const double bar_w = slot * 0.85;
    for (std::size_t i = 0; i < n_bins; ++i) {
        const double h = m.py(0.0) - m.py(static_cast<double>(hist.counts[i]));
        out << "<rect x=\"" << num(m.px(static_cast<double>(i)) - bar_w / 2) << "\" y=\""
            << num(m.py(static_cast<double>(hist.counts[i]))) << "\" width=\"" << num(bar_w)
            << "\" height=\"" << num(h) << "\" fill=\"#1f77b4\"/>\n";
    }
    const double nx = static_cast<double>(n_bins) + 1.0;
    const double nh = m.py(0.0) - m.py(static_cast<double>(hist.never_learnt));
    out << "<rect x=\"" << num(m.px(nx) - bar_w / 2) << "\" y=\""
        << num(m.py(static_cast<double>(hist.never_learnt))) << "\" width=\"" << num(bar_w)
        << "\" height=\"" << num(nh) << "\" fill=\"#d62728\"/>\n";
    out << "<text x=\"" << num(m.px(nx)) << "\" y=\"" << m.height - kMarginBottom + 32
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
        << "fill=\"#d62728\">never learnt</text>\n";
    out << "</svg>\n";
}

void render_lines(const std::vector<Series>& series, const PlotOptions& options,
                  const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double band = s.stderr_band.empty() ? 0.0 : s.stderr_band[i];
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i] - band);
            y_max = std::max(y_max, s.y[i] + band);
        }
    }
    if (!std::isfinite(x_min)) {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max == y_min) y_max = y_min + 1.0;
    Mapper m{x_min, x_max, y_min, y_max, options.width, options.height};
    open_svg(out, options);
    draw_axes(out, m, options);

    for (const Series& s : series) {
        if (!s.stderr_band.empty() && s.x.size() >= 2) {
            out << "<polygon points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                out << num(m.px(s.x[i])) << ',' << num(m.py(s.y[i] + s.stderr_band[i])) << ' ';
            }
            for (std::size_t i = s.x.size(); i-- > 0;) {
                out << num(m.px(s.x[i])) << ',' << num(m.py(s.y[i] - s.stderr_band[i])) << ' ';
            }
            out << "\" fill=\"" << s.color << "\" opacity=\"0.2\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << num(m.px(s.x[i])) << ',' << num(m.py(s.y[i])) << ' ';
        }
        out << "\"/>\n";
    }
    if (std::isfinite(options.vertical_marker)) {
        const double x = m.px(options.vertical_marker);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << kMarginTop << "\" x2=\"" << num(x)
            << "\" y2=\"" << m.height - kMarginBottom
            << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    }
    int legend_y = kMarginTop + 8;
    for (const Series& s : series) {
        if (s.label.empty()) continue;
        out << "<line x1=\"" << m.width - kMarginRight - 130 << "\" y1=\"" << legend_y << "\" x2=\""
            << m.width - kMarginRight - 110 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << m.width - kMarginRight - 104 << "\" y=\"" << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

}  // namespace svg
}  // namespace forgetlens
