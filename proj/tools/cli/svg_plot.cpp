#include "cli/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cli/csv_io.hpp"

namespace twinbeam::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string px(double v) { return format_fixed(v, 2); }

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
        }
    }
    if (spec.reference_y) {
        y_lo = std::min(y_lo, *spec.reference_y);
        y_hi = std::max(y_hi, *spec.reference_y);
    }
    if (!std::isfinite(x_lo)) {
        x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    auto sy = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
           "\" viewBox=\"0 0 " + px(kWidth) + " " + px(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + px(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(spec.title) + "</text>\n";
    out += "<rect x=\"" + px(kLeft) + "\" y=\"" + px(kTop) + "\" width=\"" + px(plot_w) + "\" height=\"" +
           px(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / kTicks;
        const double yv = y_lo + (y_hi - y_lo) * i / kTicks;
        out += "<text x=\"" + px(sx(xv)) + "\" y=\"" + px(kHeight - kBottom + 16) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + format_fixed(xv, 2) + "</text>\n";
        out += "<text x=\"" + px(kLeft - 6) + "\" y=\"" + px(sy(yv) + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
               format_fixed(yv, 2) + "</text>\n";
    }
    out += "<text x=\"" + px(kLeft + plot_w / 2) + "\" y=\"" + px(kHeight - 10) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + escape(spec.x_label) + "</text>\n";
    out += "<text transform=\"translate(16," + px(kTop + plot_h / 2) +
           ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(spec.y_label) + "</text>\n";

    if (spec.reference_y) {
        const double y = sy(*spec.reference_y);
        out += "<line x1=\"" + px(kLeft) + "\" y1=\"" + px(y) + "\" x2=\"" + px(kLeft + plot_w) + "\" y2=\"" + px(y) +
               "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    }

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        out += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"";
        out += kColors[k % std::size(kColors)];
        out += "\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!first) out += ' ';
            out += px(sx(s.x[i])) + "," + px(sy(s.y[i]));
            first = false;
        }
        out += "\"/>\n";
        if (!s.label.empty()) {
            const double ly = kTop + 16.0 + 14.0 * static_cast<double>(k);
            out += "<text x=\"" + px(kLeft + plot_w - 8) + "\" y=\"" + px(ly) +
                   "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + kColors[k % std::size(kColors)] + "\">" +
                   escape(s.label) + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace twinbeam::cli
