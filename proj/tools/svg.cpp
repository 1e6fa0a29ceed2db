#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace costarr::svg {

namespace {

constexpr double kWidth = 640, kHeight = 480, kMargin = 60;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void finish(std::ofstream& f, const std::filesystem::path& path) {
    f << "</svg>\n";
    f.flush();
    if (!f) throw IoError("write failure on " + path.string());
}

std::ofstream open_svg(const std::filesystem::path& path, double w, double h) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << " " << num(h) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return f;
}

} // namespace

void write_curve(const std::filesystem::path& path, const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::string& x_label, const std::string& y_label, const std::string& title) {
    if (xs.size() != ys.size() || xs.empty()) throw ArgumentError("curve needs equal-length non-empty series");

    double x_lo = *std::min_element(xs.begin(), xs.end());
    double x_hi = *std::max_element(xs.begin(), xs.end());
    double y_lo = *std::min_element(ys.begin(), ys.end());
    double y_hi = *std::max_element(ys.begin(), ys.end());
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;

    auto px = [&](double x) { return kMargin + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2 * kMargin); };
    auto py = [&](double y) { return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * (kHeight - 2 * kMargin); };

    auto f = open_svg(path, kWidth, kHeight);
    f << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
    // Axes.
    f << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kHeight - kMargin) << "\" x2=\"" << num(kWidth - kMargin)
      << "\" y2=\"" << num(kHeight - kMargin) << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << num(kMargin) << "\" y1=\"" << num(kMargin) << "\" x2=\"" << num(kMargin) << "\" y2=\""
      << num(kHeight - kMargin) << "\" stroke=\"black\"/>\n";
    // Extent labels.
    f << "<text x=\"" << num(kMargin) << "\" y=\"" << num(kHeight - kMargin + 16)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << num(x_lo) << "</text>\n";
    f << "<text x=\"" << num(kWidth - kMargin) << "\" y=\"" << num(kHeight - kMargin + 16)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << num(x_hi) << "</text>\n";
    f << "<text x=\"" << num(kMargin - 6) << "\" y=\"" << num(kHeight - kMargin)
      << "\" font-size=\"11\" text-anchor=\"end\">" << num(y_lo) << "</text>\n";
    f << "<text x=\"" << num(kMargin - 6) << "\" y=\"" << num(kMargin) << "\" font-size=\"11\" text-anchor=\"end\">"
      << num(y_hi) << "</text>\n";
    f << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 16)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    f << "<text x=\"16\" y=\"" << num(kHeight / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << num(kHeight / 2) << ")\">" << y_label << "</text>\n";

    f << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) f << ' ';
        f << num(px(xs[i])) << ',' << num(py(ys[i]));
    }
    f << "\"/>\n";
    finish(f, path);
}

void write_heatstrip(const std::filesystem::path& path, const Tensor& counts, const std::string& title) {
    std::size_t bins = counts.rows(), d = counts.cols();
    double peak = 0.0;
    for (std::size_t i = 0; i < bins * d; ++i) peak = std::max(peak, counts.at_f64(i));

    const double cell = std::max(1.0, std::floor(512.0 / static_cast<double>(std::max(bins, d))));
    const double w = static_cast<double>(d) * cell, h = static_cast<double>(bins) * cell;
    auto f = open_svg(path, w + 2 * kMargin, h + 2 * kMargin);
    f << "<text x=\"" << num(kMargin + w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
    f << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(w) << "\" height=\""
      << num(h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t k = 0; k < d; ++k) {
            double v = counts.at_f64(b * d + k);
            if (v <= 0.0 || peak <= 0.0) continue;
            double x = kMargin + static_cast<double>(k) * cell;
            double y = kMargin + static_cast<double>(bins - 1 - b) * cell;
            f << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell) << "\" height=\""
              << num(cell) << "\" fill=\"black\" fill-opacity=\"" << num(v / peak) << "\"/>\n";
        }
    }
    finish(f, path);
}

} // namespace costarr::svg
