#include "costarr/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace costarr {

Tensor weight_stats(const Tensor& weights) {
    std::size_t C = weights.rows(), D = weights.cols();
    if (C == 0 || D == 0) throw ShapeError("weight_stats needs a non-empty weight matrix");
    Tensor out({D, 3}, Dtype::f64);
    auto o = out.f64();
    for (std::size_t k = 0; k < D; ++k) {
        double lo = weights.at_f64(k), hi = lo, sum = 0.0;
        for (std::size_t j = 0; j < C; ++j) {
            double v = weights.at_f64(j * D + k);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
        }
        o[k * 3 + 0] = lo;
        o[k * 3 + 1] = sum / static_cast<double>(C);
        o[k * 3 + 2] = hi;
    }
    return out;
}

Tensor weight_histogram(const Tensor& weights, std::size_t bins) {
    if (bins < 2) throw ArgumentError("histogram needs at least 2 bins");
    std::size_t C = weights.rows(), D = weights.cols();
    if (C == 0 || D == 0) throw ShapeError("weight_histogram needs a non-empty weight matrix");

    double hi = 0.0;
    for (std::size_t i = 0; i < C * D; ++i) hi = std::max(hi, std::abs(weights.at_f64(i)));

    Tensor out({bins, D}, Dtype::i64);
    auto h = out.i64();
    for (std::size_t j = 0; j < C; ++j) {
        for (std::size_t k = 0; k < D; ++k) {
            double v = std::abs(weights.at_f64(j * D + k));
            std::size_t bin = 0;
            if (hi > 0.0) {
                bin = static_cast<std::size_t>(v / hi * static_cast<double>(bins));
                bin = std::min(bin, bins - 1); // v == hi lands in the top bin
            }
            ++h[bin * D + k];
        }
    }
    return out;
}

void write_weight_stats_csv(const Tensor& stats, const std::filesystem::path& path) {
    if (stats.ndim() != 2 || stats.dim(1) != 3) throw ShapeError("weight stats tensor must be [D x 3]");
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    std::string buf = "dim,min,mean,max\n";
    for (std::size_t k = 0; k < stats.rows(); ++k) {
        buf += std::to_string(k);
        for (std::size_t c = 0; c < 3; ++c) {
            buf += ',';
            buf += format_f64(stats.at_f64(k * 3 + c));
        }
        buf += '\n';
    }
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    f.flush();
    if (!f) throw IoError("write failure on " + path.string());
}

} // namespace costarr
