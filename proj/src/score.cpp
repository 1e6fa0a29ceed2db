#include "costarr/score.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "costarr/parallel.hpp"

namespace costarr {

const char* method_name(Method m) {
    switch (m) {
    case Method::costarr: return "costarr";
    case Method::hadamard: return "hadamard";
    case Method::features: return "features";
    case Method::nologit: return "nologit";
    case Method::cosm: return "cosm";
    case Method::maxlogit: return "maxlogit";
    case Method::msp: return "msp";
    case Method::magnorm: return "magnorm";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (Method m : all_methods()) {
        if (name == method_name(m)) return m;
    }
    throw ArgumentError("unknown scoring method '" + name + "'");
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {Method::costarr, Method::hadamard, Method::features,
                                                Method::nologit, Method::cosm,     Method::maxlogit,
                                                Method::msp,     Method::magnorm};
    return methods;
}

double cosine01(const double* a, const double* b, std::size_t n) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    // Squared-norm threshold 1e-24 == (1e-12)^2 on the vector norm.
    if (aa < 1e-24 || bb < 1e-24) return 0.5;
    double c = ab / std::sqrt(aa * bb);
    c = std::clamp(c, -1.0, 1.0);
    return 0.5 * (1.0 + c);
}

double cosine01(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ShapeError("cosine of vectors with different lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
    return cosine01(a.data(), b.data(), a.size());
}

namespace {

// Contiguous f64 views of the model for the per-sample hot loop.
struct ScoreContext {
    std::span<const double> w;     // [C x D]
    std::span<const double> means; // [C x 2D]
    std::size_t C, D;
    double l_tmin, l_tmax;

    explicit ScoreContext(const CostarrModel& m)
        : w(m.weights.f64()), means(m.class_means.f64()), C(m.num_classes()), D(m.feature_dim()),
          l_tmin(m.l_tmin), l_tmax(m.l_tmax) {}
};

// Reusable per-thread scratch.
struct Scratch {
    std::vector<double> f, l, concat;
};

double max_softmax(const std::vector<double>& l, std::size_t m) {
    double denom = 0.0;
    for (double v : l) denom += std::exp(v - l[m]);
    return 1.0 / denom;
}

void fill_concat(const ScoreContext& cx, const std::vector<double>& f, std::size_t j, std::vector<double>& concat) {
    concat.resize(2 * cx.D);
    const double* wj = cx.w.data() + j * cx.D;
    for (std::size_t k = 0; k < cx.D; ++k) {
        concat[k] = f[k];
        concat[cx.D + k] = f[k] * wj[k];
    }
}

double similarity(const ScoreContext& cx, Scratch& s, std::size_t j) {
    fill_concat(cx, s.f, j, s.concat);
    return cosine01(s.concat.data(), cx.means.data() + j * 2 * cx.D, 2 * cx.D);
}

// Best (score, class) over all classes for the similarity-selected
// variants; strict improvement keeps the lowest index on ties.
ScoredSample best_similarity(const ScoreContext& cx, Scratch& s, double (*sim_j)(const ScoreContext&, Scratch&,
                                                                                 std::size_t)) {
    ScoredSample r;
    r.score = -1.0;
    for (std::size_t j = 0; j < cx.C; ++j) {
        double v = sim_j(cx, s, j);
        if (v > r.score) {
            r.score = v;
            r.predicted = static_cast<std::int64_t>(j);
        }
    }
    return r;
}

double hadamard_sim(const ScoreContext& cx, Scratch& s, std::size_t j) {
    const double* wj = cx.w.data() + j * cx.D;
    s.concat.resize(cx.D);
    for (std::size_t k = 0; k < cx.D; ++k) s.concat[k] = s.f[k] * wj[k];
    return cosine01(s.concat.data(), cx.means.data() + j * 2 * cx.D + cx.D, cx.D);
}

double features_sim(const ScoreContext& cx, Scratch& s, std::size_t j) {
    return cosine01(s.f.data(), cx.means.data() + j * 2 * cx.D, cx.D);
}

double nologit_sim(const ScoreContext& cx, Scratch& s, std::size_t j) { return similarity(cx, s, j); }

ScoredSample score_one(const ScoreContext& cx, Method method, Scratch& s) {
    std::size_t m = argmax(s.l);
    ScoredSample r;
    r.predicted = static_cast<std::int64_t>(m);
    switch (method) {
    case Method::costarr:
        r.score = gnl(s.l[m], cx.l_tmin, cx.l_tmax) * similarity(cx, s, m);
        return r;
    case Method::cosm:
        r.score = max_softmax(s.l, m) * similarity(cx, s, m);
        return r;
    case Method::hadamard:
        return best_similarity(cx, s, hadamard_sim);
    case Method::features:
        return best_similarity(cx, s, features_sim);
    case Method::nologit:
        return best_similarity(cx, s, nologit_sim);
    case Method::maxlogit:
        r.score = s.l[m];
        return r;
    case Method::msp:
        r.score = max_softmax(s.l, m);
        return r;
    case Method::magnorm: {
        double nn = 0.0;
        for (double v : s.f) nn += v * v;
        r.score = s.l[m] / std::max(std::sqrt(nn), 1e-12);
        return r;
    }
    }
    throw ArgumentError("unhandled scoring method");
}

} // namespace

double costarr_similarity(const CostarrModel& model, const std::vector<double>& f, std::size_t j) {
    ScoreContext cx(model);
    if (j >= cx.C) throw ShapeError("class index " + std::to_string(j) + " out of range");
    if (f.size() != cx.D)
        throw ShapeError("feature dim " + std::to_string(f.size()) + " but the model expects " +
                         std::to_string(cx.D));
    Scratch s;
    s.f = f;
    return similarity(cx, s, j);
}

std::vector<ScoredSample> score_set(const CostarrModel& model, const Tensor& features, const Tensor& logits,
                                    Method method, unsigned threads) {
    if (features.ndim() != 2) throw ShapeError("features must be 2-d [N x D]");
    if (logits.ndim() != 2) throw ShapeError("logits must be 2-d [N x C]");
    if (features.dim(0) != logits.dim(0))
        throw ShapeError("features have " + std::to_string(features.dim(0)) + " rows but logits have " +
                         std::to_string(logits.dim(0)));
    ScoreContext cx(model);
    if (features.cols() != cx.D)
        throw ShapeError("features have dim " + std::to_string(features.cols()) + " but the model expects " +
                         std::to_string(cx.D));
    if (logits.cols() != cx.C)
        throw ShapeError("logits have " + std::to_string(logits.cols()) + " columns but the model expects " +
                         std::to_string(cx.C));

    std::size_t n = features.rows();
    std::vector<ScoredSample> out(n);
    parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
        Scratch s;
        for (std::size_t i = lo; i < hi; ++i) {
            features.row_f64(i, s.f);
            logits.row_f64(i, s.l);
            out[i] = score_one(cx, method, s);
            out[i].sample_id = static_cast<std::int64_t>(i);
        }
    });
    return out;
}

std::vector<ScoredSample> score_set(const CostarrModel& model, const LabeledSet& set, Method method,
                                    unsigned threads) {
    return score_set(model, set.features, set.logits, method, threads);
}

Tensor export_sorted_hadamard(const Tensor& features, const Tensor& weights, std::size_t j) {
    std::size_t n = features.rows(), d = features.cols();
    if (weights.ndim() != 2 || weights.cols() != d)
        throw ShapeError("weights must be [C x D] with D matching the features");
    if (j >= weights.rows()) throw ShapeError("class index " + std::to_string(j) + " out of range");

    std::vector<double> wj(d);
    for (std::size_t k = 0; k < d; ++k) wj[k] = weights.at_f64(j * d + k);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return wj[a] < wj[b]; });

    Tensor out({n, d}, Dtype::f64);
    auto dst = out.f64();
    std::vector<double> f;
    for (std::size_t i = 0; i < n; ++i) {
        features.row_f64(i, f);
        for (std::size_t k = 0; k < d; ++k) dst[i * d + k] = f[order[k]] * wj[order[k]];
    }
    return out;
}

void write_scores_csv(const std::vector<ScoredSample>& rows, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    std::string buf = "sample_id,predicted,score\n";
    for (const auto& r : rows) {
        buf += std::to_string(r.sample_id);
        buf += ',';
        buf += std::to_string(r.predicted);
        buf += ',';
        buf += format_f64(r.score);
        buf += '\n';
    }
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    f.flush();
    if (!f) throw IoError("write failure on " + path.string());
}

std::vector<ScoredSample> read_scores_csv(const std::filesystem::path& path) {
    Tensor t = read_csv_matrix(path);
    if (t.cols() != 3)
        throw FormatError("score csv " + path.string() + " must have 3 columns, got " + std::to_string(t.cols()));
    std::vector<ScoredSample> rows(t.rows());
    for (std::size_t i = 0; i < t.rows(); ++i) {
        rows[i].sample_id = t.at_i64(i * 3);
        rows[i].predicted = t.at_i64(i * 3 + 1);
        rows[i].score = t.at_f64(i * 3 + 2);
    }
    return rows;
}

} // namespace costarr
