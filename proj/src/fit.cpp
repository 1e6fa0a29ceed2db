#include "costarr/fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace costarr {

double gnl(double logit, double l_tmin, double l_tmax) {
    double t = (logit - l_tmin) / (l_tmax - l_tmin);
    return std::clamp(t, 0.0, 1.0);
}

namespace {

// Kahan-compensated elementwise accumulator for one class.
struct MeanAcc {
    std::vector<double> sum, comp;
    std::int64_t n = 0;

    explicit MeanAcc(std::size_t width) : sum(width, 0.0), comp(width, 0.0) {}

    void add(const std::vector<double>& v) {
        for (std::size_t k = 0; k < sum.size(); ++k) {
            double y = v[k] - comp[k];
            double t = sum[k] + y;
            comp[k] = (t - sum[k]) - y;
            sum[k] = t;
        }
        ++n;
    }
};

} // namespace

CostarrModel fit_model(const LabeledSet& train, const ClassifierHead& head) {
    head.validate();
    train.validate();
    const std::size_t C = head.num_classes();
    const std::size_t D = head.feature_dim();
    if (train.feature_dim() != D)
        throw ShapeError("training features have dim " + std::to_string(train.feature_dim()) +
                         " but head weights expect " + std::to_string(D));
    if (train.num_classes() != C)
        throw ShapeError("training logits have " + std::to_string(train.num_classes()) +
                         " columns but head weights have " + std::to_string(C) + " rows");

    std::vector<MeanAcc> correct_acc(C, MeanAcc(2 * D));
    std::vector<MeanAcc> all_acc(C, MeanAcc(2 * D));
    double l_tmin = std::numeric_limits<double>::infinity();
    double l_tmax = -std::numeric_limits<double>::infinity();

    std::vector<double> f, l, concat(2 * D);
    for (std::size_t i = 0; i < train.size(); ++i) {
        std::int64_t y = train.label(i);
        if (y == kUnknownLabel) throw FitError("training sample " + std::to_string(i) + " has the unknown label");
        std::size_t j = static_cast<std::size_t>(y);
        train.features.row_f64(i, f);
        train.logits.row_f64(i, l);
        for (std::size_t k = 0; k < D; ++k) {
            concat[k] = f[k];
            concat[D + k] = f[k] * head.weights.at_f64(j * D + k);
        }
        all_acc[j].add(concat);
        if (argmax(l) == j) {
            correct_acc[j].add(concat);
            for (double v : l) {
                l_tmin = std::min(l_tmin, v);
                l_tmax = std::max(l_tmax, v);
            }
        }
    }

    CostarrModel m;
    m.weights = Tensor({C, D}, Dtype::f64);
    m.bias = Tensor({C}, Dtype::f64);
    m.class_means = Tensor({C, 2 * D}, Dtype::f64);
    m.counts = Tensor({C}, Dtype::i64);
    auto w = m.weights.f64();
    auto b = m.bias.f64();
    auto means = m.class_means.f64();
    auto counts = m.counts.i64();
    for (std::size_t j = 0; j < C; ++j) {
        for (std::size_t k = 0; k < D; ++k) w[j * D + k] = head.weights.at_f64(j * D + k);
        b[j] = head.bias.at_f64(j);
    }

    for (std::size_t j = 0; j < C; ++j) {
        const MeanAcc* acc = &correct_acc[j];
        if (acc->n == 0) {
            acc = &all_acc[j];
            m.used_fallback = true;
        }
        if (acc->n == 0) throw FitError("class " + std::to_string(j) + " has no training samples");
        counts[j] = acc->n;
        double inv = 1.0 / static_cast<double>(acc->n);
        for (std::size_t k = 0; k < 2 * D; ++k) means[j * 2 * D + k] = acc->sum[k] * inv;

        // The weighted half of the mean must equal the plain half scaled by
        // the class weights; catches accumulator indexing bugs.
        for (std::size_t k = 0; k < D; ++k) {
            double expect = means[j * 2 * D + k] * w[j * D + k];
            double got = means[j * 2 * D + D + k];
            double tol = 1e-9 * std::max(std::abs(expect), std::abs(got)) + 1e-12;
            if (std::abs(got - expect) > tol)
                throw FitError("class mean consistency check failed for class " + std::to_string(j));
        }
    }

    if (!std::isfinite(l_tmin) || !std::isfinite(l_tmax))
        throw FitError("no correctly classified training samples; logit range is undefined");
    if (!(l_tmax > l_tmin))
        throw FitError("degenerate logit range: l_tmin == l_tmax == " + std::to_string(l_tmin));
    m.l_tmin = l_tmin;
    m.l_tmax = l_tmax;
    return m;
}

void save_model(const CostarrModel& model, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    write_tensor(model.weights, dir / "weights.cst");
    write_tensor(model.bias, dir / "bias.cst");
    write_tensor(model.class_means, dir / "class_means.cst");
    write_tensor(Tensor::from_f64({2}, {model.l_tmin, model.l_tmax}), dir / "gnl.cst");
    write_tensor(model.counts, dir / "counts.cst");
    write_tensor(Tensor::from_i64({1}, {model.used_fallback ? std::int64_t{1} : std::int64_t{0}}),
                 dir / "fallback.cst");

    std::ofstream mf(dir / "manifest.txt", std::ios::trunc);
    if (!mf) throw IoError("cannot open " + (dir / "manifest.txt").string() + " for writing");
    mf << "costarr-model v1 C=" << model.num_classes() << " D=" << model.feature_dim() << "\n";
    mf.flush();
    if (!mf) throw IoError("write failure on " + (dir / "manifest.txt").string());
}

CostarrModel load_model(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.txt");
    if (!mf) throw IoError("cannot open " + (dir / "manifest.txt").string() + " for reading");
    std::string tag, version;
    std::uint64_t c = 0, d = 0;
    std::string cfield, dfield;
    mf >> tag >> version >> cfield >> dfield;
    if (tag != "costarr-model" || version != "v1" || cfield.rfind("C=", 0) != 0 || dfield.rfind("D=", 0) != 0)
        throw FormatError("unrecognized model manifest in " + dir.string());
    c = std::stoull(cfield.substr(2));
    d = std::stoull(dfield.substr(2));

    CostarrModel m;
    m.weights = read_tensor(dir / "weights.cst");
    m.bias = read_tensor(dir / "bias.cst");
    m.class_means = read_tensor(dir / "class_means.cst");
    Tensor g = read_tensor(dir / "gnl.cst");
    m.counts = read_tensor(dir / "counts.cst");
    Tensor fb = read_tensor(dir / "fallback.cst");

    if (m.weights.ndim() != 2 || m.weights.dim(0) != c || m.weights.dim(1) != d)
        throw ShapeError("weights.cst shape does not match manifest in " + dir.string());
    if (m.bias.ndim() != 1 || m.bias.dim(0) != c) throw ShapeError("bias.cst shape mismatch in " + dir.string());
    if (m.class_means.ndim() != 2 || m.class_means.dim(0) != c || m.class_means.dim(1) != 2 * d)
        throw ShapeError("class_means.cst shape mismatch in " + dir.string());
    if (g.ndim() != 1 || g.dim(0) != 2 || g.dtype() != Dtype::f64)
        throw ShapeError("gnl.cst must be a length-2 f64 tensor in " + dir.string());
    if (m.counts.ndim() != 1 || m.counts.dim(0) != c || m.counts.dtype() != Dtype::i64)
        throw ShapeError("counts.cst shape mismatch in " + dir.string());
    if (fb.ndim() != 1 || fb.dim(0) != 1 || fb.dtype() != Dtype::i64)
        throw ShapeError("fallback.cst must be a length-1 i64 tensor in " + dir.string());

    m.l_tmin = g.f64()[0];
    m.l_tmax = g.f64()[1];
    m.used_fallback = fb.i64()[0] != 0;
    if (!(m.l_tmax > m.l_tmin)) throw FormatError("degenerate gnl range in " + dir.string());
    return m;
}

} // namespace costarr
