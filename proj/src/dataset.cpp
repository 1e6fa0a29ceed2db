#include "costarr/dataset.hpp"

namespace costarr {

void LabeledSet::validate() const {
    if (features.ndim() != 2) throw ShapeError("features must be 2-d [N x D]");
    if (logits.ndim() != 2) throw ShapeError("logits must be 2-d [N x C]");
    if (labels.ndim() != 1) throw ShapeError("labels must be 1-d [N]");
    if (labels.dtype() != Dtype::i64) throw ShapeError("labels must be i64");
    if (logits.dim(0) != features.dim(0))
        throw ShapeError("features have " + std::to_string(features.dim(0)) + " rows but logits have " +
                         std::to_string(logits.dim(0)));
    if (labels.dim(0) != features.dim(0))
        throw ShapeError("features have " + std::to_string(features.dim(0)) + " rows but labels have " +
                         std::to_string(labels.dim(0)));
    std::int64_t c = static_cast<std::int64_t>(logits.dim(1));
    for (std::size_t i = 0; i < size(); ++i) {
        std::int64_t y = label(i);
        if (y < kUnknownLabel || y >= c) {
            throw ShapeError("label " + std::to_string(y) + " at row " + std::to_string(i) + " is outside [-1, " +
                             std::to_string(c - 1) + "]");
        }
    }
}

LabeledSet load_labeled_set(const std::filesystem::path& features_path,
                            const std::filesystem::path& logits_path,
                            const std::filesystem::path& labels_path) {
    LabeledSet s{read_tensor(features_path), read_tensor(logits_path), read_tensor(labels_path)};
    s.validate();
    return s;
}

void ClassifierHead::validate() const {
    if (weights.ndim() != 2) throw ShapeError("weights must be 2-d [C x D]");
    if (bias.ndim() != 1) throw ShapeError("bias must be 1-d [C]");
    if (bias.dim(0) != weights.dim(0)) {
        throw ShapeError("weights have " + std::to_string(weights.dim(0)) + " classes but bias has " +
                         std::to_string(bias.dim(0)));
    }
    if (weights.dim(0) == 0 || weights.dim(1) == 0) throw ShapeError("weights must be non-empty");
}

ClassifierHead load_head(const std::filesystem::path& weights_path, const std::filesystem::path& bias_path) {
    ClassifierHead h{read_tensor(weights_path), read_tensor(bias_path)};
    h.validate();
    return h;
}

std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

} // namespace costarr
