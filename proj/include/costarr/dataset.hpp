#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "costarr/tensor.hpp"

namespace costarr {

inline constexpr std::int64_t kUnknownLabel = -1;

// Features [N x D], precomputed logits [N x C] (bias already folded in),
// labels [N] i64 with -1 marking unknown samples. Logits travel with the
// data: the scoring stage never recomputes them from the head.
struct LabeledSet {
    Tensor features;
    Tensor logits;
    Tensor labels;

    std::size_t size() const { return features.rows(); }
    std::size_t feature_dim() const { return features.cols(); }
    std::size_t num_classes() const { return logits.cols(); }
    std::int64_t label(std::size_t i) const { return labels.at_i64(i); }

    void validate() const; // ShapeError on any mismatch
};

LabeledSet load_labeled_set(const std::filesystem::path& features_path,
                            const std::filesystem::path& logits_path,
                            const std::filesystem::path& labels_path);

// Final-layer weights [C x D] and bias [C] of the source classifier.
struct ClassifierHead {
    Tensor weights;
    Tensor bias;

    std::size_t num_classes() const { return weights.rows(); }
    std::size_t feature_dim() const { return weights.cols(); }

    void validate() const;
};

ClassifierHead load_head(const std::filesystem::path& weights_path,
                         const std::filesystem::path& bias_path);

// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(const std::vector<double>& v);

} // namespace costarr
