#pragma once

#include <filesystem>

#include "costarr/dataset.hpp"

namespace costarr {

// Everything scoring needs, estimated once from training features:
// per-class means of the concatenated representation concat(F, F .* W_j)
// over correctly classified samples, plus the logit range used to
// squash raw logits into [0, 1].
struct CostarrModel {
    Tensor weights;     // [C x D] f64
    Tensor bias;        // [C] f64
    Tensor class_means; // [C x 2D] f64
    double l_tmin = 0.0;
    double l_tmax = 0.0;
    Tensor counts;       // [C] i64, samples contributing to each mean
    bool used_fallback = false; // some class had no correct samples

    std::size_t num_classes() const { return weights.rows(); }
    std::size_t feature_dim() const { return weights.cols(); }
};

// Good-news-likelihood: (l - l_tmin) / (l_tmax - l_tmin), clamped to [0, 1].
double gnl(double logit, double l_tmin, double l_tmax);

// Single pass over the training set. A sample contributes to the mean of
// class j when its label is j and its given logits argmax to j; those
// samples' logits (all C entries, not just the max) set the gnl range.
// Classes where the logits never agree with the label fall back to all
// samples of that class and set used_fallback. A class with no samples at
// all is a FitError, as is a degenerate logit range.
CostarrModel fit_model(const LabeledSet& train, const ClassifierHead& head);

// Model directory: weights.cst, bias.cst, class_means.cst, gnl.cst,
// counts.cst, fallback.cst, manifest.txt.
void save_model(const CostarrModel& model, const std::filesystem::path& dir);
CostarrModel load_model(const std::filesystem::path& dir);

} // namespace costarr
