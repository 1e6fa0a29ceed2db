#pragma once

#include <vector>

#include "costarr/score.hpp"

namespace costarr {

// One test sample as the evaluation stack sees it.
struct EvalSample {
    double score = 0.0;
    bool known = false;   // ground truth: drawn from a training class
    bool correct = false; // known and the head predicted its label
};

// Joins scored rows with ground-truth labels (-1 marks unknown).
std::vector<EvalSample> make_eval_samples(const std::vector<ScoredSample>& scores, const Tensor& labels);

// Open-set accuracy at a fixed threshold: knowns count when correctly
// classified and accepted (score >= tau), unknowns when rejected.
double osa(const std::vector<EvalSample>& samples, double tau);

struct ThresholdChoice {
    double tau = 0.0;
    double osa = 0.0; // achieved on the set the threshold was picked from
};

// The candidate grid: midpoints between consecutive distinct scores plus
// one candidate below and one above everything, ascending.
std::vector<double> threshold_candidates(const std::vector<EvalSample>& samples);

// Best-OSA threshold over the candidate grid; ties prefer the smallest
// threshold. Needs at least one known and one unknown sample.
ThresholdChoice predict_threshold(const std::vector<EvalSample>& samples);

struct OosaResult {
    double tau = 0.0;      // picked on the validation split
    double val_osa = 0.0;  // what that threshold scored there
    double test_osa = 0.0; // the reported operational metric
};

OosaResult oosa(const std::vector<EvalSample>& val, const std::vector<EvalSample>& test);

struct OscrCurve {
    std::vector<double> fpr; // unknowns accepted / unknowns
    std::vector<double> ccr; // knowns accepted and correct / knowns
    double auc = 0.0;
};

// Sweeps acceptance thresholds over the distinct finite scores (descending
// order of threshold, so fpr is non-decreasing along the curve). The area
// treats the curve as a step function anchored at fpr=0 and extended
// horizontally to fpr=1.
OscrCurve oscr(const std::vector<EvalSample>& samples);

// Known-vs-unknown separability of the scores, computed with average ranks
// (exact under ties, equal to the pairwise win/tie count).
double auroc(const std::vector<EvalSample>& samples);

} // namespace costarr
