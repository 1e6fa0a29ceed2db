#include "costarr/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace costarr {

std::vector<EvalSample> make_eval_samples(const std::vector<ScoredSample>& scores, const Tensor& labels) {
    if (labels.ndim() != 1 || labels.dtype() != Dtype::i64) throw ShapeError("labels must be 1-d i64");
    if (labels.dim(0) != scores.size())
        throw ShapeError("have " + std::to_string(scores.size()) + " scores but " + std::to_string(labels.dim(0)) +
                         " labels");
    std::vector<EvalSample> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        std::int64_t y = labels.i64()[i];
        out[i].score = scores[i].score;
        out[i].known = y >= 0;
        out[i].correct = out[i].known && scores[i].predicted == y;
    }
    return out;
}

double osa(const std::vector<EvalSample>& samples, double tau) {
    if (samples.empty()) throw DataError("osa of an empty sample set");
    std::size_t hits = 0;
    for (const auto& s : samples) {
        if (s.known) {
            if (s.correct && s.score >= tau) ++hits;
        } else {
            if (s.score < tau) ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

std::vector<double> threshold_candidates(const std::vector<EvalSample>& samples) {
    if (samples.empty()) throw DataError("cannot pick a threshold from an empty sample set");
    std::vector<double> uniq;
    uniq.reserve(samples.size());
    for (const auto& s : samples) uniq.push_back(s.score);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    std::vector<double> candidates;
    candidates.reserve(uniq.size() + 1);
    candidates.push_back(uniq.front() - 1.0);
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) candidates.push_back(0.5 * (uniq[i] + uniq[i + 1]));
    candidates.push_back(uniq.back() + 1.0);
    return candidates;
}

ThresholdChoice predict_threshold(const std::vector<EvalSample>& samples) {
    bool any_known = false, any_unknown = false;
    for (const auto& s : samples) (s.known ? any_known : any_unknown) = true;
    if (!any_known || !any_unknown)
        throw DataError("threshold selection needs at least one known and one unknown sample");

    ThresholdChoice best{0.0, -1.0};
    for (double tau : threshold_candidates(samples)) {
        double v = osa(samples, tau);
        if (v > best.osa) best = {tau, v};
    }
    return best;
}

OosaResult oosa(const std::vector<EvalSample>& val, const std::vector<EvalSample>& test) {
    ThresholdChoice c = predict_threshold(val);
    return {c.tau, c.osa, osa(test, c.tau)};
}

OscrCurve oscr(const std::vector<EvalSample>& samples) {
    std::size_t knowns = 0, unknowns = 0;
    for (const auto& s : samples) (s.known ? knowns : unknowns)++;
    if (knowns == 0 || unknowns == 0)
        throw DataError("oscr needs at least one known and one unknown sample");

    std::vector<double> thresholds;
    thresholds.reserve(samples.size());
    for (const auto& s : samples)
        if (std::isfinite(s.score)) thresholds.push_back(s.score);
    if (thresholds.empty()) throw DataError("oscr needs at least one finite score");
    std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    OscrCurve curve;
    curve.fpr.reserve(thresholds.size());
    curve.ccr.reserve(thresholds.size());
    for (double th : thresholds) {
        std::size_t accepted_correct = 0, accepted_unknown = 0;
        for (const auto& s : samples) {
            if (!(s.score >= th)) continue;
            if (s.known) {
                if (s.correct) ++accepted_correct;
            } else {
                ++accepted_unknown;
            }
        }
        curve.ccr.push_back(static_cast<double>(accepted_correct) / static_cast<double>(knowns));
        curve.fpr.push_back(static_cast<double>(accepted_unknown) / static_cast<double>(unknowns));
    }

    // Step area: each point owns the interval back to the previous fpr
    // (fpr 0 before the first point), and the last ccr carries to fpr=1.
    double auc = 0.0;
    double prev_fpr = 0.0;
    for (std::size_t i = 0; i < curve.fpr.size(); ++i) {
        auc += curve.ccr[i] * (curve.fpr[i] - prev_fpr);
        prev_fpr = curve.fpr[i];
    }
    if (prev_fpr < 1.0) auc += curve.ccr.back() * (1.0 - prev_fpr);
    curve.auc = auc;
    return curve;
}

double auroc(const std::vector<EvalSample>& samples) {
    std::size_t pos = 0, neg = 0;
    for (const auto& s : samples) (s.known ? pos : neg)++;
    if (pos == 0 || neg == 0) throw DataError("auroc needs at least one known and one unknown sample");

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return samples[a].score < samples[b].score; });

    // Average ranks within tie runs, accumulate ranks of the positives.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && samples[order[j]].score == samples[order[i]].score) ++j;
        double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // mean of ranks i+1 .. j
        for (std::size_t k = i; k < j; ++k)
            if (samples[order[k]].known) rank_sum_pos += avg_rank;
        i = j;
    }
    double u = rank_sum_pos - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1);
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

} // namespace costarr
