#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "costarr/fit.hpp"

namespace costarr {

// Recognition scores; higher means "more likely a known class".
enum class Method {
    costarr,  // gnl(max logit) * cosine01 of concat(F, F.*W_m) to the class mean
    hadamard, // max over classes of cosine01 on the weighted half only
    features, // max over classes of cosine01 on the plain-feature half only
    nologit,  // max over classes of cosine01 on the full concatenation
    cosm,     // softmax(max logit) * cosine01 of the full concatenation
    maxlogit, // raw max logit
    msp,      // max softmax probability
    magnorm,  // max logit / feature L2 norm
};

const char* method_name(Method m);
Method parse_method(const std::string& name); // ArgumentError on unknown names
const std::vector<Method>& all_methods();

// Cosine mapped to [0, 1]: 0.5 * (1 + cos(a, b)). When either vector has
// squared norm below 1e-24 the similarity is defined as 0.5 (a zero vector
// carries no directional evidence).
double cosine01(const std::vector<double>& a, const std::vector<double>& b);
double cosine01(const double* a, const double* b, std::size_t n);

// 0.5 * (1 + cos(concat(f, f .* W_j), class_means[j])).
double costarr_similarity(const CostarrModel& model, const std::vector<double>& f, std::size_t j);

struct ScoredSample {
    std::int64_t sample_id = 0;
    // Logit argmax for costarr/cosm/maxlogit/msp/magnorm; similarity argmax
    // for the hadamard/features/nologit variants. Ties go to the lowest
    // class index either way.
    std::int64_t predicted = 0;
    double score = 0.0;
};

// Scores every row with one method, consuming the given logits as-is.
// Samples are independent, so the result is byte-identical for any thread
// count.
std::vector<ScoredSample> score_set(const CostarrModel& model, const Tensor& features, const Tensor& logits,
                                    Method method, unsigned threads = 1);
std::vector<ScoredSample> score_set(const CostarrModel& model, const LabeledSet& set, Method method,
                                    unsigned threads = 1);

// Hadamard matrix F .* W_j for one class, columns permuted by ascending
// W_j (stable under ties) -- the low-to-high attenuation profile plot.
Tensor export_sorted_hadamard(const Tensor& features, const Tensor& weights, std::size_t j);

// "sample_id,predicted,score" with %.17g scores.
void write_scores_csv(const std::vector<ScoredSample>& rows, const std::filesystem::path& path);
std::vector<ScoredSample> read_scores_csv(const std::filesystem::path& path);

} // namespace costarr
