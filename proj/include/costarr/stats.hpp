#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace costarr {

// Two-sided Wilcoxon signed-rank test for paired samples.
struct WilcoxonResult {
    double w = 0.0;    // min(W+, W-) over non-zero differences
    double p = 1.0;    // two-sided p-value
    std::size_t n = 0; // pairs remaining after dropping zero differences
    enum class Mode { exact, approx, degenerate } mode = Mode::degenerate;
};

const char* wilcoxon_mode_name(WilcoxonResult::Mode m);

// Zero differences are dropped; |differences| get average ranks under ties.
// n <= 25 enumerates the exact conditional permutation distribution
// (dynamic program over doubled ranks); larger n uses the normal
// approximation with tie-aware variance and a continuity correction.
// All-zero differences give the degenerate result p = 1.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

// Bonferroni correction for m comparisons.
double bonferroni(double p, std::size_t m);

} // namespace costarr
