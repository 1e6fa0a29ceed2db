#pragma once

#include <filesystem>

#include "costarr/tensor.hpp"

namespace costarr {

// Per-dimension spread of the head weights across classes: row k of the
// result is {min_j W[j,k], mean_j W[j,k], max_j W[j,k]} -> [D x 3] f64.
Tensor weight_stats(const Tensor& weights);

// Histogram of |W| per dimension: [bins x D] i64 counts over the class
// axis, bins spanning [0, max|W|] globally with the top edge inclusive.
// Every column sums to C. Needs bins >= 2.
Tensor weight_histogram(const Tensor& weights, std::size_t bins);

inline constexpr std::size_t kDefaultHistogramBins = 80;

// "dim,min,mean,max" rows, one per dimension.
void write_weight_stats_csv(const Tensor& stats, const std::filesystem::path& path);

} // namespace costarr
