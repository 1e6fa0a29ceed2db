#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "costarr/tensor.hpp"

namespace costarr::svg {

// Single polyline over labeled axes; self-contained SVG, no external assets.
void write_curve(const std::filesystem::path& path, const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::string& x_label, const std::string& y_label, const std::string& title);

// Monochrome heat strip of a [bins x D] count matrix: one rect per cell,
// darker = more mass, bin 0 at the bottom.
void write_heatstrip(const std::filesystem::path& path, const Tensor& counts, const std::string& title);

} // namespace costarr::svg
