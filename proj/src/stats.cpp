#include "costarr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "costarr/errors.hpp"

namespace costarr {

const char* wilcoxon_mode_name(WilcoxonResult::Mode m) {
    switch (m) {
    case WilcoxonResult::Mode::exact: return "exact";
    case WilcoxonResult::Mode::approx: return "approx";
    case WilcoxonResult::Mode::degenerate: return "degenerate";
    }
    return "?";
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ArgumentError("paired test needs equal-length inputs, got " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
    if (a.empty()) throw ArgumentError("paired test needs at least one pair");

    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        if (!std::isfinite(d)) throw ArgumentError("non-finite difference at pair " + std::to_string(i));
        if (d != 0.0) diffs.push_back(d);
    }

    WilcoxonResult r;
    r.n = diffs.size();
    if (diffs.empty()) {
        r.mode = WilcoxonResult::Mode::degenerate;
        r.w = 0.0;
        r.p = 1.0;
        return r;
    }

    // Average ranks of |d|; doubled ranks are exact integers even under ties.
    std::size_t n = diffs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });

    std::vector<std::uint64_t> rank2(n); // 2 * rank
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
        std::uint64_t twice_avg = static_cast<std::uint64_t>(i + 1 + j); // 2 * mean(i+1 .. j)
        for (std::size_t k = i; k < j; ++k) rank2[order[k]] = twice_avg;
        i = j;
    }

    std::uint64_t w_plus2 = 0, total2 = 0;
    for (std::size_t k = 0; k < n; ++k) {
        total2 += rank2[k];
        if (diffs[k] > 0.0) w_plus2 += rank2[k];
    }
    std::uint64_t w_minus2 = total2 - w_plus2;
    r.w = 0.5 * static_cast<double>(std::min(w_plus2, w_minus2));

    if (n <= 25) {
        r.mode = WilcoxonResult::Mode::exact;
        // counts[s] = number of sign assignments whose doubled positive-rank
        // sum is s; 2^25 assignments fit comfortably in u64 counts.
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(total2) + 1, 0);
        counts[0] = 1;
        for (std::size_t k = 0; k < n; ++k) {
            std::uint64_t rk = rank2[k];
            for (std::size_t s = counts.size(); s-- > rk;) counts[s] += counts[s - rk];
        }
        std::uint64_t le = 0, ge = 0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (s <= w_plus2) le += counts[s];
            if (s >= w_plus2) ge += counts[s];
        }
        double denom = std::ldexp(1.0, static_cast<int>(n)); // 2^n
        double p = 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) / denom;
        r.p = std::min(1.0, p);
    } else {
        r.mode = WilcoxonResult::Mode::approx;
        double w_plus = 0.5 * static_cast<double>(w_plus2);
        double mu = static_cast<double>(n) * static_cast<double>(n + 1) / 4.0;
        double var = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double rk = 0.5 * static_cast<double>(rank2[k]);
            var += rk * rk;
        }
        var /= 4.0;
        double num = w_plus - mu;
        double cc = num > 0.0 ? 0.5 : (num < 0.0 ? -0.5 : 0.0);
        double z = (num - cc) / std::sqrt(var);
        r.p = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
    }
    return r;
}

double bonferroni(double p, std::size_t m) {
    if (m == 0) throw ArgumentError("bonferroni needs at least one comparison");
    return std::min(1.0, p * static_cast<double>(m));
}

} // namespace costarr
