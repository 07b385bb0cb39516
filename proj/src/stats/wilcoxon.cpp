#include <algorithm>
#include <cmath>
#include <numeric>

#include "xsr/common/error.hpp"
#include "xsr/stats/stats.hpp"

namespace xsr::stats {

namespace {

constexpr int kExactLimit = 25;

// Average ranks of |d|, ties shared. Returned doubled so that tied ranks
// (k + 0.5) stay integral for the exact-distribution DP.
std::vector<long long> doubled_ranks(const std::vector<double>& magnitudes) {
    const std::size_t n = magnitudes.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return magnitudes[a] < magnitudes[b]; });

    std::vector<long long> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
        // Mean of ranks i+1 .. j+1, doubled: (i + j + 2).
        const long long doubled = static_cast<long long>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
        i = j + 1;
    }
    return ranks;
}

// Exact null distribution of the doubled positive-rank sum by dynamic
// programming over all 2^n sign assignments.
double exact_two_sided_p(const std::vector<long long>& ranks, long long doubled_w_plus) {
    const long long total = std::accumulate(ranks.begin(), ranks.end(), 0LL);
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    for (const long long r : ranks) {
        for (long long s = total; s >= r; --s) {
            counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];
        }
    }
    const double all = std::pow(2.0, static_cast<double>(ranks.size()));
    double below = 0.0, above = 0.0;
    for (long long s = 0; s <= total; ++s) {
        if (s <= doubled_w_plus) below += counts[static_cast<std::size_t>(s)];
        if (s >= doubled_w_plus) above += counts[static_cast<std::size_t>(s)];
    }
    return std::min(1.0, 2.0 * std::min(below, above) / all);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ContractError("wilcoxon requires paired samples of equal length");

    std::vector<double> magnitudes;
    std::vector<int> signs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d == 0.0) continue;  // classic drop convention
        magnitudes.push_back(std::abs(d));
        signs.push_back(d > 0 ? 1 : -1);
    }

    WilcoxonResult result;
    result.n = static_cast<int>(magnitudes.size());
    if (magnitudes.empty()) {
        result.degenerate = true;
        result.p_value = 1.0;
        return result;
    }

    const std::vector<long long> ranks = doubled_ranks(magnitudes);
    long long doubled_w_plus = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (signs[i] > 0) doubled_w_plus += ranks[i];
    }
    result.statistic = static_cast<double>(doubled_w_plus) / 2.0;

    if (result.n <= kExactLimit) {
        result.exact = true;
        result.p_value = exact_two_sided_p(ranks, doubled_w_plus);
        return result;
    }

    const double n = static_cast<double>(result.n);
    const double mean = n * (n + 1.0) / 4.0;
    double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    // Tie correction: subtract sum(t^3 - t)/48 per tied group.
    std::vector<double> sorted = magnitudes;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        variance -= (t * t * t - t) / 48.0;
        i = j + 1;
    }

    const double w = result.statistic;
    const double continuity = w > mean ? -0.5 : (w < mean ? 0.5 : 0.0);
    const double z = (w - mean + continuity) / std::sqrt(variance);
    result.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
    return result;
}

}  // namespace xsr::stats
