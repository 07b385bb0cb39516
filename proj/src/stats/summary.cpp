#include <algorithm>
#include <cmath>

#include "xsr/common/error.hpp"
#include "xsr/stats/stats.hpp"

namespace xsr::stats {

double median(std::vector<double> values) {
    if (values.empty()) throw ContractError("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw ContractError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double position = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(position));
    const auto hi = static_cast<std::size_t>(std::ceil(position));
    const double frac = position - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

GroupSummary median_iqr(std::vector<double> values, const std::string& group) {
    GroupSummary summary;
    summary.group = group;
    summary.n = static_cast<int>(values.size());
    summary.median = median(values);
    summary.iqr = quantile(values, 0.75) - quantile(values, 0.25);
    return summary;
}

}  // namespace xsr::stats
