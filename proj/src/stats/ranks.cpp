#include <algorithm>
#include <numeric>

#include "xsr/common/error.hpp"
#include "xsr/stats/stats.hpp"

namespace xsr::stats {

std::vector<double> holm_bonferroni(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    for (const double p : p_values) {
        if (p < 0.0 || p > 1.0) throw ContractError("p-values must lie in [0, 1]");
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<double> adjusted(m);
    double running_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double scaled = std::min(1.0, static_cast<double>(m - i) * p_values[order[i]]);
        running_max = std::max(running_max, scaled);
        adjusted[order[i]] = running_max;
    }
    return adjusted;
}

std::vector<double> fractional_ranks(const std::vector<double>& scores, Direction direction) {
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return direction == Direction::LowerIsBetter ? scores[a] < scores[b] : scores[a] > scores[b];
    });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double shared = static_cast<double>(i + j + 2) / 2.0;  // mean of ranks i+1..j+1
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

RankTable average_ranks(const Eigen::MatrixXd& scores, const std::vector<std::string>& methods,
                        Direction direction) {
    const auto n_methods = static_cast<std::size_t>(scores.rows());
    const auto n_datasets = static_cast<std::size_t>(scores.cols());
    if (methods.size() != n_methods) throw ContractError("method names must match score rows");
    if (n_datasets == 0) throw ContractError("average ranks require at least one dataset");

    RankTable table;
    table.methods = methods;
    table.average_ranks.assign(n_methods, 0.0);
    for (std::size_t d = 0; d < n_datasets; ++d) {
        std::vector<double> column(n_methods);
        for (std::size_t m = 0; m < n_methods; ++m) column[m] = scores(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
        const std::vector<double> ranks = fractional_ranks(column, direction);
        for (std::size_t m = 0; m < n_methods; ++m) table.average_ranks[m] += ranks[m];
    }
    for (auto& r : table.average_ranks) r /= static_cast<double>(n_datasets);

    // Pairwise Wilcoxon over per-dataset scores, Holm-corrected jointly.
    std::vector<double> raw;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n_methods; ++i) {
        for (std::size_t j = i + 1; j < n_methods; ++j) {
            std::vector<double> a(n_datasets), b(n_datasets);
            for (std::size_t d = 0; d < n_datasets; ++d) {
                a[d] = scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
                b[d] = scores(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(d));
            }
            raw.push_back(wilcoxon_signed_rank(a, b).p_value);
            pairs.emplace_back(i, j);
        }
    }
    const std::vector<double> adjusted = holm_bonferroni(raw);

    table.adjusted_p = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n_methods),
                                             static_cast<Eigen::Index>(n_methods));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        table.adjusted_p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = adjusted[k];
        table.adjusted_p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = adjusted[k];
    }
    return table;
}

}  // namespace xsr::stats
