#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace xsr::stats {

struct GroupSummary {
    std::string group;
    double median = 0.0;
    double iqr = 0.0;
    int n = 0;
};

// Median with the midpoint-of-middle-two convention; IQR from linearly
// interpolated quartiles (the (n-1)p rule).
GroupSummary median_iqr(std::vector<double> values, const std::string& group = {});

double median(std::vector<double> values);
double quantile(std::vector<double> values, double p);

struct WilcoxonResult {
    double p_value = 1.0;
    double statistic = 0.0;  // W+ (sum of positive ranks)
    int n = 0;               // pairs remaining after dropping zero differences
    bool degenerate = false; // all differences were zero
    bool exact = false;      // exact enumeration rather than normal approximation
};

// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
// are dropped; exact null distribution for n <= 25, normal approximation
// with tie and continuity correction above.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

// Holm-Bonferroni step-down adjustment, returned in input order.
std::vector<double> holm_bonferroni(const std::vector<double>& p_values);

enum class Direction { LowerIsBetter, HigherIsBetter };

struct RankTable {
    std::vector<std::string> methods;
    std::vector<double> average_ranks;       // in [1, #methods]
    Eigen::MatrixXd adjusted_p;              // symmetric, diagonal 1
    double significance_threshold = 0.05;
};

// Fractional per-dataset ranks (ties share the mean rank) averaged across
// datasets, plus pairwise Wilcoxon tests with Holm correction.
// `scores` is methods x datasets.
RankTable average_ranks(const Eigen::MatrixXd& scores, const std::vector<std::string>& methods,
                        Direction direction);

// Fractional ranks of one score vector; rank 1 is the best value under the
// given direction.
std::vector<double> fractional_ranks(const std::vector<double>& scores, Direction direction);

}  // namespace xsr::stats
