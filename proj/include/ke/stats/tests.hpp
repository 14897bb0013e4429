#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ke::stats {

struct TestResult {
    std::string label;  // "t", "F", "W", "r"
    double statistic = 0.0;
    double df1 = 0.0;
    std::optional<double> df2;  // second df for F-shaped tests
    double p_value = 1.0;
};

// Welch's two-sample t test with Satterthwaite df; mean(a) - mean(b) in the
// numerator, two-sided p. Requires >= 2 observations and nonzero variance
// in each sample.
TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Classic pooled-variance Student t, df = na + nb - 2.
TestResult pooled_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Brown-Forsythe homogeneity-of-variance test: one-way F on absolute
// deviations from the group medians. Groups of identical spread (all
// deviations zero) score W = 0, p = 1.
TestResult levene_test(const std::vector<std::vector<double>>& groups);

// One-way ANOVA F with df (k-1, n-k). Errors when every group has zero
// internal variance (the F statistic is undefined there).
TestResult one_way_anova(const std::vector<std::vector<double>>& groups);

struct TukeyRow {
    std::string group_a;
    std::string group_b;
    double mean_diff = 0.0;  // mean(b) - mean(a)
    double p_adj = 1.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    bool reject = false;
};

struct TukeyTable {
    std::vector<TukeyRow> rows;  // pairs in input label order
    double alpha = 0.05;
    double q_critical = 0.0;
    double df = 0.0;
    int group_count = 0;
};

// Tukey HSD with the Tukey-Kramer standard error for unequal group sizes;
// adjusted p from the studentized range with df = n - k, simultaneous CIs
// at 1 - alpha.
TukeyTable tukey_hsd(const std::vector<std::pair<std::string, std::vector<double>>>& groups,
                     double alpha = 0.05);

// Pearson correlation; statistic holds r, df1 = n - 2, two-sided p via the
// t transform.
TestResult pearson_r(const std::vector<double>& x, const std::vector<double>& y);

// Fraction of values at or above the threshold.
double threshold_share(const std::vector<double>& values, double threshold);

double mean(const std::vector<double>& values);
double sample_variance(const std::vector<double>& values);
double median(std::vector<double> values);

// Linear-interpolation quantile between order statistics (the common
// "type 7" definition); p in [0, 1].
double quantile_type7(std::vector<double> values, double p);

}  // namespace ke::stats
