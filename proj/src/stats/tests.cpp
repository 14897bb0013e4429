#include "ke/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ke/errors.hpp"
#include "ke/stats/distributions.hpp"

namespace ke::stats {

double mean(const std::vector<double>& values) {
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "mean of empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double sample_variance(const std::vector<double>& values) {
    if (values.size() < 2)
        throw Error(ErrorKind::insufficient_data, "variance needs at least 2 observations");
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return ss / static_cast<double>(values.size() - 1);
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "median of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw Error(ErrorKind::insufficient_data, "quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorKind::insufficient_data, "quantile probability outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

struct SampleStats {
    double mean;
    double var;
    double n;
};

SampleStats describe(const std::vector<double>& values, const char* which) {
    if (values.size() < 2)
        throw Error(ErrorKind::insufficient_data,
                    std::string("two-sample test needs >= 2 observations in ") + which);
    SampleStats s{mean(values), sample_variance(values), static_cast<double>(values.size())};
    if (s.var <= 0.0)
        throw Error(ErrorKind::insufficient_variance,
                    std::string("sample '") + which + "' has zero variance");
    return s;
}

struct AnovaParts {
    double ss_between = 0.0;
    double ss_within = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
};

AnovaParts anova_parts(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2)
        throw Error(ErrorKind::insufficient_data, "need at least 2 groups");
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.empty()) throw Error(ErrorKind::insufficient_data, "empty group");
        total += g.size();
    }
    if (total <= groups.size())
        throw Error(ErrorKind::insufficient_data, "total observations must exceed group count");

    double grand_sum = 0.0;
    for (const auto& g : groups)
        for (double v : g) grand_sum += v;
    const double grand_mean = grand_sum / static_cast<double>(total);

    AnovaParts parts;
    for (const auto& g : groups) {
        const double gm = mean(g);
        parts.ss_between += static_cast<double>(g.size()) * (gm - grand_mean) * (gm - grand_mean);
        for (double v : g) parts.ss_within += (v - gm) * (v - gm);
    }
    parts.df1 = static_cast<double>(groups.size() - 1);
    parts.df2 = static_cast<double>(total - groups.size());
    return parts;
}

}  // namespace

TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    const auto sa = describe(a, "a");
    const auto sb = describe(b, "b");
    const double se2_a = sa.var / sa.n;
    const double se2_b = sb.var / sb.n;
    const double se = std::sqrt(se2_a + se2_b);
    const double t = (sa.mean - sb.mean) / se;
    const double df = (se2_a + se2_b) * (se2_a + se2_b) /
                      (se2_a * se2_a / (sa.n - 1.0) + se2_b * se2_b / (sb.n - 1.0));
    return {"t", t, df, std::nullopt, student_t_two_sided_p(t, df)};
}

TestResult pooled_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    const auto sa = describe(a, "a");
    const auto sb = describe(b, "b");
    const double df = sa.n + sb.n - 2.0;
    const double pooled = ((sa.n - 1.0) * sa.var + (sb.n - 1.0) * sb.var) / df;
    const double se = std::sqrt(pooled * (1.0 / sa.n + 1.0 / sb.n));
    const double t = (sa.mean - sb.mean) / se;
    return {"t", t, df, std::nullopt, student_t_two_sided_p(t, df)};
}

TestResult levene_test(const std::vector<std::vector<double>>& groups) {
    for (const auto& g : groups)
        if (g.size() < 2)
            throw Error(ErrorKind::insufficient_data, "homogeneity test needs >= 2 per group");

    std::vector<std::vector<double>> deviations;
    deviations.reserve(groups.size());
    for (const auto& g : groups) {
        const double med = median(g);
        std::vector<double> dev;
        dev.reserve(g.size());
        for (double v : g) dev.push_back(std::fabs(v - med));
        deviations.push_back(std::move(dev));
    }

    const auto parts = anova_parts(deviations);
    if (parts.ss_within <= 0.0) {
        // Every deviation identical inside each group: spreads are either
        // indistinguishable (W = 0) or categorically different (W -> inf).
        if (parts.ss_between <= 0.0) return {"W", 0.0, parts.df1, parts.df2, 1.0};
        return {"W", std::numeric_limits<double>::infinity(), parts.df1, parts.df2, 0.0};
    }
    const double w = (parts.ss_between / parts.df1) / (parts.ss_within / parts.df2);
    return {"W", w, parts.df1, parts.df2, f_upper_tail(w, parts.df1, parts.df2)};
}

TestResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    const auto parts = anova_parts(groups);
    if (parts.ss_within <= 0.0)
        throw Error(ErrorKind::insufficient_variance,
                    "every group has zero internal variance; F is undefined");
    const double f = (parts.ss_between / parts.df1) / (parts.ss_within / parts.df2);
    return {"F", f, parts.df1, parts.df2, f_upper_tail(f, parts.df1, parts.df2)};
}

TukeyTable tukey_hsd(const std::vector<std::pair<std::string, std::vector<double>>>& groups,
                     double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorKind::insufficient_data, "alpha must lie in (0, 1)");
    std::vector<std::vector<double>> data;
    data.reserve(groups.size());
    for (const auto& [name, values] : groups) data.push_back(values);

    const auto parts = anova_parts(data);
    if (parts.ss_within <= 0.0)
        throw Error(ErrorKind::insufficient_variance,
                    "every group has zero internal variance; Tukey HSD is undefined");
    const double ms_within = parts.ss_within / parts.df2;
    const int k = static_cast<int>(groups.size());

    TukeyTable table;
    table.alpha = alpha;
    table.df = parts.df2;
    table.group_count = k;
    table.q_critical = studentized_range_quantile(1.0 - alpha, k, parts.df2);

    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const double mean_a = mean(groups[i].second);
            const double mean_b = mean(groups[j].second);
            const double na = static_cast<double>(groups[i].second.size());
            const double nb = static_cast<double>(groups[j].second.size());
            // Tukey-Kramer standard error for unequal group sizes.
            const double se = std::sqrt(0.5 * ms_within * (1.0 / na + 1.0 / nb));
            const double diff = mean_b - mean_a;
            const double q_obs = std::fabs(diff) / se;
            TukeyRow row;
            row.group_a = groups[i].first;
            row.group_b = groups[j].first;
            row.mean_diff = diff;
            row.p_adj = std::clamp(1.0 - studentized_range_cdf(q_obs, k, parts.df2), 0.0, 1.0);
            row.ci_lower = diff - table.q_critical * se;
            row.ci_upper = diff + table.q_critical * se;
            row.reject = q_obs > table.q_critical;
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

TestResult pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw Error(ErrorKind::insufficient_data, "correlation inputs must have equal length");
    if (x.size() < 3)
        throw Error(ErrorKind::insufficient_data, "correlation needs at least 3 pairs");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw Error(ErrorKind::insufficient_variance, "correlation input is constant");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    const double df = static_cast<double>(x.size()) - 2.0;
    double p = 0.0;
    if (1.0 - r * r > 1e-15) {
        const double t = r * std::sqrt(df / (1.0 - r * r));
        p = student_t_two_sided_p(t, df);
    }
    return {"r", r, df, std::nullopt, p};
}

double threshold_share(const std::vector<double>& values, double threshold) {
    if (values.empty())
        throw Error(ErrorKind::insufficient_data, "threshold share of empty sample");
    std::size_t hits = 0;
    for (double v : values)
        if (v >= threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(values.size());
}

}  // namespace ke::stats
