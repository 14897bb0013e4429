#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "ke/errors.hpp"
#include "ke/stats/distributions.hpp"
#include "ke/stats/diversity.hpp"
#include "ke/stats/tests.hpp"

namespace st = ke::stats;
using ke::Error;
using ke::ErrorKind;

namespace {

// Textbook sums-of-squares oracle for the one-way F statistic.
double anova_f_oracle(const std::vector<std::vector<double>>& groups) {
    std::size_t n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        n += g.size();
        for (double v : g) grand += v;
    }
    grand /= static_cast<double>(n);
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : groups) {
        double gm = 0.0;
        for (double v : g) gm += v;
        gm /= static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (gm - grand) * (gm - grand);
        for (double v : g) ssw += (v - gm) * (v - gm);
    }
    const double df1 = static_cast<double>(groups.size() - 1);
    const double df2 = static_cast<double>(n - groups.size());
    return (ssb / df1) / (ssw / df2);
}

// Direct-formula Brown-Forsythe oracle: one-way F on |x - median|.
double brown_forsythe_oracle(const std::vector<std::vector<double>>& groups) {
    std::vector<std::vector<double>> deviations;
    for (const auto& g : groups) {
        std::vector<double> sorted = g;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double med = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        std::vector<double> dev;
        for (double v : g) dev.push_back(std::fabs(v - med));
        deviations.push_back(std::move(dev));
    }
    return anova_f_oracle(deviations);
}

std::vector<double> random_sample(std::mt19937& rng, int n, double mu, double sigma) {
    std::normal_distribution<double> dist(mu, sigma);
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(dist(rng));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// diversity

TEST_CASE("shannon index basics") {
    CHECK(st::shannon_index({1, 1, 1, 1}) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(st::shannon_index({10, 0, 0, 0}) == 0.0);
    CHECK_THROWS_AS(static_cast<void>(st::shannon_index({0, 0})), Error);
    CHECK_THROWS_AS(static_cast<void>(st::shannon_index({-1, 2})), Error);
}

TEST_CASE("diversity reference values on skewed four-field compositions") {
    // Field composition counts per group (physical/life/health/social).
    const std::vector<std::int64_t> honor{4453, 4037, 1130, 388};
    const std::vector<std::int64_t> influence{3094, 877, 1848, 1258};
    const std::vector<std::int64_t> zero_cited{962, 187, 533, 1257};

    CHECK(std::fabs(st::shannon_index(honor) - 1.099) < 0.005);
    CHECK(std::fabs(st::shannon_index(influence) - 1.278) < 0.005);
    CHECK(std::fabs(st::shannon_index(zero_cited) - 1.214) < 0.005);

    CHECK(std::fabs(st::simpson_indices(honor).second - 0.625) < 0.005);
    CHECK(std::fabs(st::simpson_indices(influence).second - 0.694) < 0.005);
    CHECK(std::fabs(st::simpson_indices(zero_cited).second - 0.673) < 0.005);
}

TEST_CASE("simpson pair and report invariants") {
    const auto [simpson, gini] = st::simpson_indices({1, 1, 1, 1});
    CHECK(simpson == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(gini == doctest::Approx(0.75).epsilon(1e-12));

    std::mt19937 rng(11);
    std::uniform_int_distribution<std::int64_t> count(0, 50);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::int64_t> counts;
        const int k = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < k; ++i) counts.push_back(count(rng));
        std::int64_t total = 0;
        for (auto c : counts) total += c;
        if (total == 0) counts[0] = 1;

        const auto [s, g] = st::simpson_indices(counts);
        CHECK(std::fabs(s + g - 1.0) < 1e-12);

        const auto report = st::diversity_report(counts);
        CHECK(std::fabs(report.gini_simpson - (1.0 - report.simpson)) < 1e-12);
        CHECK(report.shannon <= std::log(static_cast<double>(report.category_count)) + 1e-12);
    }
}

TEST_CASE("shannon is maximal at uniform and never grows under merging") {
    std::mt19937 rng(12);
    std::uniform_int_distribution<std::int64_t> count(1, 40);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 6);
        std::vector<std::int64_t> counts;
        for (int i = 0; i < k; ++i) counts.push_back(count(rng));

        CHECK(st::shannon_index(counts) <= std::log(static_cast<double>(k)) + 1e-12);

        // merge two random categories
        std::vector<std::int64_t> merged = counts;
        const std::size_t a = rng() % merged.size();
        std::size_t b = rng() % merged.size();
        if (b == a) b = (b + 1) % merged.size();
        merged[a] += merged[b];
        merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(b));
        CHECK(st::shannon_index(merged) <= st::shannon_index(counts) + 1e-12);
    }
    const std::vector<std::int64_t> uniform{7, 7, 7, 7, 7};
    CHECK(st::shannon_index(uniform) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

// ---------------------------------------------------------------------------
// two-sample tests

TEST_CASE("welch t on identical samples is exactly null") {
    const std::vector<double> a{1, 2, 3, 4};
    const auto res = st::welch_t_test(a, a);
    CHECK(res.statistic == 0.0);
    CHECK(res.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("welch t worked example") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{2, 3, 4, 5, 6};
    const auto res = st::welch_t_test(a, b);
    CHECK(res.statistic == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(res.df1 == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(res.p_value == doctest::Approx(0.34659350708733416).epsilon(1e-9));
    CHECK(res.label == "t");
}

TEST_CASE("welch t is antisymmetric") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_sample(rng, 5 + static_cast<int>(rng() % 20), 0.0, 1.0);
        const auto b = random_sample(rng, 5 + static_cast<int>(rng() % 20), 0.5, 2.0);
        const auto ab = st::welch_t_test(a, b);
        const auto ba = st::welch_t_test(b, a);
        CHECK(ab.statistic == doctest::Approx(-ba.statistic).epsilon(1e-12));
        CHECK(ab.p_value == doctest::Approx(ba.p_value).epsilon(1e-12));
        CHECK(ab.df1 == doctest::Approx(ba.df1).epsilon(1e-12));
    }
}

TEST_CASE("two-sample guards") {
    CHECK_THROWS_AS(static_cast<void>(st::welch_t_test({1.0}, {1.0, 2.0, 3.0})), Error);
    try {
        static_cast<void>(st::welch_t_test({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_variance);
    }
}

// ---------------------------------------------------------------------------
// homogeneity / ANOVA / Tukey

TEST_CASE("brown-forsythe on matched spreads is null") {
    const auto res = st::levene_test({{1, 2, 3, 4}, {1, 2, 3, 4}});
    CHECK(res.statistic == 0.0);
    CHECK(res.p_value == doctest::Approx(1.0).epsilon(1e-12));

    // constant groups have identical (zero) spreads
    const auto degenerate = st::levene_test({{3, 3, 3}, {7, 7, 7}});
    CHECK(degenerate.statistic == 0.0);
    CHECK(degenerate.p_value == 1.0);
}

TEST_CASE("brown-forsythe matches the direct-formula oracle") {
    const std::vector<std::vector<double>> groups{{0, 0, 1, 1}, {0, 5, 5, 10}};
    const auto res = st::levene_test(groups);
    CHECK(res.statistic == doctest::Approx(brown_forsythe_oracle(groups)).epsilon(1e-12));
    CHECK(res.statistic == doctest::Approx(1.92).epsilon(1e-12));
    CHECK(res.p_value == doctest::Approx(0.21516458437557678).epsilon(1e-9));

    std::mt19937 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<double>> random_groups;
        const int k = 2 + static_cast<int>(rng() % 3);
        for (int g = 0; g < k; ++g)
            random_groups.push_back(
                random_sample(rng, 4 + static_cast<int>(rng() % 10), 0.0, 1.0 + g));
        const auto r = st::levene_test(random_groups);
        CHECK(r.statistic ==
              doctest::Approx(brown_forsythe_oracle(random_groups)).epsilon(1e-10));
    }
}

TEST_CASE("one-way anova on identical groups is exactly null") {
    const std::vector<double> g{1, 2, 3};
    const auto res = st::one_way_anova({g, g, g});
    CHECK(res.statistic == 0.0);
    CHECK(res.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one-way anova matches the sums-of-squares oracle") {
    const std::vector<std::vector<double>> groups{{1, 2, 3}, {2, 3, 4}, {3, 4, 5}};
    const auto res = st::one_way_anova(groups);
    // The textbook oracle on this data: SSB = 6, SSW = 6, F = 3.
    CHECK(res.statistic == doctest::Approx(anova_f_oracle(groups)).epsilon(1e-12));
    CHECK(res.statistic == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(res.df1 == 2.0);
    CHECK(res.df2.value() == 6.0);
    CHECK(res.p_value == doctest::Approx(0.125).epsilon(1e-10));

    std::mt19937 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<double>> random_groups;
        const int k = 2 + static_cast<int>(rng() % 4);
        for (int g = 0; g < k; ++g)
            random_groups.push_back(
                random_sample(rng, 3 + static_cast<int>(rng() % 12), g * 0.3, 1.0));
        const auto r = st::one_way_anova(random_groups);
        CHECK(r.statistic ==
              doctest::Approx(anova_f_oracle(random_groups)).epsilon(1e-10));
    }
}

TEST_CASE("anova rejects all-constant groups") {
    try {
        static_cast<void>(st::one_way_anova({{1, 1}, {2, 2}}));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_variance);
    }
}

TEST_CASE("anova F equals t^2 of the pooled t test for two groups") {
    std::mt19937 rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
        const auto a = random_sample(rng, 4 + static_cast<int>(rng() % 10), 0.0, 1.0);
        const auto b = random_sample(rng, 4 + static_cast<int>(rng() % 10), 0.4, 1.0);
        const auto f = st::one_way_anova({a, b});
        const auto t = st::pooled_t_test(a, b);
        CHECK(f.statistic ==
              doctest::Approx(t.statistic * t.statistic).epsilon(1e-8));
        CHECK(f.p_value == doctest::Approx(t.p_value).epsilon(1e-8));
    }
}

TEST_CASE("tukey hsd on identical groups rejects nothing") {
    const std::vector<double> g{1, 2, 3, 4};
    const auto table = st::tukey_hsd({{"a", g}, {"b", g}, {"c", g}}, 0.05);
    for (const auto& row : table.rows) {
        CHECK(row.mean_diff == 0.0);
        CHECK(row.p_adj == doctest::Approx(1.0).epsilon(1e-9));
        CHECK_FALSE(row.reject);
        CHECK(row.ci_lower <= 0.0);
        CHECK(row.ci_upper >= 0.0);
    }
}

TEST_CASE("tukey hsd worked example") {
    // Balanced three-group data; reference numbers computed independently
    // from the studentized-range formulation.
    const std::vector<std::pair<std::string, std::vector<double>>> groups{
        {"g1", {24, 28, 31}}, {"g2", {26, 30, 33}}, {"g3", {30, 33, 36}}};
    const auto table = st::tukey_hsd(groups, 0.05);
    REQUIRE(table.rows.size() == 3);

    CHECK(table.rows[0].group_a == "g1");
    CHECK(table.rows[0].group_b == "g2");
    CHECK(table.rows[0].mean_diff == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(table.rows[0].p_adj == doctest::Approx(0.7551736262933051).epsilon(2e-4));
    CHECK(table.rows[0].ci_lower == doctest::Approx(-6.39243564992344).epsilon(1e-3));
    CHECK(table.rows[0].ci_upper == doctest::Approx(10.39243564992344).epsilon(1e-3));
    CHECK_FALSE(table.rows[0].reject);

    CHECK(table.rows[1].group_a == "g1");
    CHECK(table.rows[1].group_b == "g3");
    CHECK(table.rows[1].mean_diff == doctest::Approx(5.3333333333).epsilon(1e-9));
    CHECK(table.rows[1].p_adj == doctest::Approx(0.20553002358165606).epsilon(2e-3));
    CHECK(table.rows[1].ci_lower == doctest::Approx(-3.059102316590108).epsilon(2e-3));
    CHECK(table.rows[1].ci_upper == doctest::Approx(13.725768983256772).epsilon(1e-3));

    CHECK(table.rows[2].group_a == "g2");
    CHECK(table.rows[2].group_b == "g3");
    CHECK(table.rows[2].p_adj == doctest::Approx(0.48582342906160736).epsilon(1e-3));
}

TEST_CASE("tukey reject flag, adjusted p and CI always agree") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<std::pair<std::string, std::vector<double>>> groups;
        const int k = 2 + static_cast<int>(rng() % 4);
        for (int g = 0; g < k; ++g)
            groups.emplace_back("g" + std::to_string(g),
                                random_sample(rng, 3 + static_cast<int>(rng() % 8),
                                              (rng() % 3) * 0.8, 1.0));
        const auto table = st::tukey_hsd(groups, 0.05);
        for (const auto& row : table.rows) {
            const bool ci_excludes_zero = row.ci_lower > 0.0 || row.ci_upper < 0.0;
            CHECK(row.reject == ci_excludes_zero);
            CHECK(row.reject == (row.p_adj < table.alpha));
            CHECK(row.ci_lower <= row.mean_diff);
            CHECK(row.mean_diff <= row.ci_upper);
        }
    }
}

// ---------------------------------------------------------------------------
// correlation and shares

TEST_CASE("pearson r on exact linear relationships") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2.0 * v + 1.0);
    const auto pos = st::pearson_r(x, y);
    CHECK(pos.statistic == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pos.p_value == 0.0);

    y.clear();
    for (double v : x) y.push_back(-v);
    const auto neg = st::pearson_r(x, y);
    CHECK(neg.statistic == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("pearson r worked example") {
    const auto res = st::pearson_r({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5});
    CHECK(res.statistic == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(res.df1 == 3.0);
    CHECK(res.p_value == doctest::Approx(0.10408803866182799).epsilon(1e-9));
}

TEST_CASE("pearson guards") {
    CHECK_THROWS_AS(static_cast<void>(st::pearson_r({1, 2}, {1, 2})), Error);
    try {
        static_cast<void>(st::pearson_r({1, 1, 1}, {1, 2, 3}));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_variance);
    }
}

TEST_CASE("threshold share") {
    CHECK(st::threshold_share({0.0, 1.0}, 0.5) == 0.5);
    CHECK(st::threshold_share({0.1, 0.2, 0.3}, 0.9) == 0.0);
    CHECK(st::threshold_share({0.5, 0.6}, 0.5) == 1.0);  // ties count as at-threshold
    CHECK_THROWS_AS(static_cast<void>(st::threshold_share({}, 0.5)), Error);
}
