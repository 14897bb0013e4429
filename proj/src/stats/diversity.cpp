#include "ke/stats/diversity.hpp"

#include <cmath>

#include "ke/errors.hpp"

namespace ke::stats {

namespace {

std::int64_t checked_total(const std::vector<std::int64_t>& counts) {
    std::int64_t total = 0;
    for (auto c : counts) {
        if (c < 0) throw Error(ErrorKind::insufficient_data, "category counts must be nonnegative");
        total += c;
    }
    if (total == 0)
        throw Error(ErrorKind::empty_distribution, "all category counts are zero");
    return total;
}

}  // namespace

double shannon_index(const std::vector<std::int64_t>& counts) {
    const double total = static_cast<double>(checked_total(counts));
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return h;
}

std::pair<double, double> simpson_indices(const std::vector<std::int64_t>& counts) {
    const double total = static_cast<double>(checked_total(counts));
    double simpson = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        simpson += p * p;
    }
    return {simpson, 1.0 - simpson};
}

DiversityReport diversity_report(const std::vector<std::int64_t>& counts) {
    DiversityReport report;
    report.sample_size = checked_total(counts);
    for (auto c : counts)
        if (c > 0) ++report.category_count;
    report.shannon = shannon_index(counts);
    auto [simpson, gini] = simpson_indices(counts);
    report.simpson = simpson;
    report.gini_simpson = gini;
    return report;
}

}  // namespace ke::stats
