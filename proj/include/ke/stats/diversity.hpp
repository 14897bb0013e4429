#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ke::stats {

struct DiversityReport {
    std::int64_t sample_size = 0;
    int category_count = 0;  // categories with nonzero count
    double shannon = 0.0;
    double simpson = 0.0;       // sum of squared shares
    double gini_simpson = 0.0;  // 1 - simpson
};

// Shannon entropy H = -sum p_i ln p_i over categories with p_i > 0.
// Throws empty_distribution when all counts are zero.
double shannon_index(const std::vector<std::int64_t>& counts);

// (simpson, gini_simpson). Same domain rules as shannon_index.
std::pair<double, double> simpson_indices(const std::vector<std::int64_t>& counts);

DiversityReport diversity_report(const std::vector<std::int64_t>& counts);

}  // namespace ke::stats
