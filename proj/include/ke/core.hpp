#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ke/errors.hpp"

namespace ke {

// A focal work's reference set R plus, for each member of R, that
// reference's own outbound reference list (RR). This is the only input the
// eccentricity computation needs.
//
// Invariants (enforced by make_neighborhood):
//   - references holds no duplicates and never contains focal_id
//   - reference_refs has exactly one entry per reference; an unresolved
//     reference maps to the empty set
//   - 0 <= resolved_count <= references.size()
struct ReferenceNeighborhood {
    std::string focal_id;
    std::vector<std::string> references;  // first-occurrence order
    std::unordered_map<std::string, std::unordered_set<std::string>> reference_refs;
    std::size_t resolved_count = 0;
};

// Normalizes raw fetch output into a valid neighborhood: deduplicates the
// reference list, drops the focal work and self-listings, and guarantees an
// RR entry per reference. When resolved_count is not supplied, references
// that appear as keys in reference_refs count as resolved.
ReferenceNeighborhood make_neighborhood(
    std::string focal_id,
    const std::vector<std::string>& references,
    const std::unordered_map<std::string, std::unordered_set<std::string>>& reference_refs,
    std::optional<std::size_t> resolved_count = std::nullopt);

// Number of unordered reference pairs {a, b} where at least one cites the
// other. A pair linked in both directions counts once.
// Throws degenerate_neighborhood when fewer than 2 references.
std::int64_t count_internal_links(const ReferenceNeighborhood& neigh);

// 1 - (2l / (n(n-1)))^(1/3). In [0, 1]; exactly 1 at l = 0 and exactly 0 at
// l = n(n-1)/2. Throws undefined_metric for n < 2 (the paper-excluded
// degenerate case) and invalid_link_count when l is out of range.
double knowledge_eccentricity(std::int64_t n, std::int64_t l);

struct KEResult {
    std::string focal_id;
    std::int64_t n_refs = 0;
    std::int64_t internal_links = 0;
    double ke = 0.0;
    double coverage = 0.0;  // resolved_count / n_refs
    std::chrono::year_month_day computed_at{};
};

std::chrono::year_month_day today_utc();

KEResult compute_ke(const ReferenceNeighborhood& neigh,
                    std::chrono::year_month_day computed_at = today_utc());

}  // namespace ke
