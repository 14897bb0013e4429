#include "ke/core.hpp"

#include <algorithm>
#include <cmath>

namespace ke {

ReferenceNeighborhood make_neighborhood(
    std::string focal_id,
    const std::vector<std::string>& references,
    const std::unordered_map<std::string, std::unordered_set<std::string>>& reference_refs,
    std::optional<std::size_t> resolved_count) {
    ReferenceNeighborhood neigh;
    neigh.focal_id = std::move(focal_id);

    neigh.references.reserve(references.size());
    std::unordered_set<std::string> seen;
    for (const auto& ref : references) {
        if (ref.empty() || ref == neigh.focal_id) continue;
        if (seen.insert(ref).second) neigh.references.push_back(ref);
    }

    std::size_t resolved = 0;
    for (const auto& ref : neigh.references) {
        auto it = reference_refs.find(ref);
        if (it == reference_refs.end()) {
            neigh.reference_refs.emplace(ref, std::unordered_set<std::string>{});
            continue;
        }
        ++resolved;
        std::unordered_set<std::string> cleaned;
        cleaned.reserve(it->second.size());
        for (const auto& cited : it->second) {
            if (cited.empty() || cited == ref || cited == neigh.focal_id) continue;
            cleaned.insert(cited);
        }
        neigh.reference_refs.emplace(ref, std::move(cleaned));
    }

    neigh.resolved_count = resolved_count.value_or(resolved);
    if (neigh.resolved_count > neigh.references.size())
        neigh.resolved_count = neigh.references.size();
    return neigh;
}

std::int64_t count_internal_links(const ReferenceNeighborhood& neigh) {
    const auto n = neigh.references.size();
    if (n < 2)
        throw Error(ErrorKind::degenerate_neighborhood,
                    "neighborhood has fewer than 2 references; the link density is undefined");

    std::unordered_map<std::string_view, std::uint32_t> position;
    position.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        position.emplace(neigh.references[i], static_cast<std::uint32_t>(i));

    // Walk each reference's citation list and keep the pairs that land back
    // inside R. Packing (min,max) index pairs into one key makes the
    // either-direction dedup free.
    std::unordered_set<std::uint64_t> linked;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = neigh.reference_refs.find(neigh.references[i]);
        if (it == neigh.reference_refs.end()) continue;
        for (const auto& cited : it->second) {
            auto pos = position.find(cited);
            if (pos == position.end()) continue;
            const std::uint32_t j = pos->second;
            if (j == i) continue;
            const std::uint64_t lo = std::min<std::uint64_t>(i, j);
            const std::uint64_t hi = std::max<std::uint64_t>(i, j);
            linked.insert((lo << 32) | hi);
        }
    }
    return static_cast<std::int64_t>(linked.size());
}

double knowledge_eccentricity(std::int64_t n, std::int64_t l) {
    if (n < 2)
        throw Error(ErrorKind::undefined_metric,
                    "knowledge eccentricity requires at least 2 references (n >= 2)");
    const std::int64_t max_links = n * (n - 1) / 2;
    if (l < 0 || l > max_links)
        throw Error(ErrorKind::invalid_link_count,
                    "internal link count must lie in [0, n(n-1)/2]");
    // density = 2l / (n(n-1)) = l / max_links, exact at both endpoints.
    const double density = static_cast<double>(l) / static_cast<double>(max_links);
    const double ke = 1.0 - std::cbrt(density);
    return std::clamp(ke, 0.0, 1.0);
}

std::chrono::year_month_day today_utc() {
    using namespace std::chrono;
    return year_month_day{floor<days>(system_clock::now())};
}

KEResult compute_ke(const ReferenceNeighborhood& neigh, std::chrono::year_month_day computed_at) {
    KEResult result;
    result.focal_id = neigh.focal_id;
    result.n_refs = static_cast<std::int64_t>(neigh.references.size());
    result.internal_links = count_internal_links(neigh);
    result.ke = knowledge_eccentricity(result.n_refs, result.internal_links);
    result.coverage = result.n_refs == 0
                          ? 0.0
                          : static_cast<double>(neigh.resolved_count) / static_cast<double>(result.n_refs);
    result.computed_at = computed_at;
    return result;
}

}  // namespace ke
