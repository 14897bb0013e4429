#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ke/core.hpp"
#include "ke/openalex/client.hpp"
#include "ke/work.hpp"

namespace ke::cohort {

// The three comparison cohorts: journal-prestige articles, top-percentile
// highly cited works, and works nobody has cited yet.
enum class Group { honor, influence, zero_cited };

std::string_view to_string(Group group);
std::optional<Group> group_from_string(std::string_view text);

enum class QuartileBin { q1, q2, q3, q4 };
std::string_view to_string(QuartileBin bin);

enum class FwciBin { zero, low, mid_low, mid_high, high };
std::string_view to_string(FwciBin bin);

// Assigns each value a quartile by the P25/P50/P75 cutpoints of the whole
// list (type-7 quantiles); ties at a cutpoint fall to the lower bin, so the
// result is independent of input order. Needs at least 4 values.
std::vector<QuartileBin> quartile_bins(const std::vector<double>& values);

// Zero stays its own bin, missing stays missing, and the positive values
// are quartiled among themselves.
std::vector<std::optional<FwciBin>> fwci_bins(
    const std::vector<std::optional<double>>& values);

struct CohortRecord {
    WorkRecord work;
    Group group;
    std::optional<KEResult> ke;
    std::optional<QuartileBin> team_bin;
    std::optional<QuartileBin> refcount_bin;
    std::optional<FwciBin> fwci_bin;
};

struct CohortSpec {
    std::vector<int> years;
    std::set<Group> groups{Group::honor, Group::influence, Group::zero_cited};
    int per_cell_limit = 25;
    std::vector<std::string> honor_sources{"Science", "Nature"};
    std::string work_type = "article";
    // Influence selection: either the percentile rule over a same-year
    // sample of the harvest universe, or an explicit id list.
    double influence_percentile = 0.99;
    int universe_sample = 200;
    int sample_seed = 1;
    std::vector<std::string> influence_ids;
};

CohortSpec cohort_spec_from_json(const nlohmann::json& spec);

struct Exclusion {
    std::string id;       // work id or input ref
    std::string context;  // e.g. "honor/2015"
    std::string reason;   // error kind or predicate name
    std::string detail;
};

struct CohortBuildResult {
    std::vector<CohortRecord> records;
    std::vector<Exclusion> exclusions;
    std::vector<std::string> notes;  // empty cells and other non-fatal events
    std::size_t candidates = 0;      // all fetched candidates; records + exclusions
};

// Harvests each (year, group) cell through the client, computes KE for
// every kept work, attaches cohort-level bins, and accounts for every
// candidate either as a record or as an exclusion.
CohortBuildResult build_cohort(openalex::Client& client, const CohortSpec& spec);

}  // namespace ke::cohort
