#include "ke/cohort.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "ke/errors.hpp"
#include "ke/stats/tests.hpp"

namespace ke::cohort {

std::string_view to_string(Group group) {
    switch (group) {
        case Group::honor: return "honor";
        case Group::influence: return "influence";
        case Group::zero_cited: return "zero_cited";
    }
    return "honor";
}

std::optional<Group> group_from_string(std::string_view text) {
    if (text == "honor") return Group::honor;
    if (text == "influence") return Group::influence;
    if (text == "zero_cited") return Group::zero_cited;
    return std::nullopt;
}

std::string_view to_string(QuartileBin bin) {
    switch (bin) {
        case QuartileBin::q1: return "Q1";
        case QuartileBin::q2: return "Q2";
        case QuartileBin::q3: return "Q3";
        case QuartileBin::q4: return "Q4";
    }
    return "Q1";
}

std::string_view to_string(FwciBin bin) {
    switch (bin) {
        case FwciBin::zero: return "Zero";
        case FwciBin::low: return "Low";
        case FwciBin::mid_low: return "MidLow";
        case FwciBin::mid_high: return "MidHigh";
        case FwciBin::high: return "High";
    }
    return "Zero";
}

std::vector<QuartileBin> quartile_bins(const std::vector<double>& values) {
    if (values.size() < 4)
        throw Error(ErrorKind::insufficient_data, "quartile binning needs at least 4 values");
    const double p25 = stats::quantile_type7(values, 0.25);
    const double p50 = stats::quantile_type7(values, 0.50);
    const double p75 = stats::quantile_type7(values, 0.75);
    std::vector<QuartileBin> bins;
    bins.reserve(values.size());
    for (double v : values) {
        if (v <= p25)
            bins.push_back(QuartileBin::q1);
        else if (v <= p50)
            bins.push_back(QuartileBin::q2);
        else if (v <= p75)
            bins.push_back(QuartileBin::q3);
        else
            bins.push_back(QuartileBin::q4);
    }
    return bins;
}

std::vector<std::optional<FwciBin>> fwci_bins(
    const std::vector<std::optional<double>>& values) {
    std::vector<double> positives;
    for (const auto& v : values)
        if (v && *v > 0.0) positives.push_back(*v);

    std::vector<QuartileBin> positive_bins;
    if (positives.size() >= 4) positive_bins = quartile_bins(positives);

    std::vector<std::optional<FwciBin>> out;
    out.reserve(values.size());
    std::size_t pos_index = 0;
    for (const auto& v : values) {
        if (!v) {
            out.push_back(std::nullopt);
            continue;
        }
        if (*v <= 0.0) {
            out.push_back(FwciBin::zero);
            continue;
        }
        if (positive_bins.empty()) {
            // Too few positive values to split; call them all Low.
            out.push_back(FwciBin::low);
            continue;
        }
        switch (positive_bins[pos_index++]) {
            case QuartileBin::q1: out.push_back(FwciBin::low); break;
            case QuartileBin::q2: out.push_back(FwciBin::mid_low); break;
            case QuartileBin::q3: out.push_back(FwciBin::mid_high); break;
            case QuartileBin::q4: out.push_back(FwciBin::high); break;
        }
    }
    return out;
}

CohortSpec cohort_spec_from_json(const nlohmann::json& spec) {
    CohortSpec out;
    try {
        if (!spec.contains("years") || !spec["years"].is_array() || spec["years"].empty())
            throw Error(ErrorKind::schema, "cohort spec needs a nonempty 'years' array");
        for (const auto& y : spec["years"]) out.years.push_back(y.get<int>());
        if (spec.contains("groups")) {
            out.groups.clear();
            for (const auto& g : spec["groups"]) {
                const auto parsed = group_from_string(g.get<std::string>());
                if (!parsed)
                    throw Error(ErrorKind::schema,
                                "unknown group '" + g.get<std::string>() +
                                    "' (expected honor, influence, zero_cited)");
                out.groups.insert(*parsed);
            }
        }
        out.per_cell_limit = spec.value("per_cell_limit", out.per_cell_limit);
        if (spec.contains("honor_sources")) {
            out.honor_sources.clear();
            for (const auto& s : spec["honor_sources"])
                out.honor_sources.push_back(s.get<std::string>());
        }
        out.work_type = spec.value("work_type", out.work_type);
        out.influence_percentile = spec.value("influence_percentile", out.influence_percentile);
        out.universe_sample = spec.value("universe_sample", out.universe_sample);
        out.sample_seed = spec.value("sample_seed", out.sample_seed);
        if (spec.contains("influence_ids"))
            for (const auto& id : spec["influence_ids"])
                out.influence_ids.push_back(id.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::schema, std::string("bad cohort spec: ") + e.what());
    }
    if (out.per_cell_limit < 1)
        throw Error(ErrorKind::usage, "per_cell_limit must be >= 1");
    if (!(out.influence_percentile > 0.0 && out.influence_percentile < 1.0))
        throw Error(ErrorKind::usage, "influence_percentile must lie in (0, 1)");
    return out;
}

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back(sep);
        out += parts[i];
    }
    return out;
}

struct Candidate {
    WorkRecord work;
    Group group;
    std::string context;
};

// Runs jobs on up to `bound` threads; results land in job order and the
// first exception is rethrown after all workers drain.
template <typename T>
std::vector<T> run_bounded(std::vector<std::function<T()>>& jobs, int bound) {
    std::vector<T> results(jobs.size());
    if (jobs.empty()) return results;
    const int workers = std::max(1, std::min<int>(bound, static_cast<int>(jobs.size())));

    std::mutex queue_mutex;
    std::size_t next = 0;
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t mine;
                {
                    std::lock_guard lock(queue_mutex);
                    if (failure || next >= jobs.size()) return;
                    mine = next++;
                }
                try {
                    results[mine] = jobs[mine]();
                } catch (...) {
                    std::lock_guard lock(queue_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& worker : pool) worker.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace

CohortBuildResult build_cohort(openalex::Client& client, const CohortSpec& spec) {
    if (spec.years.empty()) throw Error(ErrorKind::usage, "cohort spec has no years");
    if (spec.per_cell_limit < 1) throw Error(ErrorKind::usage, "per_cell_limit must be >= 1");

    // Each (group, year) cell harvests independently; cells run on a bounded
    // worker pool and merge in canonical order so parallelism never changes
    // the output.
    struct CellResult {
        std::vector<Candidate> candidates;
        std::vector<Exclusion> exclusions;
        std::vector<std::string> notes;
    };

    CohortBuildResult result;

    const auto harvest_cell = [&client, &spec](Group group, int year) -> CellResult {
        CellResult cell;
        const std::string context = std::string(to_string(group)) + "/" + std::to_string(year);
        std::vector<WorkRecord> works;
        switch (group) {
            case Group::honor: {
                const std::string filter = "publication_year:" + std::to_string(year) +
                                           ",type:" + spec.work_type +
                                           ",primary_location.source.display_name:" +
                                           join(spec.honor_sources, '|');
                works = client.list_works(filter, spec.per_cell_limit);
                break;
            }
            case Group::influence: {
                // Percentile rule: sample the same-year universe, take works at
                // or above the citation percentile.
                const std::string filter = "publication_year:" + std::to_string(year) +
                                           ",type:" + spec.work_type;
                auto universe = client.list_works(filter, spec.universe_sample,
                                                  spec.universe_sample, spec.sample_seed);
                if (universe.empty()) break;
                std::vector<double> citations;
                citations.reserve(universe.size());
                for (const auto& work : universe)
                    citations.push_back(static_cast<double>(work.cited_by_count));
                const double cutoff =
                    stats::quantile_type7(citations, spec.influence_percentile);
                for (auto& work : universe)
                    if (static_cast<double>(work.cited_by_count) >= cutoff)
                        works.push_back(std::move(work));
                std::sort(works.begin(), works.end(),
                          [](const WorkRecord& a, const WorkRecord& b) {
                              if (a.cited_by_count != b.cited_by_count)
                                  return a.cited_by_count > b.cited_by_count;
                              return a.id < b.id;
                          });
                if (static_cast<int>(works.size()) > spec.per_cell_limit)
                    works.resize(spec.per_cell_limit);
                break;
            }
            case Group::zero_cited: {
                const std::string filter = "publication_year:" + std::to_string(year) +
                                           ",type:" + spec.work_type + ",cited_by_count:0";
                works = client.list_works(filter, spec.per_cell_limit);
                break;
            }
        }
        if (works.empty()) {
            cell.notes.push_back("cell " + context + ": no works matched");
            return cell;
        }
        // Group predicates are re-checked locally: upstream data drifts.
        for (auto& work : works) {
            bool ok = true;
            std::string why;
            switch (group) {
                case Group::honor:
                    ok = work.source &&
                         std::find(spec.honor_sources.begin(), spec.honor_sources.end(),
                                   *work.source) != spec.honor_sources.end();
                    why = "source not in the honor journal list";
                    break;
                case Group::influence:
                    ok = true;  // cutoff applied at selection
                    break;
                case Group::zero_cited:
                    ok = work.cited_by_count == 0;
                    why = "cited_by_count is nonzero";
                    break;
            }
            if (ok && work.publication_year != year) {
                ok = false;
                why = "publication year mismatch";
            }
            if (ok)
                cell.candidates.push_back({std::move(work), group, context});
            else
                cell.exclusions.push_back({work.id, context, "group_predicate", why});
        }
        return cell;
    };

    // An explicit influence id list overrides the percentile harvest and is
    // processed once, outside the per-year cells.
    const auto harvest_explicit_influence = [&client, &spec]() -> CellResult {
        CellResult cell;
        const std::string context = "influence/explicit";
        auto batch = client.fetch_works_batch(spec.influence_ids);
        for (const auto& id : batch.missing)
            cell.exclusions.push_back(
                {id, context, "unknown_work", "explicit influence id unresolvable"});
        for (auto& work : batch.records) {
            if (std::find(spec.years.begin(), spec.years.end(), work.publication_year) ==
                spec.years.end()) {
                cell.exclusions.push_back({work.id, context, "group_predicate",
                                           "publication year outside the cohort years"});
                continue;
            }
            cell.candidates.push_back({std::move(work), Group::influence, context});
        }
        return cell;
    };

    // Enumerate cells in canonical order, run them on a bounded pool, then
    // merge in that same order.
    std::vector<std::function<CellResult()>> jobs;
    for (const Group group : spec.groups) {
        if (group == Group::influence && !spec.influence_ids.empty()) {
            jobs.emplace_back(harvest_explicit_influence);
            continue;
        }
        for (const int year : spec.years)
            jobs.emplace_back([&harvest_cell, group, year] { return harvest_cell(group, year); });
    }
    const auto cells = run_bounded<CellResult>(jobs, client.parallelism());

    std::vector<Candidate> candidates;
    for (const auto& cell : cells) {
        for (const auto& cand : cell.candidates) candidates.push_back(cand);
        result.exclusions.insert(result.exclusions.end(), cell.exclusions.begin(),
                                 cell.exclusions.end());
        result.notes.insert(result.notes.end(), cell.notes.begin(), cell.notes.end());
    }

    // Within a group a work counts once; the same work may qualify for two
    // different groups.
    std::set<std::pair<Group, std::string>> seen;
    std::vector<Candidate> unique;
    for (auto& cand : candidates) {
        if (!seen.insert({cand.group, cand.work.id}).second) {
            result.exclusions.push_back(
                {cand.work.id, cand.context, "duplicate", "already sampled for this group"});
            continue;
        }
        unique.push_back(std::move(cand));
    }
    result.candidates = unique.size() + result.exclusions.size();

    // KE for each kept candidate, again bounded-parallel with an
    // order-preserving merge. Per-record failures become exclusions.
    struct KeOutcome {
        std::optional<CohortRecord> record;
        std::optional<Exclusion> exclusion;
    };
    std::vector<std::function<KeOutcome()>> ke_jobs;
    ke_jobs.reserve(unique.size());
    for (auto& cand : unique) {
        ke_jobs.emplace_back([&client, &cand]() -> KeOutcome {
            if (cand.work.referenced_works.size() < 2)
                return {std::nullopt,
                        Exclusion{cand.work.id, cand.context, "degenerate_neighborhood",
                                  "fewer than 2 references"}};
            try {
                const ReferenceNeighborhood neigh = client.resolve_neighborhood(cand.work.id);
                CohortRecord record;
                record.group = cand.group;
                record.ke = compute_ke(neigh);
                record.work = std::move(cand.work);
                return {std::move(record), std::nullopt};
            } catch (const Error& e) {
                return {std::nullopt, Exclusion{cand.work.id, cand.context,
                                                std::string(to_string(e.kind())), e.what()}};
            }
        });
    }
    for (auto& outcome : run_bounded<KeOutcome>(ke_jobs, client.parallelism())) {
        if (outcome.record) result.records.push_back(std::move(*outcome.record));
        if (outcome.exclusion) result.exclusions.push_back(std::move(*outcome.exclusion));
    }

    // Cohort-level bins over the kept records.
    if (result.records.size() >= 4) {
        std::vector<double> team, refs;
        std::vector<std::optional<double>> fwci;
        for (const auto& record : result.records) {
            team.push_back(static_cast<double>(record.work.author_count));
            refs.push_back(static_cast<double>(record.work.referenced_works.size()));
            fwci.push_back(record.work.fwci);
        }
        const auto team_bins = quartile_bins(team);
        const auto ref_bins = quartile_bins(refs);
        const auto fw_bins = fwci_bins(fwci);
        for (std::size_t i = 0; i < result.records.size(); ++i) {
            result.records[i].team_bin = team_bins[i];
            result.records[i].refcount_bin = ref_bins[i];
            result.records[i].fwci_bin = fw_bins[i];
        }
    }
    return result;
}

}  // namespace ke::cohort
