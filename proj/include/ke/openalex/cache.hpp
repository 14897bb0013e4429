#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "ke/work.hpp"

namespace ke::openalex {

// Append-only JSONL store of fetched works, keyed by work id, with an
// in-memory index and a DOI -> id side index. Later lines win, so appends
// never need rewrites. An empty path keeps the cache memory-only.
// Concurrent readers share the lock; writes are serialized.
class WorkCache {
public:
    explicit WorkCache(std::filesystem::path file);

    std::optional<WorkRecord> get(const std::string& id) const;
    std::optional<std::string> id_for_doi(const std::string& doi) const;
    void put(const WorkRecord& work);
    std::size_t size() const;
    const std::filesystem::path& file() const { return file_; }

private:
    std::filesystem::path file_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, WorkRecord> by_id_;
    std::unordered_map<std::string, std::string> doi_to_id_;

    void load();
};

// UTC timestamp in ISO-8601 form, recorded with each cache line so stale
// citation counts stay auditable.
std::string iso8601_now();

}  // namespace ke::openalex
