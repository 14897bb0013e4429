#include "ke/openalex/cache.hpp"

#include <ctime>
#include <fstream>
#include <mutex>

#include "ke/errors.hpp"

namespace ke::openalex {

WorkCache::WorkCache(std::filesystem::path file) : file_(std::move(file)) {
    if (!file_.empty()) load();
}

void WorkCache::load() {
    std::ifstream in(file_);
    if (!in) return;  // nothing cached yet
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json entry;
        try {
            entry = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::decode, "cache file " + file_.string() + " line " +
                                               std::to_string(line_no) + ": " + e.what());
        }
        if (!entry.contains("work")) continue;
        WorkRecord work = work_from_json(entry["work"]);
        if (work.doi) doi_to_id_[*work.doi] = work.id;
        by_id_[work.id] = std::move(work);
    }
}

std::optional<WorkRecord> WorkCache::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> WorkCache::id_for_doi(const std::string& doi) const {
    std::shared_lock lock(mutex_);
    const auto it = doi_to_id_.find(doi);
    if (it == doi_to_id_.end()) return std::nullopt;
    return it->second;
}

void WorkCache::put(const WorkRecord& work) {
    std::unique_lock lock(mutex_);
    if (!file_.empty()) {
        if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
        std::ofstream out(file_, std::ios::app);
        if (!out)
            throw Error(ErrorKind::usage, "cannot write cache file: " + file_.string());
        nlohmann::ordered_json entry;
        entry["key"] = work.id;
        entry["fetched_at"] = iso8601_now();
        entry["work"] = work_to_json(work);
        out << entry.dump() << '\n';
    }
    if (work.doi) doi_to_id_[*work.doi] = work.id;
    by_id_[work.id] = work;
}

std::size_t WorkCache::size() const {
    std::shared_lock lock(mutex_);
    return by_id_.size();
}

std::string iso8601_now() {
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

}  // namespace ke::openalex
