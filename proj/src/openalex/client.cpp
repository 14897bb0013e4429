#include "ke/openalex/client.hpp"

#include <algorithm>
#include <future>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "ke/errors.hpp"

namespace ke::openalex {

namespace {

bool retryable(const HttpResponse& res) {
    if (res.status == 0) return true;  // connection-level failure
    return res.status == 429 || res.status >= 500;
}

std::chrono::milliseconds jittered_backoff(std::chrono::milliseconds base, int attempt) {
    thread_local std::mt19937 rng{std::random_device{}()};
    const double factor = static_cast<double>(1 << attempt);
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    const double ms = std::min(static_cast<double>(base.count()) * factor * jitter(rng), 8000.0);
    return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

}  // namespace

Client::Client(std::shared_ptr<Transport> transport, std::shared_ptr<WorkCache> cache,
               ClientConfig config)
    : transport_(std::move(transport)),
      cache_(std::move(cache)),
      config_(std::move(config)),
      limiter_(config_.rate_limit_rps) {
    if (!transport_) throw Error(ErrorKind::usage, "client needs a transport");
    if (!cache_) cache_ = std::make_shared<WorkCache>(std::filesystem::path{});
    if (config_.parallelism < 1) config_.parallelism = 1;
    if (config_.batch_chunk_size < 1) config_.batch_chunk_size = 1;
}

std::string Client::with_mailto(std::string target) const {
    if (config_.mailto.empty()) return target;
    target += target.find('?') == std::string::npos ? '?' : '&';
    target += "mailto=";
    target += encode_query_value(config_.mailto);
    return target;
}

HttpResponse Client::get_with_retry(const std::string& target) {
    HttpResponse res;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(jittered_backoff(config_.backoff_base, attempt - 1));
        limiter_.acquire();
        res = transport_->get(target);
        if (!retryable(res)) return res;
    }
    return res;
}

nlohmann::json Client::get_json(const std::string& target) {
    const HttpResponse res = get_with_retry(target);
    if (res.status == 404)
        throw Error(ErrorKind::unknown_work, "work not found: " + target);
    if (res.status == 0)
        throw Error(ErrorKind::transport, "request failed: " + target +
                                              (res.error.empty() ? "" : " (" + res.error + ")"));
    if (res.status < 200 || res.status >= 300)
        throw Error(ErrorKind::transport,
                    "HTTP " + std::to_string(res.status) + " for " + target);
    try {
        return nlohmann::json::parse(res.body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::decode, std::string("unparseable response body: ") + e.what());
    }
}

WorkRecord Client::fetch_work(const std::string& ref) {
    const ParsedRef parsed = parse_ref(ref);

    if (parsed.kind == RefKind::openalex_id) {
        if (auto hit = cache_->get(parsed.value)) return *hit;
    } else if (auto id = cache_->id_for_doi(parsed.value)) {
        if (auto hit = cache_->get(*id)) return *hit;
    }

    const std::string target =
        parsed.kind == RefKind::doi ? "/works/doi:" + encode_query_value(parsed.value)
                                    : "/works/" + parsed.value;
    WorkRecord work = decode_openalex_work(get_json(with_mailto(target)));
    cache_->put(work);
    return work;
}

Client::BatchResult Client::fetch_works_batch(const std::vector<std::string>& ids) {
    // Defensive dedup, preserving first-occurrence order.
    std::vector<std::string> wanted;
    std::unordered_set<std::string> seen;
    for (const auto& raw : ids) {
        std::string id = strip_openalex_prefix(raw);
        if (seen.insert(id).second) wanted.push_back(std::move(id));
    }

    std::unordered_map<std::string, WorkRecord> found;
    std::vector<std::string> to_fetch;
    for (const auto& id : wanted) {
        if (auto hit = cache_->get(id))
            found.emplace(id, std::move(*hit));
        else
            to_fetch.push_back(id);
    }

    std::vector<std::vector<std::string>> chunks;
    for (std::size_t i = 0; i < to_fetch.size();
         i += static_cast<std::size_t>(config_.batch_chunk_size)) {
        const auto end = std::min(to_fetch.size(), i + config_.batch_chunk_size);
        chunks.emplace_back(to_fetch.begin() + i, to_fetch.begin() + end);
    }

    const auto fetch_chunk = [this](const std::vector<std::string>& chunk) {
        std::string filter = "openalex_id:";
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            if (i) filter += '|';
            filter += chunk[i];
        }
        std::vector<WorkRecord> records;
        int page = 1;
        while (true) {
            const std::string target = "/works?filter=" + filter +
                                       "&per-page=" + std::to_string(config_.per_page) +
                                       "&page=" + std::to_string(page);
            nlohmann::json body = get_json(with_mailto(target));
            if (!body.contains("results") || !body["results"].is_array())
                throw Error(ErrorKind::decode, "batch response missing results array");
            for (const auto& payload : body["results"])
                records.push_back(decode_openalex_work(payload));
            if (body["results"].size() < static_cast<std::size_t>(config_.per_page)) break;
            ++page;
        }
        return records;
    };

    // Chunks run on a bounded number of worker threads; results are merged
    // back in input order below, so parallelism never changes output.
    std::mutex found_mutex;
    std::size_t next_chunk = 0;
    const int workers =
        std::min<std::size_t>(config_.parallelism, chunks.empty() ? 1 : chunks.size());
    std::mutex queue_mutex;
    std::vector<std::future<void>> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers && !chunks.empty(); ++w) {
        pool.push_back(std::async(std::launch::async, [&] {
            while (true) {
                std::size_t mine;
                {
                    std::lock_guard lock(queue_mutex);
                    if (next_chunk >= chunks.size()) return;
                    mine = next_chunk++;
                }
                try {
                    auto records = fetch_chunk(chunks[mine]);
                    std::lock_guard lock(found_mutex);
                    for (auto& rec : records) {
                        cache_->put(rec);
                        found.emplace(rec.id, std::move(rec));
                    }
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        }));
    }
    for (auto& worker : pool) worker.get();
    if (failure) std::rethrow_exception(failure);

    BatchResult result;
    for (const auto& id : wanted) {
        const auto it = found.find(id);
        if (it != found.end())
            result.records.push_back(it->second);
        else
            result.missing.push_back(id);
    }
    return result;
}

ReferenceNeighborhood Client::resolve_neighborhood(const std::string& ref) {
    const WorkRecord focal = fetch_work(ref);
    if (focal.referenced_works.size() < 2)
        throw Error(ErrorKind::degenerate_neighborhood,
                    "work " + focal.id + " lists " +
                        std::to_string(focal.referenced_works.size()) +
                        " reference(s); the indicator needs at least 2 "
                        "(works with empty reference lists are excluded)");

    const BatchResult batch = fetch_works_batch(focal.referenced_works);

    std::unordered_map<std::string, std::unordered_set<std::string>> reference_refs;
    for (const auto& record : batch.records)
        reference_refs.emplace(
            record.id,
            std::unordered_set<std::string>(record.referenced_works.begin(),
                                            record.referenced_works.end()));

    return make_neighborhood(focal.id, focal.referenced_works, reference_refs,
                             batch.records.size());
}

std::vector<WorkRecord> Client::list_works(const std::string& filter, int limit,
                                           std::optional<int> sample,
                                           std::optional<int> seed) {
    if (limit < 1) throw Error(ErrorKind::usage, "listing limit must be >= 1");
    std::vector<WorkRecord> records;
    int page = 1;
    const int per_page = std::min(config_.per_page, std::max(limit, 1));
    while (static_cast<int>(records.size()) < limit) {
        std::string target = "/works?filter=" + encode_query_value(filter) +
                             "&per-page=" + std::to_string(per_page) +
                             "&page=" + std::to_string(page);
        if (sample) {
            target += "&sample=" + std::to_string(*sample);
            target += "&seed=" + std::to_string(seed.value_or(0));
        }
        nlohmann::json body = get_json(with_mailto(target));
        if (!body.contains("results") || !body["results"].is_array())
            throw Error(ErrorKind::decode, "list response missing results array");
        const auto& results = body["results"];
        if (results.empty()) break;
        for (const auto& payload : results) {
            if (static_cast<int>(records.size()) >= limit) break;
            WorkRecord work = decode_openalex_work(payload);
            cache_->put(work);
            records.push_back(std::move(work));
        }
        if (results.size() < static_cast<std::size_t>(per_page)) break;
        ++page;
    }
    return records;
}

}  // namespace ke::openalex
