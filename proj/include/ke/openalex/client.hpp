#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ke/core.hpp"
#include "ke/openalex/cache.hpp"
#include "ke/openalex/transport.hpp"
#include "ke/work.hpp"

namespace ke::openalex {

struct ClientConfig {
    std::string mailto;              // courtesy identification, sent when set
    double rate_limit_rps = 5.0;     // polite-pool default
    int parallelism = 4;             // concurrent batch chunks
    int max_retries = 4;             // on 429/5xx/connection failure
    std::chrono::milliseconds backoff_base{500};
    int batch_chunk_size = 50;       // API limit on OR-ed filter values
    int per_page = 200;
};

// Work fetcher over any Transport, with write-through caching, chunked
// batch lookup, bounded parallelism, rate limiting, and jittered
// exponential backoff on transient failures.
class Client {
public:
    Client(std::shared_ptr<Transport> transport, std::shared_ptr<WorkCache> cache,
           ClientConfig config = {});

    // ref: DOI or OpenAlex work id in any accepted spelling.
    WorkRecord fetch_work(const std::string& ref);

    struct BatchResult {
        std::vector<WorkRecord> records;   // input order of resolvable ids
        std::vector<std::string> missing;  // input order of dangling ids
    };
    // Resolves W-ids in chunks of batch_chunk_size per request. Dangling
    // ids are reported, not fatal; a whole chunk failing after retries is.
    BatchResult fetch_works_batch(const std::vector<std::string>& ids);

    // Fetches the focal work plus every reference's reference list.
    ReferenceNeighborhood resolve_neighborhood(const std::string& ref);

    // Paged listing for cohort harvesting; filter uses the API's
    // comma-AND / pipe-OR syntax. sample asks the server for a random
    // subset (with seed for reproducibility).
    std::vector<WorkRecord> list_works(const std::string& filter, int limit,
                                       std::optional<int> sample = std::nullopt,
                                       std::optional<int> seed = std::nullopt);

    WorkCache& cache() { return *cache_; }
    int parallelism() const { return config_.parallelism; }

private:
    std::shared_ptr<Transport> transport_;
    std::shared_ptr<WorkCache> cache_;
    ClientConfig config_;
    RateLimiter limiter_;

    HttpResponse get_with_retry(const std::string& target);
    nlohmann::json get_json(const std::string& target);  // throws on !2xx
    std::string with_mailto(std::string target) const;
};

}  // namespace ke::openalex
