#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace ke::openalex {

struct HttpResponse {
    int status = 0;  // 0 means the request never completed
    std::string body;
    std::string error;  // connection-level failure description
};

// Minimal HTTP GET abstraction so the client can run against the live API,
// a local test server, or a canned fixture corpus.
class Transport {
public:
    virtual ~Transport() = default;
    // target is the path plus query string, e.g. "/works/W123?mailto=x".
    virtual HttpResponse get(const std::string& target) = 0;
};

// Real HTTP(S) transport. base_url like "https://api.openalex.org" or
// "http://127.0.0.1:8080".
class HttpTransport : public Transport {
public:
    explicit HttpTransport(std::string base_url);
    HttpResponse get(const std::string& target) override;

private:
    std::string base_url_;
};

// Refuses every request; backs --offline runs without a fixture corpus so
// only cache hits can succeed.
class OfflineTransport : public Transport {
public:
    HttpResponse get(const std::string& target) override;
};

// Serves the works endpoints from a recorded payload corpus (a JSON array
// of raw OpenAlex work payloads, or a directory of such files). Supports
// GET /works/{id|doi:...} and GET /works?filter=... with the filter keys the
// client issues, so the whole pipeline runs without network access.
class FixtureTransport : public Transport {
public:
    explicit FixtureTransport(const std::filesystem::path& corpus);
    HttpResponse get(const std::string& target) override;

    int request_count() const { return request_count_.load(); }

private:
    std::vector<nlohmann::json> works_;                      // corpus order
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> by_doi_;
    std::atomic<int> request_count_{0};

    void load_file(const std::filesystem::path& file);
    HttpResponse lookup_single(const std::string& ref) const;
    HttpResponse list_filtered(const std::string& query) const;
};

// Wraps another transport and counts requests; used by tests to prove a
// code path stayed off the network.
class CountingTransport : public Transport {
public:
    explicit CountingTransport(std::shared_ptr<Transport> inner)
        : inner_(std::move(inner)) {}
    HttpResponse get(const std::string& target) override {
        ++count_;
        return inner_->get(target);
    }
    int count() const { return count_.load(); }

private:
    std::shared_ptr<Transport> inner_;
    std::atomic<int> count_{0};
};

// Serializes request starts so no more than rps requests per second leave
// the process, across all threads sharing the limiter.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_second);
    void acquire();

private:
    std::mutex mutex_;
    std::chrono::steady_clock::time_point next_slot_;
    std::chrono::nanoseconds interval_;
};

// Percent-encodes characters that cannot appear raw in a query string.
std::string encode_query_value(std::string_view value);

}  // namespace ke::openalex
