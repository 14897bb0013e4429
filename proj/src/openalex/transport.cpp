#include "ke/openalex/transport.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "ke/errors.hpp"
#include "ke/work.hpp"

namespace ke::openalex {

namespace {

std::string url_decode(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '%' && i + 2 < text.size()) {
            auto hex = [](char c) -> int {
                if (c >= '0' && c <= '9') return c - '0';
                if (c >= 'a' && c <= 'f') return c - 'a' + 10;
                if (c >= 'A' && c <= 'F') return c - 'A' + 10;
                return -1;
            };
            const int hi = hex(text[i + 1]), lo = hex(text[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(text[i] == '+' ? ' ' : text[i]);
    }
    return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(text.substr(start));
            break;
        }
        parts.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::unordered_map<std::string, std::string> parse_query(std::string_view query) {
    std::unordered_map<std::string, std::string> params;
    if (query.empty()) return params;
    for (const auto& pair : split(query, '&')) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) continue;
        params[url_decode(std::string_view(pair).substr(0, eq))] =
            url_decode(std::string_view(pair).substr(eq + 1));
    }
    return params;
}

HttpResponse not_found(const std::string& what) {
    nlohmann::json err;
    err["error"] = "404";
    err["message"] = what + " not found";
    return {404, err.dump(), ""};
}

}  // namespace

HttpTransport::HttpTransport(std::string base_url) : base_url_(std::move(base_url)) {}

HttpResponse HttpTransport::get(const std::string& target) {
    // A fresh connection per request keeps the transport trivially
    // thread-safe; the rate limiter dominates latency anyway.
    httplib::Client client(base_url_);
    client.set_connection_timeout(15, 0);
    client.set_read_timeout(60, 0);
    client.set_follow_location(true);
    auto res = client.Get(target);
    if (!res) return {0, "", httplib::to_string(res.error())};
    return {res->status, res->body, ""};
}

HttpResponse OfflineTransport::get(const std::string&) {
    return {0, "", "offline mode: network access disabled"};
}

FixtureTransport::FixtureTransport(const std::filesystem::path& corpus) {
    namespace fs = std::filesystem;
    if (fs::is_directory(corpus)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(corpus)) {
            const auto ext = entry.path().extension();
            if (entry.is_regular_file() && (ext == ".json" || ext == ".jsonl"))
                files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) load_file(file);
    } else if (fs::is_regular_file(corpus)) {
        load_file(corpus);
    } else {
        throw Error(ErrorKind::usage, "fixture corpus not found: " + corpus.string());
    }
}

void FixtureTransport::load_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::usage, "cannot read fixture file: " + file.string());
    nlohmann::json parsed;
    try {
        in >> parsed;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::decode, "fixture file " + file.string() + ": " + e.what());
    }
    const auto add = [this](nlohmann::json work) {
        const std::string id = strip_openalex_prefix(work.value("id", ""));
        if (id.empty()) return;
        const std::size_t idx = works_.size();
        works_.push_back(std::move(work));
        by_id_[id] = idx;
        if (works_.back().contains("doi") && works_.back()["doi"].is_string())
            by_doi_[canonical_doi(works_.back()["doi"].get<std::string>())] = idx;
    };
    if (parsed.is_array())
        for (auto& work : parsed) add(std::move(work));
    else
        add(std::move(parsed));
}

HttpResponse FixtureTransport::lookup_single(const std::string& ref) const {
    std::size_t idx;
    if (ref.starts_with("doi:")) {
        const auto it = by_doi_.find(canonical_doi(ref.substr(4)));
        if (it == by_doi_.end()) return not_found(ref);
        idx = it->second;
    } else {
        const auto it = by_id_.find(strip_openalex_prefix(ref));
        if (it == by_id_.end()) return not_found(ref);
        idx = it->second;
    }
    return {200, works_[idx].dump(), ""};
}

HttpResponse FixtureTransport::list_filtered(const std::string& query) const {
    const auto params = parse_query(query);

    // Each comma-separated clause is key:value; '|' inside a value means OR.
    std::vector<std::pair<std::string, std::vector<std::string>>> clauses;
    if (const auto it = params.find("filter"); it != params.end() && !it->second.empty()) {
        for (const auto& clause : split(it->second, ',')) {
            const auto colon = clause.find(':');
            if (colon == std::string::npos)
                return {400, R"({"error":"bad filter clause"})", ""};
            clauses.emplace_back(clause.substr(0, colon),
                                 split(std::string_view(clause).substr(colon + 1), '|'));
        }
    }

    const auto matches = [&](const nlohmann::json& work) {
        for (const auto& [key, alternatives] : clauses) {
            std::string actual;
            if (key == "openalex_id") {
                actual = strip_openalex_prefix(work.value("id", ""));
            } else if (key == "publication_year") {
                actual = work.contains("publication_year") && work["publication_year"].is_number()
                             ? std::to_string(work["publication_year"].get<long long>())
                             : "";
            } else if (key == "type") {
                actual = work.value("type", "");
            } else if (key == "cited_by_count") {
                actual = work.contains("cited_by_count") && work["cited_by_count"].is_number()
                             ? std::to_string(work["cited_by_count"].get<long long>())
                             : "";
            } else if (key == "primary_location.source.display_name") {
                if (work.contains("primary_location") && work["primary_location"].is_object()) {
                    const auto& loc = work["primary_location"];
                    if (loc.contains("source") && loc["source"].is_object())
                        actual = loc["source"].value("display_name", "");
                }
            } else {
                return false;  // unsupported filter key: match nothing, loudly wrong
            }
            bool any = false;
            for (const auto& alt : alternatives) {
                std::string want = alt;
                if (key == "openalex_id") want = strip_openalex_prefix(want);
                if (want == actual) {
                    any = true;
                    break;
                }
            }
            if (!any) return false;
        }
        return true;
    };

    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < works_.size(); ++i)
        if (matches(works_[i])) hits.push_back(i);

    // Deterministic "sample": the corpus is already in a fixed order, so the
    // first N matched works stand in for the API's random sample.
    if (const auto it = params.find("sample"); it != params.end()) {
        const std::size_t n = static_cast<std::size_t>(std::stoll(it->second));
        if (hits.size() > n) hits.resize(n);
    }

    std::size_t per_page = 25;
    if (const auto it = params.find("per-page"); it != params.end())
        per_page = static_cast<std::size_t>(std::stoll(it->second));
    std::size_t page = 1;
    if (const auto it = params.find("page"); it != params.end())
        page = static_cast<std::size_t>(std::stoll(it->second));

    nlohmann::json body;
    body["meta"] = {{"count", hits.size()}, {"page", page}, {"per_page", per_page}};
    body["results"] = nlohmann::json::array();
    const std::size_t begin = (page - 1) * per_page;
    for (std::size_t i = begin; i < hits.size() && i < begin + per_page; ++i)
        body["results"].push_back(works_[hits[i]]);
    return {200, body.dump(), ""};
}

HttpResponse FixtureTransport::get(const std::string& target) {
    ++request_count_;
    std::string path = target;
    std::string query;
    if (const auto qpos = target.find('?'); qpos != std::string::npos) {
        path = target.substr(0, qpos);
        query = target.substr(qpos + 1);
    }
    if (path == "/works") return list_filtered(query);
    if (path.starts_with("/works/")) return lookup_single(url_decode(path.substr(7)));
    return not_found(path);
}

RateLimiter::RateLimiter(double requests_per_second) {
    if (!(requests_per_second > 0.0))
        throw Error(ErrorKind::usage, "rate limit must be positive");
    interval_ = std::chrono::nanoseconds(
        static_cast<std::int64_t>(1e9 / requests_per_second));
    next_slot_ = std::chrono::steady_clock::now();
}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto now = std::chrono::steady_clock::now();
        if (next_slot_ < now) next_slot_ = now;
        slot = next_slot_;
        next_slot_ += interval_;
    }
    std::this_thread::sleep_until(slot);
}

std::string encode_query_value(std::string_view value) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(value.size());
    for (unsigned char c : value) {
        const bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                          (c >= '0' && c <= '9') ||
                          c == '-' || c == '.' || c == '_' || c == '~' || c == ':' ||
                          c == ',' || c == '|' || c == '/' || c == '+';
        if (safe) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

}  // namespace ke::openalex
