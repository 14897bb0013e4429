#include "ke/work.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "ke/errors.hpp"

namespace ke {

namespace {

bool starts_with_ci(std::string_view text, std::string_view prefix) {
    if (text.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(text[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    return true;
}

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool looks_like_doi(std::string_view text) {
    // 10.<registrant>/<suffix>, registrant all digits, nonempty suffix.
    if (!text.starts_with("10.")) return false;
    const auto slash = text.find('/');
    if (slash == std::string_view::npos || slash + 1 >= text.size()) return false;
    const auto registrant = text.substr(3, slash - 3);
    if (registrant.empty()) return false;
    return std::all_of(registrant.begin(), registrant.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool looks_like_work_id(std::string_view text) {
    if (text.size() < 2 || (text[0] != 'W' && text[0] != 'w')) return false;
    return std::all_of(text.begin() + 1, text.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

std::string_view to_string(FieldCategory field) {
    switch (field) {
        case FieldCategory::physical_sciences: return "PhysicalSciences";
        case FieldCategory::life_sciences: return "LifeSciences";
        case FieldCategory::health_sciences: return "HealthSciences";
        case FieldCategory::social_sciences: return "SocialSciences";
        case FieldCategory::unknown: return "Unknown";
    }
    return "Unknown";
}

FieldCategory field_category_from_string(std::string_view text) {
    if (text == "PhysicalSciences") return FieldCategory::physical_sciences;
    if (text == "LifeSciences") return FieldCategory::life_sciences;
    if (text == "HealthSciences") return FieldCategory::health_sciences;
    if (text == "SocialSciences") return FieldCategory::social_sciences;
    return FieldCategory::unknown;
}

FieldCategory field_from_domain(const std::optional<std::string>& domain) {
    if (!domain) return FieldCategory::unknown;
    if (*domain == "Physical Sciences") return FieldCategory::physical_sciences;
    if (*domain == "Life Sciences") return FieldCategory::life_sciences;
    if (*domain == "Health Sciences") return FieldCategory::health_sciences;
    if (*domain == "Social Sciences") return FieldCategory::social_sciences;
    return FieldCategory::unknown;
}

FieldCategory classify_field(const WorkRecord& work) {
    return field_from_domain(work.primary_domain);
}

std::string strip_openalex_prefix(std::string_view id) {
    for (std::string_view prefix :
         {"https://openalex.org/", "http://openalex.org/", "openalex.org/"}) {
        if (starts_with_ci(id, prefix)) return std::string(id.substr(prefix.size()));
    }
    return std::string(id);
}

std::string canonical_doi(std::string_view doi) {
    for (std::string_view prefix :
         {"https://doi.org/", "http://doi.org/", "doi.org/", "doi:"}) {
        if (starts_with_ci(doi, prefix)) {
            doi = doi.substr(prefix.size());
            break;
        }
    }
    return lowercase(doi);
}

ParsedRef parse_ref(std::string_view raw) {
    // Trim surrounding whitespace.
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
    while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
    if (raw.empty()) throw Error(ErrorKind::usage, "empty work reference");

    const std::string id_form = strip_openalex_prefix(raw);
    if (looks_like_work_id(id_form)) {
        std::string bare = id_form;
        bare[0] = 'W';
        return {RefKind::openalex_id, std::move(bare)};
    }
    const std::string doi_form = canonical_doi(raw);
    if (looks_like_doi(doi_form)) return {RefKind::doi, doi_form};
    throw Error(ErrorKind::usage,
                "not a DOI or OpenAlex work id: '" + std::string(raw) + "'");
}

WorkRecord decode_openalex_work(const nlohmann::json& payload) {
    if (!payload.is_object())
        throw Error(ErrorKind::decode, "work payload is not a JSON object");
    WorkRecord work;
    try {
        if (!payload.contains("id") || !payload["id"].is_string())
            throw Error(ErrorKind::decode, "work payload missing string 'id'");
        work.id = strip_openalex_prefix(payload["id"].get<std::string>());
        if (work.id.empty() || work.id[0] != 'W')
            throw Error(ErrorKind::decode, "work id is not W-prefixed: '" + work.id + "'");

        if (payload.contains("doi") && payload["doi"].is_string())
            work.doi = canonical_doi(payload["doi"].get<std::string>());
        if (payload.contains("title") && payload["title"].is_string())
            work.title = payload["title"].get<std::string>();
        if (payload.contains("publication_year") && payload["publication_year"].is_number())
            work.publication_year = payload["publication_year"].get<int>();
        if (payload.contains("cited_by_count") && payload["cited_by_count"].is_number())
            work.cited_by_count = payload["cited_by_count"].get<std::int64_t>();
        if (work.cited_by_count < 0)
            throw Error(ErrorKind::decode, "negative cited_by_count");
        if (payload.contains("fwci") && payload["fwci"].is_number())
            work.fwci = payload["fwci"].get<double>();
        if (work.fwci && *work.fwci < 0.0)
            throw Error(ErrorKind::decode, "negative fwci");
        if (payload.contains("authorships") && payload["authorships"].is_array())
            work.author_count = static_cast<int>(payload["authorships"].size());
        if (payload.contains("type") && payload["type"].is_string())
            work.type = payload["type"].get<std::string>();

        if (auto loc = payload.find("primary_location"); loc != payload.end() && loc->is_object()) {
            if (auto src = loc->find("source"); src != loc->end() && src->is_object()) {
                if (auto name = src->find("display_name");
                    name != src->end() && name->is_string())
                    work.source = name->get<std::string>();
            }
        }
        if (auto topic = payload.find("primary_topic"); topic != payload.end() && topic->is_object()) {
            if (auto dom = topic->find("domain"); dom != topic->end() && dom->is_object()) {
                if (auto name = dom->find("display_name");
                    name != dom->end() && name->is_string())
                    work.primary_domain = name->get<std::string>();
            }
        }
        work.field_category = field_from_domain(work.primary_domain);

        if (payload.contains("referenced_works") && payload["referenced_works"].is_array()) {
            std::unordered_set<std::string> seen;
            for (const auto& entry : payload["referenced_works"]) {
                if (!entry.is_string()) continue;
                std::string bare = strip_openalex_prefix(entry.get<std::string>());
                if (bare.empty() || bare[0] != 'W') continue;
                if (seen.insert(bare).second) work.referenced_works.push_back(std::move(bare));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::decode, std::string("malformed work payload: ") + e.what());
    }
    return work;
}

nlohmann::ordered_json work_to_json(const WorkRecord& work) {
    nlohmann::ordered_json j;
    j["id"] = work.id;
    if (work.doi) j["doi"] = *work.doi;
    if (work.title) j["title"] = *work.title;
    j["publication_year"] = work.publication_year;
    j["cited_by_count"] = work.cited_by_count;
    if (work.fwci) j["fwci"] = *work.fwci;
    j["author_count"] = work.author_count;
    if (work.source) j["source"] = *work.source;
    if (work.type) j["type"] = *work.type;
    if (work.primary_domain) j["primary_domain"] = *work.primary_domain;
    j["field_category"] = std::string(to_string(work.field_category));
    j["referenced_works"] = work.referenced_works;
    return j;
}

WorkRecord work_from_json(const nlohmann::json& stored) {
    WorkRecord work;
    try {
        work.id = stored.at("id").get<std::string>();
        if (stored.contains("doi")) work.doi = stored["doi"].get<std::string>();
        if (stored.contains("title")) work.title = stored["title"].get<std::string>();
        work.publication_year = stored.value("publication_year", 0);
        work.cited_by_count = stored.value("cited_by_count", std::int64_t{0});
        if (stored.contains("fwci")) work.fwci = stored["fwci"].get<double>();
        work.author_count = stored.value("author_count", 0);
        if (stored.contains("source")) work.source = stored["source"].get<std::string>();
        if (stored.contains("type")) work.type = stored["type"].get<std::string>();
        if (stored.contains("primary_domain"))
            work.primary_domain = stored["primary_domain"].get<std::string>();
        work.field_category =
            field_category_from_string(stored.value("field_category", "Unknown"));
        if (stored.contains("referenced_works"))
            work.referenced_works = stored["referenced_works"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::decode, std::string("malformed cache record: ") + e.what());
    }
    return work;
}

}  // namespace ke
