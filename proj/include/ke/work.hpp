#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ke {

// The four top-level OpenAlex topic domains, plus Unknown for anything else.
enum class FieldCategory {
    physical_sciences,
    life_sciences,
    health_sciences,
    social_sciences,
    unknown,
};

std::string_view to_string(FieldCategory field);
FieldCategory field_category_from_string(std::string_view text);

// Deterministic map from a primary-topic domain display name to a category;
// total: unmatched or missing domains land in unknown.
FieldCategory field_from_domain(const std::optional<std::string>& domain);

// One scholarly work's metadata plus its outbound reference list, normalized
// from the OpenAlex payload (identifiers stripped to bare forms, reference
// list deduplicated).
struct WorkRecord {
    std::string id;  // bare "W..." identifier
    std::optional<std::string> doi;  // canonical lowercase "10.x/..." form
    std::optional<std::string> title;
    int publication_year = 0;
    std::int64_t cited_by_count = 0;
    std::optional<double> fwci;
    int author_count = 0;
    std::optional<std::string> source;  // primary location source display name
    std::optional<std::string> type;
    std::optional<std::string> primary_domain;
    FieldCategory field_category = FieldCategory::unknown;
    std::vector<std::string> referenced_works;  // bare W-ids, deduplicated

    bool operator==(const WorkRecord&) const = default;
};

FieldCategory classify_field(const WorkRecord& work);

// Raw OpenAlex payload -> WorkRecord. Throws Error(decode) on malformed input.
WorkRecord decode_openalex_work(const nlohmann::json& payload);

// Compact storage form used by the cache file.
nlohmann::ordered_json work_to_json(const WorkRecord& work);
WorkRecord work_from_json(const nlohmann::json& stored);

enum class RefKind { doi, openalex_id };

struct ParsedRef {
    RefKind kind;
    std::string value;  // canonical doi or bare W-id
};

// Accepts bare DOIs, doi:/https://doi.org/ prefixed DOIs, bare W-ids and
// openalex.org URLs. Throws Error(usage) for anything else.
ParsedRef parse_ref(std::string_view raw);

// Helpers shared by the decoder: strip URL prefixes down to bare forms.
std::string strip_openalex_prefix(std::string_view id);
std::string canonical_doi(std::string_view doi);

}  // namespace ke
