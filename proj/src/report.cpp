#include "ke/report.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "ke/csv.hpp"
#include "ke/errors.hpp"
#include "ke/stats/diversity.hpp"
#include "ke/stats/regression.hpp"
#include "ke/stats/tests.hpp"

namespace ke::report {

namespace {

constexpr const char* kUngrouped = "(none)";
constexpr const char* kAllRows = "(all)";

nlohmann::ordered_json row_to_json(const ResultRow& row) {
    nlohmann::ordered_json j;
    j["id"] = row.id;
    j["doi"] = row.doi;
    j["year"] = row.year;
    j["field"] = row.field;
    j["group"] = row.group;
    j["n_refs"] = row.n_refs;
    j["internal_links"] = row.internal_links;
    j["ke"] = row.ke;
    j["coverage"] = row.coverage;
    j["cited_by_count"] = row.cited_by_count;
    if (row.fwci)
        j["fwci"] = *row.fwci;
    else
        j["fwci"] = nullptr;
    j["author_count"] = row.author_count;
    return j;
}

ResultRow row_from_json(const nlohmann::json& j) {
    for (const auto& column : kResultColumns)
        if (!j.contains(column))
            throw Error(ErrorKind::schema, "results row missing column: " + column);
    ResultRow row;
    try {
        row.id = j["id"].get<std::string>();
        row.doi = j["doi"].is_null() ? "" : j["doi"].get<std::string>();
        row.year = j["year"].get<int>();
        row.field = j["field"].get<std::string>();
        row.group = j["group"].is_null() ? "" : j["group"].get<std::string>();
        row.n_refs = j["n_refs"].get<std::int64_t>();
        row.internal_links = j["internal_links"].get<std::int64_t>();
        row.ke = j["ke"].get<double>();
        row.coverage = j["coverage"].get<double>();
        row.cited_by_count = j["cited_by_count"].get<std::int64_t>();
        if (!j["fwci"].is_null()) row.fwci = j["fwci"].get<double>();
        row.author_count = j["author_count"].get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::schema, std::string("bad results row: ") + e.what());
    }
    return row;
}

std::vector<std::string> row_to_fields(const ResultRow& row) {
    return {row.id,
            row.doi,
            std::to_string(row.year),
            row.field,
            row.group,
            std::to_string(row.n_refs),
            std::to_string(row.internal_links),
            csv::format_double(row.ke),
            csv::format_double(row.coverage),
            std::to_string(row.cited_by_count),
            row.fwci ? csv::format_double(*row.fwci) : "",
            std::to_string(row.author_count)};
}

}  // namespace

const std::vector<std::string> kResultColumns = {
    "id",       "doi",            "year", "field",    "group",
    "n_refs",   "internal_links", "ke",   "coverage", "cited_by_count",
    "fwci",     "author_count"};

std::optional<OutputFormat> format_from_string(std::string_view text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    return std::nullopt;
}

ResultRow make_result_row(const WorkRecord& work, const KEResult& ke,
                          const std::string& group) {
    ResultRow row;
    row.id = work.id;
    row.doi = work.doi.value_or("");
    row.year = work.publication_year;
    row.field = std::string(to_string(work.field_category));
    row.group = group;
    row.n_refs = ke.n_refs;
    row.internal_links = ke.internal_links;
    row.ke = ke.ke;
    row.coverage = ke.coverage;
    row.cited_by_count = work.cited_by_count;
    row.fwci = work.fwci;
    row.author_count = work.author_count;
    return row;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows,
                   OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::ordered_json array = nlohmann::ordered_json::array();
        for (const auto& row : rows) array.push_back(row_to_json(row));
        out << array.dump(2) << '\n';
        return;
    }
    out << csv::join_row(kResultColumns) << '\n';
    for (const auto& row : rows) out << csv::join_row(row_to_fields(row)) << '\n';
}

std::vector<ResultRow> read_results(std::istream& in) {
    // Sniff the format from the first non-whitespace character.
    int c = in.peek();
    while (c != std::istream::traits_type::eof() &&
           std::isspace(static_cast<unsigned char>(c))) {
        in.get();
        c = in.peek();
    }
    if (c == '[' || c == '{') {
        nlohmann::json parsed;
        try {
            in >> parsed;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::schema, std::string("bad results JSON: ") + e.what());
        }
        if (!parsed.is_array())
            throw Error(ErrorKind::schema, "results JSON must be an array of rows");
        std::vector<ResultRow> rows;
        for (const auto& item : parsed) rows.push_back(row_from_json(item));
        return rows;
    }

    std::vector<std::string> header;
    if (!csv::read_record(in, header))
        throw Error(ErrorKind::schema, "results file is empty");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
    for (const auto& column : kResultColumns)
        if (!index.count(column))
            throw Error(ErrorKind::schema, "results file missing column: " + column);

    std::vector<ResultRow> rows;
    std::vector<std::string> fields;
    while (csv::read_record(in, fields)) {
        if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
        if (!fields[0].empty() && fields[0][0] == '#') continue;
        if (fields.size() < header.size())
            throw Error(ErrorKind::schema, "results row has too few fields");
        const auto get = [&](const char* name) -> const std::string& {
            return fields[index.at(name)];
        };
        ResultRow row;
        row.id = get("id");
        row.doi = get("doi");
        row.year = static_cast<int>(csv::parse_int(get("year")));
        row.field = get("field");
        row.group = get("group");
        row.n_refs = csv::parse_int(get("n_refs"));
        row.internal_links = csv::parse_int(get("internal_links"));
        row.ke = csv::parse_double(get("ke"));
        row.coverage = csv::parse_double(get("coverage"));
        row.cited_by_count = csv::parse_int(get("cited_by_count"));
        if (!get("fwci").empty()) row.fwci = csv::parse_double(get("fwci"));
        row.author_count = csv::parse_int(get("author_count"));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_exclusions(std::ostream& out, const std::vector<cohort::Exclusion>& exclusions,
                      OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::ordered_json array = nlohmann::ordered_json::array();
        for (const auto& e : exclusions) {
            nlohmann::ordered_json j;
            j["id"] = e.id;
            j["context"] = e.context;
            j["reason"] = e.reason;
            j["detail"] = e.detail;
            array.push_back(std::move(j));
        }
        out << array.dump(2) << '\n';
        return;
    }
    out << "id,context,reason,detail\n";
    for (const auto& e : exclusions)
        out << csv::join_row({e.id, e.context, e.reason, e.detail}) << '\n';
}

std::string format_cell(const Cell& cell) {
    return std::visit(
        [](const auto& value) -> std::string {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, std::monostate>) return "";
            else if constexpr (std::is_same_v<T, bool>) return csv::format_bool(value);
            else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(value);
            else if constexpr (std::is_same_v<T, double>) return csv::format_double(value);
            else return value;
        },
        cell);
}

Cell parse_cell(const std::string& text) {
    if (text.empty()) return std::monostate{};
    if (text == "true") return true;
    if (text == "false") return false;
    try {
        if (text.find_first_not_of("-0123456789") == std::string::npos)
            return csv::parse_int(text);
    } catch (const Error&) {
    }
    try {
        return csv::parse_double(text);
    } catch (const Error&) {
    }
    return text;
}

const Table& AnalysisReport::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw Error(ErrorKind::schema, "report has no table named '" + name + "'");
}

bool AnalysisReport::has_table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return true;
    return false;
}

namespace {

// ---------------------------------------------------------------------------
// analyze() internals

struct Grouped {
    std::vector<std::string> labels;  // lexicographic
    std::map<std::string, std::vector<const ResultRow*>> rows;
};

const std::string& group_key(const ResultRow& row, const std::string& group_by) {
    return group_by == "field" ? row.field : row.group;
}

Grouped group_rows(const std::vector<ResultRow>& rows, const std::string& group_by) {
    Grouped grouped;
    for (const auto& row : rows) {
        std::string label = group_key(row, group_by);
        if (label.empty()) label = kUngrouped;
        grouped.rows[label].push_back(&row);
    }
    for (const auto& [label, members] : grouped.rows) grouped.labels.push_back(label);
    return grouped;
}

std::vector<double> ke_values(const std::vector<const ResultRow*>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto* row : rows) out.push_back(row->ke);
    return out;
}

class ReportBuilder {
public:
    ReportBuilder(const std::vector<ResultRow>& rows, const AnalyzeOptions& options)
        : rows_(rows), options_(options), grouped_(group_rows(rows, options.group_by)) {}

    AnalysisReport build() {
        note("group_by", options_.group_by);
        note("alpha", options_.alpha);
        if (wants("summary")) summary();
        if (wants("diversity")) diversity();
        if (wants("pairwise")) pairwise_tests();
        if (wants("variance")) variance_tests();
        if (wants("correlations")) correlations();
        if (wants("bins")) bin_summaries();
        if (wants("ols")) ols_models();
        if (wants("threshold")) threshold_shares();
        if (wants("histogram")) histogram();
        finish_notes();
        return std::move(report_);
    }

private:
    const std::vector<ResultRow>& rows_;
    const AnalyzeOptions& options_;
    Grouped grouped_;
    AnalysisReport report_;
    Table notes_{"notes", {"key", "value"}, {}};

    bool wants(const std::string& section) const {
        return options_.sections.empty() || options_.sections.count(section) > 0;
    }

    void note(const std::string& key, Cell value) {
        notes_.rows.push_back({Cell{key}, std::move(value)});
    }

    Table& add_table(std::string name, std::vector<std::string> columns) {
        report_.tables.push_back({std::move(name), std::move(columns), {}});
        return report_.tables.back();
    }

    void finish_notes() { report_.tables.push_back(std::move(notes_)); }

    void summary() {
        Table& t = add_table("summary", {"group", "n", "mean", "sd", "median", "p25", "p75"});
        const auto emit = [&](const std::string& label, const std::vector<double>& ke) {
            std::vector<Cell> row{Cell{label}, Cell{static_cast<std::int64_t>(ke.size())}};
            if (ke.empty()) {
                row.insert(row.end(), 5, Cell{});
            } else {
                row.push_back(Cell{stats::mean(ke)});
                row.push_back(ke.size() >= 2 ? Cell{std::sqrt(stats::sample_variance(ke))}
                                             : Cell{});
                row.push_back(Cell{stats::median(ke)});
                row.push_back(Cell{stats::quantile_type7(ke, 0.25)});
                row.push_back(Cell{stats::quantile_type7(ke, 0.75)});
            }
            t.rows.push_back(std::move(row));
        };
        for (const auto& label : grouped_.labels) emit(label, ke_values(grouped_.rows[label]));
        std::vector<double> all;
        for (const auto& row : rows_) all.push_back(row.ke);
        emit(kAllRows, all);
    }

    void diversity() {
        // Composition of each group over the complementary categorical
        // column (field, unless the grouping itself is by field).
        const std::string composition_column = options_.group_by == "field" ? "group" : "field";
        Table& t = add_table("diversity", {"group", "n", "categories", "shannon", "simpson",
                                           "gini_simpson"});
        for (const auto& label : grouped_.labels) {
            std::map<std::string, std::int64_t> composition;
            for (const auto* row : grouped_.rows[label]) {
                std::string key = composition_column == "field" ? row->field : row->group;
                if (key.empty()) key = kUngrouped;
                ++composition[key];
            }
            std::vector<std::int64_t> counts;
            for (const auto& [key, count] : composition) counts.push_back(count);
            try {
                const auto rep = stats::diversity_report(counts);
                t.rows.push_back({Cell{label}, Cell{rep.sample_size},
                                  Cell{static_cast<std::int64_t>(rep.category_count)},
                                  Cell{rep.shannon}, Cell{rep.simpson},
                                  Cell{rep.gini_simpson}});
            } catch (const Error& e) {
                note("diversity_skipped_" + label, std::string(e.what()));
            }
        }
    }

    void pairwise_tests() {
        Table& t = add_table("pairwise",
                             {"group_a", "group_b", "test", "statistic", "df", "p_value"});
        const std::string variant = options_.pooled_t ? "pooled" : "welch";
        for (std::size_t i = 0; i < grouped_.labels.size(); ++i) {
            for (std::size_t j = i + 1; j < grouped_.labels.size(); ++j) {
                const auto& a = grouped_.labels[i];
                const auto& b = grouped_.labels[j];
                try {
                    const auto res = options_.pooled_t
                                         ? stats::pooled_t_test(ke_values(grouped_.rows[a]),
                                                                ke_values(grouped_.rows[b]))
                                         : stats::welch_t_test(ke_values(grouped_.rows[a]),
                                                               ke_values(grouped_.rows[b]));
                    t.rows.push_back({Cell{a}, Cell{b}, Cell{variant}, Cell{res.statistic},
                                      Cell{res.df1}, Cell{res.p_value}});
                } catch (const Error& e) {
                    note("pairwise_skipped_" + a + "_vs_" + b, std::string(e.what()));
                }
            }
        }
    }

    void variance_tests() {
        std::vector<std::vector<double>> groups;
        std::vector<std::pair<std::string, std::vector<double>>> labeled;
        for (const auto& label : grouped_.labels) {
            groups.push_back(ke_values(grouped_.rows[label]));
            labeled.emplace_back(label, groups.back());
        }
        Table& levene = add_table("levene", {"statistic", "df1", "df2", "p_value"});
        try {
            const auto res = stats::levene_test(groups);
            levene.rows.push_back(
                {Cell{res.statistic}, Cell{res.df1}, Cell{res.df2.value_or(0.0)},
                 Cell{res.p_value}});
        } catch (const Error& e) {
            note("levene_skipped", std::string(e.what()));
        }
        Table& anova = add_table("anova", {"statistic", "df1", "df2", "p_value"});
        try {
            const auto res = stats::one_way_anova(groups);
            anova.rows.push_back(
                {Cell{res.statistic}, Cell{res.df1}, Cell{res.df2.value_or(0.0)},
                 Cell{res.p_value}});
        } catch (const Error& e) {
            note("anova_skipped", std::string(e.what()));
        }
        Table& tukey = add_table("tukey", {"group_a", "group_b", "mean_diff", "p_adj",
                                           "ci_lower", "ci_upper", "reject"});
        try {
            const auto table = stats::tukey_hsd(labeled, options_.alpha);
            for (const auto& row : table.rows)
                tukey.rows.push_back({Cell{row.group_a}, Cell{row.group_b},
                                      Cell{row.mean_diff}, Cell{row.p_adj}, Cell{row.ci_lower},
                                      Cell{row.ci_upper}, Cell{row.reject}});
            note("tukey_q_critical", table.q_critical);
        } catch (const Error& e) {
            note("tukey_skipped", std::string(e.what()));
        }
    }

    void correlations() {
        Table& t = add_table("correlations", {"variable", "n", "r", "df", "p_value"});
        const auto emit = [&](const std::string& name, const std::vector<double>& x,
                              const std::vector<double>& y) {
            try {
                const auto res = stats::pearson_r(x, y);
                t.rows.push_back({Cell{name}, Cell{static_cast<std::int64_t>(x.size())},
                                  Cell{res.statistic}, Cell{res.df1}, Cell{res.p_value}});
            } catch (const Error& e) {
                note("correlation_skipped_" + name, std::string(e.what()));
            }
        };

        std::vector<double> team_x, team_y;
        std::int64_t no_authors = 0;
        for (const auto& row : rows_) {
            if (row.author_count < 1) {
                ++no_authors;
                continue;
            }
            team_x.push_back(static_cast<double>(row.author_count));
            team_y.push_back(row.ke);
        }
        emit("team_size", team_x, team_y);
        note("correlation_team_size_excluded_no_authors", no_authors);

        std::vector<double> ref_x, ref_y;
        for (const auto& row : rows_) {
            ref_x.push_back(static_cast<double>(row.n_refs));
            ref_y.push_back(row.ke);
        }
        emit("reference_count", ref_x, ref_y);

        std::vector<double> fwci_x, fwci_y;
        std::int64_t missing_fwci = 0;
        for (const auto& row : rows_) {
            if (!row.fwci) {
                ++missing_fwci;
                continue;
            }
            fwci_x.push_back(*row.fwci);
            fwci_y.push_back(row.ke);
        }
        emit("fwci", fwci_x, fwci_y);
        note("correlation_fwci_excluded_missing", missing_fwci);
    }

    void bin_summaries() {
        Table& t = add_table("bins", {"variable", "bin", "n", "mean_ke", "median_ke"});
        const auto emit = [&](const std::string& variable,
                              const std::vector<std::string>& bin_labels,
                              const std::vector<double>& ke) {
            std::map<std::string, std::vector<double>> by_bin;
            for (std::size_t i = 0; i < bin_labels.size(); ++i)
                by_bin[bin_labels[i]].push_back(ke[i]);
            // Fixed label order rather than lexicographic.
            const std::vector<std::string> order = {"Q1",  "Q2",      "Q3",      "Q4",
                                                    "Zero", "Low",    "MidLow",  "MidHigh",
                                                    "High"};
            for (const auto& bin : order) {
                const auto it = by_bin.find(bin);
                if (it == by_bin.end()) continue;
                t.rows.push_back({Cell{variable}, Cell{bin},
                                  Cell{static_cast<std::int64_t>(it->second.size())},
                                  Cell{stats::mean(it->second)},
                                  Cell{stats::median(it->second)}});
            }
        };

        {
            std::vector<double> values, ke;
            for (const auto& row : rows_) {
                if (row.author_count < 1) continue;
                values.push_back(static_cast<double>(row.author_count));
                ke.push_back(row.ke);
            }
            if (values.size() >= 4) {
                const auto bins = cohort::quartile_bins(values);
                std::vector<std::string> labels;
                for (auto b : bins) labels.emplace_back(cohort::to_string(b));
                emit("team_size", labels, ke);
            } else {
                note("bins_skipped_team_size", std::string("needs at least 4 values"));
            }
        }
        {
            std::vector<double> values, ke;
            for (const auto& row : rows_) {
                values.push_back(static_cast<double>(row.n_refs));
                ke.push_back(row.ke);
            }
            if (values.size() >= 4) {
                const auto bins = cohort::quartile_bins(values);
                std::vector<std::string> labels;
                for (auto b : bins) labels.emplace_back(cohort::to_string(b));
                emit("reference_count", labels, ke);
            } else {
                note("bins_skipped_reference_count", std::string("needs at least 4 values"));
            }
        }
        {
            std::vector<std::optional<double>> values;
            std::vector<double> ke;
            for (const auto& row : rows_) {
                values.push_back(row.fwci);
                ke.push_back(row.ke);
            }
            const auto bins = cohort::fwci_bins(values);
            std::vector<std::string> labels;
            std::vector<double> kept_ke;
            for (std::size_t i = 0; i < bins.size(); ++i) {
                if (!bins[i]) continue;
                labels.emplace_back(cohort::to_string(*bins[i]));
                kept_ke.push_back(ke[i]);
            }
            if (!labels.empty()) emit("fwci", labels, kept_ke);
        }
    }

    void ols_models() {
        // Complete cases for the full model keep the four nested fits
        // comparable on one sample.
        std::vector<const ResultRow*> usable;
        std::int64_t missing_fwci = 0, no_authors = 0;
        for (const auto& row : rows_) {
            if (!row.fwci) {
                ++missing_fwci;
                continue;
            }
            if (row.author_count < 1) {
                ++no_authors;
                continue;
            }
            usable.push_back(&row);
        }
        note("ols_rows_total", static_cast<std::int64_t>(rows_.size()));
        note("ols_excluded_missing_fwci", missing_fwci);
        note("ols_excluded_no_authors", no_authors);
        note("ols_n", static_cast<std::int64_t>(usable.size()));

        // Built locally and pushed at the end: add_table references would
        // dangle once the second table lands in the vector.
        Table coef{"ols", {"model", "term", "role", "beta", "std_err", "p_value", "vif"}, {}};
        Table fit{"ols_summary", {"model", "n", "r_squared", "adj_r_squared"}, {}};
        if (usable.size() < 8) {
            note("ols_skipped", std::string("too few complete rows"));
            report_.tables.push_back(std::move(coef));
            report_.tables.push_back(std::move(fit));
            return;
        }

        const std::size_t n = usable.size();
        std::vector<double> outcome;
        outcome.reserve(n);
        for (const auto* row : usable) outcome.push_back(row->ke);

        // Focal predictors in the cumulative order of the nested models.
        const std::vector<std::pair<std::string, std::vector<double>>> focal_defs = [&] {
            std::vector<std::pair<std::string, std::vector<double>>> defs(4);
            defs[0].first = "cited_by_count";
            defs[1].first = "reference_count";
            defs[2].first = "fwci";
            defs[3].first = "team_size";
            for (const auto* row : usable) {
                defs[0].second.push_back(static_cast<double>(row->cited_by_count));
                defs[1].second.push_back(static_cast<double>(row->n_refs));
                defs[2].second.push_back(*row->fwci);
                defs[3].second.push_back(static_cast<double>(row->author_count));
            }
            return defs;
        }();

        // Indicator controls for year and field; reference levels are the
        // earliest present year and PhysicalSciences (first present field
        // otherwise). Levels constant across every row carry no information
        // and are skipped.
        std::vector<stats::Column> controls;
        {
            std::set<int> years;
            for (const auto* row : usable) years.insert(row->year);
            const int reference_year = *years.begin();
            note("ols_reference_year", static_cast<std::int64_t>(reference_year));
            for (const int year : years) {
                if (year == reference_year) continue;
                stats::Column column{"year_" + std::to_string(year), {}};
                for (const auto* row : usable)
                    column.values.push_back(row->year == year ? 1.0 : 0.0);
                controls.push_back(std::move(column));
            }

            std::set<std::string> fields;
            for (const auto* row : usable) fields.insert(row->field);
            std::string reference_field = std::string(to_string(FieldCategory::physical_sciences));
            if (!fields.count(reference_field)) reference_field = *fields.begin();
            note("ols_reference_field", reference_field);
            for (const auto& field : fields) {
                if (field == reference_field) continue;
                stats::Column column{"field_" + field, {}};
                for (const auto* row : usable)
                    column.values.push_back(row->field == field ? 1.0 : 0.0);
                controls.push_back(std::move(column));
            }
        }

        for (int model = 1; model <= 4; ++model) {
            std::vector<stats::Column> predictors;
            for (int j = 0; j < model; ++j)
                predictors.push_back({focal_defs[j].first, focal_defs[j].second});
            for (const auto& control : controls) predictors.push_back(control);
            try {
                const auto res = stats::ols_fit(predictors, outcome, true);
                const auto vif_of = [&](const std::string& name) -> Cell {
                    for (const auto& [vname, value] : res.vif)
                        if (vname == name) return Cell{value};
                    return Cell{};
                };
                coef.rows.push_back({Cell{static_cast<std::int64_t>(model)},
                                     Cell{std::string("intercept")}, Cell{std::string("intercept")},
                                     Cell{res.intercept.beta}, Cell{res.intercept.std_err},
                                     Cell{res.intercept.p_value}, Cell{}});
                for (std::size_t j = 0; j < res.coefficients.size(); ++j) {
                    const auto& c = res.coefficients[j];
                    const bool focal = j < static_cast<std::size_t>(model);
                    coef.rows.push_back({Cell{static_cast<std::int64_t>(model)}, Cell{c.name},
                                         Cell{std::string(focal ? "focal" : "control")},
                                         Cell{c.beta}, Cell{c.std_err}, Cell{c.p_value},
                                         vif_of(c.name)});
                }
                fit.rows.push_back({Cell{static_cast<std::int64_t>(model)}, Cell{res.n},
                                    Cell{res.r_squared}, Cell{res.adj_r_squared}});
            } catch (const Error& e) {
                note("ols_model_" + std::to_string(model) + "_skipped",
                     std::string(e.what()));
            }
        }
        report_.tables.push_back(std::move(coef));
        report_.tables.push_back(std::move(fit));
    }

    void threshold_shares() {
        std::vector<double> all;
        for (const auto& row : rows_) all.push_back(row.ke);
        double threshold = 0.0;
        if (options_.threshold) {
            threshold = *options_.threshold;
            note("threshold_source", std::string("explicit"));
        } else if (!all.empty()) {
            threshold = stats::mean(all);
            note("threshold_source", std::string("pooled_mean"));
        }
        note("threshold_value", threshold);

        Table& t = add_table("threshold", {"group", "threshold", "n", "share_ge_threshold"});
        const auto emit = [&](const std::string& label, const std::vector<double>& ke) {
            if (ke.empty()) return;
            t.rows.push_back({Cell{label}, Cell{threshold},
                              Cell{static_cast<std::int64_t>(ke.size())},
                              Cell{stats::threshold_share(ke, threshold)}});
        };
        for (const auto& label : grouped_.labels) emit(label, ke_values(grouped_.rows[label]));
        emit(kAllRows, all);
    }

    void histogram() {
        const int bins = options_.histogram_bins;
        Table& t = add_table("histogram", {"group", "kind", "bin", "lo", "hi", "count"});
        const auto emit = [&](const std::string& label,
                              const std::vector<const ResultRow*>& rows) {
            std::int64_t exact_zero = 0, exact_one = 0;
            std::vector<std::int64_t> interior(static_cast<std::size_t>(bins), 0);
            for (const auto* row : rows) {
                if (row->ke == 0.0) {
                    ++exact_zero;
                } else if (row->ke == 1.0) {
                    ++exact_one;
                } else {
                    int idx = static_cast<int>(row->ke * bins);
                    idx = std::clamp(idx, 0, bins - 1);
                    ++interior[static_cast<std::size_t>(idx)];
                }
            }
            t.rows.push_back({Cell{label}, Cell{std::string("exact_zero")}, Cell{}, Cell{},
                              Cell{}, Cell{exact_zero}});
            for (int b = 0; b < bins; ++b)
                t.rows.push_back({Cell{label}, Cell{std::string("interior")},
                                  Cell{static_cast<std::int64_t>(b)},
                                  Cell{static_cast<double>(b) / bins},
                                  Cell{static_cast<double>(b + 1) / bins},
                                  Cell{interior[static_cast<std::size_t>(b)]}});
            t.rows.push_back({Cell{label}, Cell{std::string("exact_one")}, Cell{}, Cell{},
                              Cell{}, Cell{exact_one}});
        };
        for (const auto& label : grouped_.labels) emit(label, grouped_.rows[label]);
        std::vector<const ResultRow*> all;
        for (const auto& row : rows_) all.push_back(&row);
        emit(kAllRows, all);
    }
};

}  // namespace

AnalysisReport analyze(const std::vector<ResultRow>& rows, const AnalyzeOptions& options) {
    if (options.group_by != "group" && options.group_by != "field")
        throw Error(ErrorKind::usage, "group_by must be 'group' or 'field'");
    if (options.histogram_bins < 1)
        throw Error(ErrorKind::usage, "histogram needs at least 1 bin");
    if (!(options.alpha > 0.0 && options.alpha < 1.0))
        throw Error(ErrorKind::usage, "alpha must lie in (0, 1)");
    static const std::set<std::string> known_sections = {
        "summary", "diversity", "pairwise", "variance",  "correlations",
        "bins",    "ols",       "threshold", "histogram"};
    for (const auto& section : options.sections)
        if (!known_sections.count(section))
            throw Error(ErrorKind::usage, "unknown analysis section: '" + section + "'");
    if (rows.empty()) throw Error(ErrorKind::schema, "no rows to analyze");
    return ReportBuilder(rows, options).build();
}

void write_report(std::ostream& out, const AnalysisReport& report, OutputFormat format) {
    if (format == OutputFormat::json) {
        nlohmann::ordered_json j;
        for (const auto& table : report.tables) {
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (const auto& row : table.rows) {
                nlohmann::ordered_json obj;
                for (std::size_t i = 0; i < table.columns.size() && i < row.size(); ++i) {
                    const auto& cell = row[i];
                    if (std::holds_alternative<std::monostate>(cell))
                        obj[table.columns[i]] = nullptr;
                    else if (std::holds_alternative<bool>(cell))
                        obj[table.columns[i]] = std::get<bool>(cell);
                    else if (std::holds_alternative<std::int64_t>(cell))
                        obj[table.columns[i]] = std::get<std::int64_t>(cell);
                    else if (std::holds_alternative<double>(cell))
                        obj[table.columns[i]] = std::get<double>(cell);
                    else
                        obj[table.columns[i]] = std::get<std::string>(cell);
                }
                rows.push_back(std::move(obj));
            }
            j[table.name] = std::move(rows);
        }
        out << j.dump(2) << '\n';
        return;
    }
    bool first = true;
    for (const auto& table : report.tables) {
        if (!first) out << '\n';
        first = false;
        out << "# table: " << table.name << '\n';
        out << csv::join_row(table.columns) << '\n';
        for (const auto& row : table.rows) {
            std::vector<std::string> fields;
            fields.reserve(row.size());
            for (const auto& cell : row) fields.push_back(format_cell(cell));
            out << csv::join_row(fields) << '\n';
        }
    }
}

AnalysisReport read_report_csv(std::istream& in) {
    AnalysisReport report;
    Table* current = nullptr;
    bool expect_header = false;
    std::vector<std::string> fields;
    while (csv::read_record(in, fields)) {
        if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
        if (fields[0].starts_with("# table: ")) {
            report.tables.push_back({fields[0].substr(9), {}, {}});
            current = &report.tables.back();
            expect_header = true;
            continue;
        }
        if (!current) throw Error(ErrorKind::schema, "report row outside any table");
        if (expect_header) {
            current->columns = fields;
            expect_header = false;
            continue;
        }
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const auto& field : fields) row.push_back(parse_cell(field));
        current->rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace ke::report
