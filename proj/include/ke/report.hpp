#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ke/cohort.hpp"
#include "ke/core.hpp"
#include "ke/work.hpp"

namespace ke::report {

enum class OutputFormat { csv, json };

std::optional<OutputFormat> format_from_string(std::string_view text);

// One analyzed work: the row schema shared by batch results, cohort results
// and the analyzer's input.
struct ResultRow {
    std::string id;
    std::string doi;  // empty when unknown
    int year = 0;
    std::string field;
    std::string group;  // empty for plain batch runs
    std::int64_t n_refs = 0;
    std::int64_t internal_links = 0;
    double ke = 0.0;
    double coverage = 0.0;
    std::int64_t cited_by_count = 0;
    std::optional<double> fwci;
    std::int64_t author_count = 0;
};

extern const std::vector<std::string> kResultColumns;

ResultRow make_result_row(const WorkRecord& work, const KEResult& ke,
                          const std::string& group);

void write_results(std::ostream& out, const std::vector<ResultRow>& rows,
                   OutputFormat format);
// Accepts either format; sniffs JSON by the leading character. Throws
// Error(schema) naming the first missing column.
std::vector<ResultRow> read_results(std::istream& in);

void write_exclusions(std::ostream& out, const std::vector<cohort::Exclusion>& exclusions,
                      OutputFormat format);

// Typed table cell; empty cells are monostate.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

std::string format_cell(const Cell& cell);
Cell parse_cell(const std::string& text);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct AnalysisReport {
    std::vector<Table> tables;

    const Table& table(const std::string& name) const;
    bool has_table(const std::string& name) const;
};

struct AnalyzeOptions {
    std::string group_by = "group";     // grouping column: "group" or "field"
    std::optional<double> threshold;    // default: pooled mean of ke
    int histogram_bins = 20;
    double alpha = 0.05;
    bool pooled_t = false;              // pooled Student t instead of Welch
    // Subset of {summary, diversity, pairwise, variance, correlations,
    // bins, ols, threshold, histogram}; empty selects every section.
    std::set<std::string> sections;
};

// Runs the full analysis battery over the rows: per-group summaries,
// field-composition diversity, pairwise two-sample tests, homogeneity +
// ANOVA + Tukey, correlations and bin summaries, the four nested
// standardized OLS models with VIF, threshold shares, and the KE histogram
// with endpoint spikes. Single-pass and deterministic.
AnalysisReport analyze(const std::vector<ResultRow>& rows, const AnalyzeOptions& options);

void write_report(std::ostream& out, const AnalysisReport& report, OutputFormat format);
AnalysisReport read_report_csv(std::istream& in);

}  // namespace ke::report
