// Command-line surface for the knowledge-eccentricity toolkit: single and
// batch KE computation, cohort harvesting, and the statistical analysis
// reports. Exit codes: 0 success, 2 usage, 3 data/schema, 4 transport,
// 5 degenerate metric.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ke/config.hpp"
#include "ke/cohort.hpp"
#include "ke/core.hpp"
#include "ke/csv.hpp"
#include "ke/errors.hpp"
#include "ke/report.hpp"

namespace {

using ke::Error;
using ke::ErrorKind;
using ke::RunConfig;
using ke::report::OutputFormat;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::usage, "cannot write output file: " + path);
    return out;
}

std::string default_exclusions_path(const std::string& out_path, OutputFormat format) {
    const std::string suffix = format == OutputFormat::json ? ".exclusions.json"
                                                            : ".exclusions.csv";
    const auto dot = out_path.rfind('.');
    if (dot == std::string::npos || out_path.find('/', dot) != std::string::npos)
        return out_path + suffix;
    return out_path.substr(0, dot) + suffix;
}

void warn_low_coverage(const ke::KEResult& result, double threshold) {
    if (result.coverage < threshold)
        std::cerr << "warning: " << result.focal_id << " coverage "
                  << ke::csv::format_double(result.coverage) << " below threshold "
                  << ke::csv::format_double(threshold)
                  << "; KE is low-confidence (unresolved reference lists count as empty)\n";
}

int cmd_compute(const RunConfig& config, const std::string& ref) {
    auto client = ke::make_client(config);
    const ke::WorkRecord focal = client.fetch_work(ref);
    const ke::ReferenceNeighborhood neigh = client.resolve_neighborhood(focal.id);
    const ke::KEResult result = ke::compute_ke(neigh);
    warn_low_coverage(result, config.coverage_threshold);

    if (config.output_format == OutputFormat::json) {
        nlohmann::ordered_json j;
        j["id"] = result.focal_id;
        j["n_refs"] = result.n_refs;
        j["internal_links"] = result.internal_links;
        j["ke"] = result.ke;
        j["coverage"] = result.coverage;
        j["low_confidence"] = result.coverage < config.coverage_threshold;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "id,n_refs,internal_links,ke,coverage\n";
        std::cout << ke::csv::join_row({result.focal_id, std::to_string(result.n_refs),
                                        std::to_string(result.internal_links),
                                        ke::csv::format_double(result.ke),
                                        ke::csv::format_double(result.coverage)})
                  << '\n';
    }
    return 0;
}

std::vector<std::string> read_ref_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::usage, "cannot read input file: " + path);
    std::vector<std::string> refs;
    std::string line;
    while (std::getline(in, line)) {
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        std::string ref = line.substr(begin, end - begin + 1);
        if (ref.empty() || ref[0] == '#') continue;
        refs.push_back(std::move(ref));
    }
    return refs;
}

int cmd_batch(const RunConfig& config, const std::string& input_path,
              const std::string& out_path, std::string exclusions_path) {
    const std::vector<std::string> refs = read_ref_list(input_path);
    auto client = ke::make_client(config);

    std::vector<ke::report::ResultRow> rows;
    std::vector<ke::cohort::Exclusion> exclusions;
    for (const auto& ref : refs) {
        try {
            const ke::WorkRecord focal = client.fetch_work(ref);
            const ke::ReferenceNeighborhood neigh = client.resolve_neighborhood(focal.id);
            const ke::KEResult result = ke::compute_ke(neigh);
            warn_low_coverage(result, config.coverage_threshold);
            rows.push_back(ke::report::make_result_row(focal, result, ""));
        } catch (const Error& e) {
            exclusions.push_back({ref, "batch", std::string(to_string(e.kind())), e.what()});
        }
    }

    auto out = open_output(out_path);
    ke::report::write_results(out, rows, config.output_format);
    if (exclusions_path.empty())
        exclusions_path = default_exclusions_path(out_path, config.output_format);
    auto exc = open_output(exclusions_path);
    ke::report::write_exclusions(exc, exclusions, config.output_format);

    std::cerr << "batch: " << rows.size() << " row(s), " << exclusions.size()
              << " exclusion(s) -> " << out_path << '\n';
    return 0;
}

int cmd_cohort(const RunConfig& config, const std::string& spec_path,
               const std::string& out_path, std::string exclusions_path) {
    std::ifstream in(spec_path);
    if (!in) throw Error(ErrorKind::usage, "cannot read cohort spec: " + spec_path);
    nlohmann::json spec_json;
    try {
        in >> spec_json;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::schema, std::string("bad cohort spec JSON: ") + e.what());
    }
    const ke::cohort::CohortSpec spec = ke::cohort::cohort_spec_from_json(spec_json);

    auto client = ke::make_client(config);
    const ke::cohort::CohortBuildResult built = ke::cohort::build_cohort(client, spec);

    std::vector<ke::report::ResultRow> rows;
    for (const auto& record : built.records) {
        warn_low_coverage(*record.ke, config.coverage_threshold);
        rows.push_back(ke::report::make_result_row(
            record.work, *record.ke, std::string(to_string(record.group))));
    }

    auto out = open_output(out_path);
    ke::report::write_results(out, rows, config.output_format);
    if (exclusions_path.empty())
        exclusions_path = default_exclusions_path(out_path, config.output_format);
    auto exc = open_output(exclusions_path);
    ke::report::write_exclusions(exc, built.exclusions, config.output_format);

    for (const auto& note : built.notes) std::cerr << "note: " << note << '\n';
    std::cerr << "cohort: " << built.candidates << " candidate(s) = " << rows.size()
              << " row(s) + " << built.exclusions.size() << " exclusion(s) -> " << out_path
              << '\n';
    return 0;
}

int cmd_analyze(const RunConfig& config, const std::string& input_path,
                const std::string& out_path, const ke::report::AnalyzeOptions& options) {
    std::ifstream in(input_path);
    if (!in) throw Error(ErrorKind::usage, "cannot read results file: " + input_path);
    const auto rows = ke::report::read_results(in);
    const auto report = ke::report::analyze(rows, options);
    if (out_path.empty()) {
        ke::report::write_report(std::cout, report, config.output_format);
    } else {
        auto out = open_output(out_path);
        ke::report::write_report(out, report, config.output_format);
        std::cerr << "analyze: " << rows.size() << " row(s) -> " << out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-eccentricity toolkit: reference-neighborhood novelty "
                 "scores from OpenAlex metadata, plus the cohort statistics suite"};
    app.require_subcommand(1);

    RunConfig config;
    std::string format_name = "csv";
    std::string cache_dir = config.cache_dir.string();
    std::string fixtures;

    app.add_option("--cache-dir", cache_dir, "Work cache directory (JSONL store)")
        ->envname("KE_CACHE_DIR")
        ->capture_default_str();
    app.add_option("--mailto", config.contact_email,
                   "Contact email sent with live API requests (required unless --offline)")
        ->envname("KE_MAILTO");
    app.add_option("--rps", config.rate_limit_rps, "Max requests per second to the live API")
        ->envname("KE_RPS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--parallelism", config.parallelism, "Concurrent batch requests")
        ->envname("KE_PARALLELISM")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    app.add_option("--format", format_name, "Output format: csv or json")
        ->envname("KE_FORMAT")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_flag("--offline", config.offline,
                 "Never touch the network; serve from --fixtures and the cache")
        ->envname("KE_OFFLINE");
    app.add_option("--fixtures", fixtures, "Recorded payload corpus for offline runs")
        ->envname("KE_FIXTURES");
    app.add_option("--coverage-threshold", config.coverage_threshold,
                   "Coverage below this marks a result low-confidence")
        ->envname("KE_COVERAGE_THRESHOLD")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--api-base", config.api_base, "API base URL")
        ->envname("KE_API_BASE")
        ->capture_default_str();

    auto* compute = app.add_subcommand("compute", "Compute KE for one DOI or work id");
    std::string compute_ref;
    compute->add_option("ref", compute_ref, "DOI or OpenAlex work id")->required();

    auto* batch = app.add_subcommand("batch", "Compute KE for a file of references");
    std::string batch_input, batch_out, batch_exclusions;
    batch->add_option("input", batch_input, "Reference list, one per line, # comments")
        ->required();
    batch->add_option("-o,--out", batch_out, "Results file")->required();
    batch->add_option("--exclusions", batch_exclusions,
                      "Exclusion report path (default: derived from --out)");

    auto* cohort = app.add_subcommand("cohort", "Harvest the comparison cohorts and compute KE");
    std::string cohort_spec, cohort_out, cohort_exclusions;
    cohort->add_option("--spec", cohort_spec, "Cohort spec JSON file")->required();
    cohort->add_option("-o,--out", cohort_out, "Results file")->required();
    cohort->add_option("--exclusions", cohort_exclusions,
                       "Exclusion report path (default: derived from --out)");

    auto* analyze = app.add_subcommand("analyze", "Run the analysis battery on results");
    std::string analyze_input, analyze_out;
    ke::report::AnalyzeOptions analyze_options;
    std::vector<std::string> analyze_sections;
    double analyze_threshold = -1.0;
    analyze->add_option("-i,--input", analyze_input, "Results file (csv or json)")
        ->required();
    analyze->add_option("-o,--out", analyze_out, "Report file (default: stdout)");
    analyze->add_option("--by", analyze_options.group_by, "Grouping column: group or field")
        ->check(CLI::IsMember({"group", "field"}))
        ->capture_default_str();
    analyze->add_option("--threshold", analyze_threshold,
                        "KE threshold for share reporting (default: pooled mean)");
    analyze->add_option("--bins", analyze_options.histogram_bins,
                        "Interior histogram bins over (0,1)")
        ->check(CLI::Range(1, 1000))
        ->capture_default_str();
    analyze->add_option("--alpha", analyze_options.alpha, "Familywise alpha for Tukey HSD")
        ->capture_default_str();
    analyze->add_flag("--pooled-t", analyze_options.pooled_t,
                      "Pooled Student t instead of Welch for pairwise tests");
    analyze->add_option("--sections", analyze_sections,
                        "Subset of sections to emit (default: all)")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    config.cache_dir = cache_dir;
    config.fixtures = fixtures;
    const auto format = ke::report::format_from_string(format_name);
    config.output_format = format.value_or(OutputFormat::csv);

    try {
        if (compute->parsed()) return cmd_compute(config, compute_ref);
        if (batch->parsed()) return cmd_batch(config, batch_input, batch_out, batch_exclusions);
        if (cohort->parsed())
            return cmd_cohort(config, cohort_spec, cohort_out, cohort_exclusions);
        if (analyze->parsed()) {
            if (analyze_threshold >= 0.0) analyze_options.threshold = analyze_threshold;
            analyze_options.sections =
                std::set<std::string>(analyze_sections.begin(), analyze_sections.end());
            return cmd_analyze(config, analyze_input, analyze_out, analyze_options);
        }
        throw Error(ErrorKind::usage, "no subcommand given");
    } catch (const Error& e) {
        nlohmann::ordered_json err;
        err["error"] = std::string(to_string(e.kind()));
        err["message"] = e.what();
        std::cerr << err.dump() << '\n';
        return ke::exit_code_for(e.kind());
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"] = "internal";
        err["message"] = e.what();
        std::cerr << err.dump() << '\n';
        return 1;
    }
}
