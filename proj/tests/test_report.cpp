#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "ke/errors.hpp"
#include "ke/report.hpp"

namespace rp = ke::report;
using ke::Error;
using ke::ErrorKind;
using rp::ResultRow;

namespace {

ResultRow make_row(std::string id, std::string group, std::string field, double ke,
                   int year = 2015, std::int64_t cited = 10, std::optional<double> fwci = 1.0,
                   std::int64_t authors = 3, std::int64_t n_refs = 20) {
    ResultRow row;
    row.id = std::move(id);
    row.doi = "10.9999/" + row.id;
    row.year = year;
    row.field = std::move(field);
    row.group = std::move(group);
    row.n_refs = n_refs;
    row.internal_links = 5;
    row.ke = ke;
    row.coverage = 1.0;
    row.cited_by_count = cited;
    row.fwci = fwci;
    row.author_count = authors;
    return row;
}

std::vector<ResultRow> two_identical_groups() {
    std::vector<ResultRow> rows;
    const std::vector<double> values{0.2, 0.4, 0.5, 0.6, 0.8};
    int serial = 0;
    for (const auto& group : {"honor", "influence"})
        for (double v : values)
            rows.push_back(make_row("W" + std::to_string(++serial), group,
                                    "PhysicalSciences", v));
    return rows;
}

std::string to_csv(const rp::AnalysisReport& report) {
    std::ostringstream out;
    rp::write_report(out, report, rp::OutputFormat::csv);
    return out.str();
}

double cell_double(const rp::Cell& cell) {
    if (std::holds_alternative<double>(cell)) return std::get<double>(cell);
    if (std::holds_alternative<std::int64_t>(cell))
        return static_cast<double>(std::get<std::int64_t>(cell));
    REQUIRE(false);
    return 0.0;
}

}  // namespace

TEST_CASE("results round-trip through CSV and JSON") {
    std::vector<ResultRow> rows{
        make_row("W1", "honor", "PhysicalSciences", 0.25),
        make_row("W2", "", "Unknown", 1.0, 2020, 0, std::nullopt, 0, 2),
    };
    rows[1].doi = "";

    for (const auto format : {rp::OutputFormat::csv, rp::OutputFormat::json}) {
        std::ostringstream out;
        rp::write_results(out, rows, format);
        std::istringstream in(out.str());
        const auto parsed = rp::read_results(in);
        REQUIRE(parsed.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(parsed[i].id == rows[i].id);
            CHECK(parsed[i].doi == rows[i].doi);
            CHECK(parsed[i].group == rows[i].group);
            CHECK(parsed[i].ke == rows[i].ke);  // exact: shortest round-trip form
            CHECK(parsed[i].fwci == rows[i].fwci);
            CHECK(parsed[i].author_count == rows[i].author_count);
        }
    }
}

TEST_CASE("missing columns are named in the schema error") {
    std::istringstream in("id,doi,year\nW1,,2015\n");
    try {
        static_cast<void>(rp::read_results(in));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::schema);
        CHECK(std::string(e.what()).find("field") != std::string::npos);
    }
}

TEST_CASE("analyze on two identical groups finds nothing to reject") {
    const auto report = rp::analyze(two_identical_groups(), {});

    const auto& pairwise = report.table("pairwise");
    REQUIRE(pairwise.rows.size() == 1);
    CHECK(cell_double(pairwise.rows[0][3]) == doctest::Approx(0.0));  // t
    CHECK(cell_double(pairwise.rows[0][5]) == doctest::Approx(1.0));  // p

    const auto& tukey = report.table("tukey");
    REQUIRE(tukey.rows.size() == 1);
    CHECK(std::get<bool>(tukey.rows[0][6]) == false);
    CHECK(cell_double(tukey.rows[0][2]) == doctest::Approx(0.0));
}

TEST_CASE("analyze reproduces the three-group field-composition diversity") {
    // Three groups with fixed four-field compositions, one row per work.
    struct Cellcount {
        const char* group;
        const char* field;
        int count;
    };
    const std::vector<Cellcount> composition{
        {"honor", "PhysicalSciences", 4453},      {"honor", "LifeSciences", 4037},
        {"honor", "HealthSciences", 1130},        {"honor", "SocialSciences", 388},
        {"influence", "PhysicalSciences", 3094},  {"influence", "HealthSciences", 1848},
        {"influence", "SocialSciences", 1258},    {"influence", "LifeSciences", 877},
        {"zero_cited", "SocialSciences", 1257},   {"zero_cited", "PhysicalSciences", 962},
        {"zero_cited", "HealthSciences", 533},    {"zero_cited", "LifeSciences", 187},
    };
    std::vector<ResultRow> rows;
    int serial = 0;
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> unit(0.01, 0.99);
    for (const auto& cell : composition)
        for (int i = 0; i < cell.count; ++i)
            rows.push_back(make_row("W" + std::to_string(++serial), cell.group, cell.field,
                                    unit(rng)));

    rp::AnalyzeOptions options;
    options.sections = {"diversity"};
    const auto report = rp::analyze(rows, options);
    const auto& diversity = report.table("diversity");
    REQUIRE(diversity.rows.size() == 3);  // lexicographic: honor, influence, zero_cited

    CHECK(std::get<std::string>(diversity.rows[0][0]) == "honor");
    CHECK(std::get<std::int64_t>(diversity.rows[0][1]) == 10008);
    CHECK(std::fabs(cell_double(diversity.rows[0][3]) - 1.099) < 0.005);
    CHECK(std::fabs(cell_double(diversity.rows[0][5]) - 0.625) < 0.005);

    CHECK(std::get<std::string>(diversity.rows[1][0]) == "influence");
    CHECK(std::fabs(cell_double(diversity.rows[1][3]) - 1.278) < 0.005);
    CHECK(std::fabs(cell_double(diversity.rows[1][5]) - 0.694) < 0.005);

    CHECK(std::get<std::string>(diversity.rows[2][0]) == "zero_cited");
    CHECK(std::fabs(cell_double(diversity.rows[2][3]) - 1.214) < 0.005);
    CHECK(std::fabs(cell_double(diversity.rows[2][5]) - 0.673) < 0.005);
}

TEST_CASE("analyze recovers a planted linear model") {
    // ke = 0.5 + 0.04*z(cited) - 0.03*z(refs) + 0.02*z(fwci) - 0.01*z(team),
    // no noise, single year and field so no control dummies enter.
    std::mt19937 rng(77);
    std::normal_distribution<double> cited_dist(100.0, 30.0);
    std::normal_distribution<double> refs_dist(40.0, 10.0);
    std::normal_distribution<double> fwci_dist(2.0, 0.8);
    std::normal_distribution<double> team_dist(6.0, 2.0);

    const int n = 200;
    std::vector<double> cited(n), refs(n), fwci(n), team(n);
    for (int i = 0; i < n; ++i) {
        cited[i] = std::round(std::fabs(cited_dist(rng)));
        refs[i] = std::max(2.0, std::round(refs_dist(rng)));
        fwci[i] = std::max(0.1, fwci_dist(rng));
        team[i] = std::max(1.0, std::round(team_dist(rng)));
    }
    const auto z = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - m) * (x - m);
        const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        std::vector<double> out;
        for (double x : v) out.push_back((x - m) / sd);
        return out;
    };
    const auto zc = z(cited), zr = z(refs), zf = z(fwci), zt = z(team);

    std::vector<ResultRow> rows;
    for (int i = 0; i < n; ++i) {
        const double ke_value =
            0.5 + 0.04 * zc[i] - 0.03 * zr[i] + 0.02 * zf[i] - 0.01 * zt[i];
        auto row = make_row("W" + std::to_string(i + 1), "honor", "PhysicalSciences",
                            ke_value, 2015, static_cast<std::int64_t>(cited[i]), fwci[i],
                            static_cast<std::int64_t>(team[i]),
                            static_cast<std::int64_t>(refs[i]));
        rows.push_back(std::move(row));
    }

    rp::AnalyzeOptions options;
    options.sections = {"ols"};
    const auto report = rp::analyze(rows, options);
    const auto& ols = report.table("ols");

    // model 4 carries all four planted coefficients
    double beta_cited = 0, beta_refs = 0, beta_fwci = 0, beta_team = 0;
    for (const auto& row : ols.rows) {
        if (std::get<std::int64_t>(row[0]) != 4) continue;
        const auto& term = std::get<std::string>(row[1]);
        const double beta = cell_double(row[3]);
        if (term == "cited_by_count") beta_cited = beta;
        if (term == "reference_count") beta_refs = beta;
        if (term == "fwci") beta_fwci = beta;
        if (term == "team_size") beta_team = beta;
    }
    CHECK(beta_cited == doctest::Approx(0.04).epsilon(1e-8));
    CHECK(beta_refs == doctest::Approx(-0.03).epsilon(1e-8));
    CHECK(beta_fwci == doctest::Approx(0.02).epsilon(1e-8));
    CHECK(beta_team == doctest::Approx(-0.01).epsilon(1e-8));

    const auto& fit = report.table("ols_summary");
    REQUIRE(fit.rows.size() == 4);
    CHECK(cell_double(fit.rows[3][2]) == doctest::Approx(1.0).epsilon(1e-9));  // R^2
}

TEST_CASE("histogram separates endpoint spikes and conserves counts") {
    std::vector<ResultRow> rows;
    int serial = 0;
    const auto add = [&](double ke, int copies) {
        for (int i = 0; i < copies; ++i)
            rows.push_back(make_row("W" + std::to_string(++serial), "honor",
                                    "PhysicalSciences", ke));
    };
    add(0.0, 3);
    add(1.0, 2);
    add(0.025, 4);  // bin 0
    add(0.975, 5);  // bin 19
    add(0.5, 6);    // bin 10

    rp::AnalyzeOptions options;
    options.sections = {"histogram"};
    const auto report = rp::analyze(rows, options);
    const auto& hist = report.table("histogram");

    std::int64_t zero_spike = -1, one_spike = -1, total = 0, bin0 = -1, bin10 = -1, bin19 = -1;
    for (const auto& row : hist.rows) {
        if (std::get<std::string>(row[0]) != "honor") continue;
        const auto& kind = std::get<std::string>(row[1]);
        const auto count = std::get<std::int64_t>(row[5]);
        total += count;
        if (kind == "exact_zero") zero_spike = count;
        if (kind == "exact_one") one_spike = count;
        if (kind == "interior") {
            const auto bin = std::get<std::int64_t>(row[2]);
            if (bin == 0) bin0 = count;
            if (bin == 10) bin10 = count;
            if (bin == 19) bin19 = count;
        }
    }
    CHECK(zero_spike == 3);
    CHECK(one_spike == 2);
    CHECK(bin0 == 4);
    CHECK(bin10 == 6);
    CHECK(bin19 == 5);
    CHECK(total == static_cast<std::int64_t>(rows.size()));
}

TEST_CASE("threshold defaults to the pooled mean and reports per-group shares") {
    std::vector<ResultRow> rows;
    int serial = 0;
    for (double v : {0.2, 0.4}) rows.push_back(make_row("W" + std::to_string(++serial), "a",
                                                        "PhysicalSciences", v));
    for (double v : {0.6, 0.8}) rows.push_back(make_row("W" + std::to_string(++serial), "b",
                                                        "PhysicalSciences", v));

    rp::AnalyzeOptions options;
    options.sections = {"threshold"};
    const auto report = rp::analyze(rows, options);
    const auto& threshold = report.table("threshold");
    REQUIRE(threshold.rows.size() == 3);  // a, b, (all)
    CHECK(cell_double(threshold.rows[0][1]) == doctest::Approx(0.5));  // pooled mean
    CHECK(cell_double(threshold.rows[0][3]) == doctest::Approx(0.0));  // group a share
    CHECK(cell_double(threshold.rows[1][3]) == doctest::Approx(1.0));  // group b share
    CHECK(cell_double(threshold.rows[2][3]) == doctest::Approx(0.5));  // pooled share
}

TEST_CASE("report serialization is byte-stable and re-parses to the same values") {
    const auto rows = two_identical_groups();
    const auto report = rp::analyze(rows, {});
    const std::string once = to_csv(report);
    const std::string twice = to_csv(rp::analyze(rows, {}));
    CHECK(once == twice);

    std::istringstream in(once);
    const auto parsed = rp::read_report_csv(in);
    REQUIRE(parsed.tables.size() == report.tables.size());
    for (std::size_t t = 0; t < parsed.tables.size(); ++t) {
        const auto& a = report.tables[t];
        const auto& b = parsed.tables[t];
        CHECK(a.name == b.name);
        CHECK(a.columns == b.columns);
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t r = 0; r < a.rows.size(); ++r) {
            for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
                const auto& cell = a.rows[r][c];
                const auto& back = b.rows[r][c];
                if (std::holds_alternative<double>(cell)) {
                    // exact: shortest round-trip formatting loses nothing
                    CHECK(cell_double(back) == std::get<double>(cell));
                } else if (std::holds_alternative<std::int64_t>(cell)) {
                    CHECK(cell_double(back) ==
                          static_cast<double>(std::get<std::int64_t>(cell)));
                } else if (std::holds_alternative<bool>(cell)) {
                    CHECK(std::get<bool>(back) == std::get<bool>(cell));
                } else if (std::holds_alternative<std::string>(cell)) {
                    CHECK(std::get<std::string>(back) == std::get<std::string>(cell));
                }
            }
        }
    }

    // JSON output parses cleanly
    std::ostringstream json_out;
    rp::write_report(json_out, report, rp::OutputFormat::json);
    const auto parsed_json = nlohmann::json::parse(json_out.str(), nullptr, false);
    CHECK_FALSE(parsed_json.is_discarded());
}

TEST_CASE("analyze guards") {
    CHECK_THROWS_AS(static_cast<void>(rp::analyze({}, {})), Error);
    rp::AnalyzeOptions bad;
    bad.group_by = "year";
    CHECK_THROWS_AS(static_cast<void>(rp::analyze(two_identical_groups(), bad)), Error);
}
