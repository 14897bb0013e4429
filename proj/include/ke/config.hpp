#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "ke/openalex/client.hpp"
#include "ke/report.hpp"

namespace ke {

// Toolkit-wide settings, populated from CLI flags or KE_* environment
// variables (flags win). Live network commands require contact_email;
// offline runs (fixtures or cache only) do not.
struct RunConfig {
    std::string contact_email;
    std::filesystem::path cache_dir = ".ke-cache";
    int parallelism = 4;
    double rate_limit_rps = 5.0;
    double coverage_threshold = 0.8;
    report::OutputFormat output_format = report::OutputFormat::csv;
    bool offline = false;
    std::filesystem::path fixtures;  // fixture corpus for offline runs
    std::string api_base = "https://api.openalex.org";
};

// Builds the transport stack the config describes. Offline runs serve the
// fixture corpus (or nothing but cache hits) and skip the polite-pool
// pacing; live runs refuse to start without a contact email.
openalex::Client make_client(const RunConfig& config);

}  // namespace ke
