#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ke {

// Every failure the toolkit can raise, used to pick CLI exit codes and to
// let callers distinguish data problems from transport problems.
enum class ErrorKind {
    usage,                    // malformed reference / bad invocation
    schema,                   // input file missing required structure
    decode,                   // malformed API payload
    transport,                // network failure, 5xx after retries
    unknown_work,             // work not found upstream (404)
    degenerate_neighborhood,  // fewer than 2 references
    undefined_metric,         // KE denominator zero (n < 2)
    invalid_link_count,       // l outside [0, n(n-1)/2]
    insufficient_data,        // statistical precondition on sizes violated
    insufficient_variance,    // degenerate sample (no spread)
    empty_distribution,       // all-zero category counts
    singular_design,          // rank-deficient regression design
};

std::string_view to_string(ErrorKind kind);

// Exit codes: 0 success, 2 usage, 3 data/schema, 4 transport, 5 degenerate metric.
int exit_code_for(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace ke
