#include "ke/errors.hpp"

namespace ke {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage: return "usage";
        case ErrorKind::schema: return "schema";
        case ErrorKind::decode: return "decode";
        case ErrorKind::transport: return "transport";
        case ErrorKind::unknown_work: return "unknown_work";
        case ErrorKind::degenerate_neighborhood: return "degenerate_neighborhood";
        case ErrorKind::undefined_metric: return "undefined_metric";
        case ErrorKind::invalid_link_count: return "invalid_link_count";
        case ErrorKind::insufficient_data: return "insufficient_data";
        case ErrorKind::insufficient_variance: return "insufficient_variance";
        case ErrorKind::empty_distribution: return "empty_distribution";
        case ErrorKind::singular_design: return "singular_design";
    }
    return "unknown";
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::usage:
            return 2;
        case ErrorKind::schema:
        case ErrorKind::decode:
        case ErrorKind::unknown_work:
        case ErrorKind::insufficient_data:
        case ErrorKind::insufficient_variance:
        case ErrorKind::empty_distribution:
        case ErrorKind::singular_design:
            return 3;
        case ErrorKind::transport:
            return 4;
        case ErrorKind::degenerate_neighborhood:
        case ErrorKind::undefined_metric:
        case ErrorKind::invalid_link_count:
            return 5;
    }
    return 1;
}

}  // namespace ke
