#include "csl/error.hpp"

namespace csl {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::domain: return "domain";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::estimation_failure: return "estimation-failure";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::degenerate_graph: return "degenerate-graph";
    case ErrorKind::config: return "config";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace csl
