#include "nafl/error.hpp"

namespace nafl {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Stability: return "stability";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::Evaluation: return "evaluation";
        case ErrorKind::Configuration: return "configuration";
        case ErrorKind::Singularity: return "singularity";
        case ErrorKind::Trim: return "trim";
        case ErrorKind::Rank: return "rank";
        case ErrorKind::OracleFailure: return "oracle-failure";
        case ErrorKind::File: return "file";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<double> time)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind), time_(time) {}

} // namespace nafl
