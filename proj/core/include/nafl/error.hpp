#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nafl {

enum class ErrorKind {
    InvalidInput,
    Shape,
    Stability,
    Divergence,
    Evaluation,
    Configuration,
    Singularity,
    Trim,
    Rank,
    OracleFailure,
    File,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. The kind lets callers (the CLI in
/// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<double> time = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    /// Simulation time at which the failure was detected, when known.
    std::optional<double> time() const noexcept { return time_; }

private:
    ErrorKind kind_;
    std::optional<double> time_;
};

} // namespace nafl
