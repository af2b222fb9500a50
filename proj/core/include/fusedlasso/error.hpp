#pragma once

#include <stdexcept>
#include <string>

namespace fusedlasso {

enum class ErrorCode {
    dimension_mismatch,
    non_finite,
    invalid_argument,
    invalid_graph,
    inconsistent_partition,
    invalid_fused_sets,
    zero_column,
    tied_times,
    no_events,
    unsupported_loss,
    empty_intersection,
};

const char* to_string(ErrorCode code) noexcept;

// Every contract violation in the library surfaces as this exception; the
// code lets callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace fusedlasso
