#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cnc {

enum class ErrorCode {
    InvalidScenario,
    UnknownRouter,
    UnknownCnode,
    UnknownService,
    UnknownOrigin,
    NonAdjacentHop,
    ServiceNotDeployed,
    Unreachable,
    NoSuchService,
    MissingDeadline,
    MissingSpec,
    MissingService,
    InfeasiblePlan,
    DuplicateRange,
    GapDetected,
    IncompleteResult,
    HorizonExceeded,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (tests, the CLI, the Python module) can branch on the kind without
/// parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cnc
