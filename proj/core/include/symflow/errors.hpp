#pragma once

#include <stdexcept>
#include <string>

namespace symflow {

// Base for all library errors. Subtypes exist so callers (and tests) can
// distinguish the precondition that was violated.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonSquareError : Error { using Error::Error; };
struct EmptyRowOrColumnError : Error { using Error::Error; };
struct NotIrreducibleError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };
struct NoConvergenceError : Error { using Error::Error; };
struct InadmissibleWordError : Error { using Error::Error; };
struct WordTooShortError : Error { using Error::Error; };
struct BracketFailureError : Error { using Error::Error; };
struct WindowExhaustedError : Error { using Error::Error; };
struct DegreeTooLowError : Error { using Error::Error; };
struct UnequalLengthsError : Error { using Error::Error; };
struct AlphaTooLargeError : Error { using Error::Error; };
struct DegenerateEndpointsError : Error { using Error::Error; };
struct OutsideDiskError : Error { using Error::Error; };
struct NotInPartialError : Error { using Error::Error; };
struct NotInFlowBoxError : Error { using Error::Error; };
struct NoReturnError : Error { using Error::Error; };
struct UncertifiedTransitionError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };

} // namespace symflow
