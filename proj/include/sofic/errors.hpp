#pragma once

#include <stdexcept>
#include <string>

namespace sofic {

// Base error. Carries a stable machine-readable code and the process exit
// code used by the command-line front end (2 = parse/validation,
// 3 = budget exceeded, 4 = numerical non-convergence).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, int exit_code)
        : std::runtime_error(message), code_(std::move(code)), exit_code_(exit_code) {}

    const std::string& code() const noexcept { return code_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string code_;
    int exit_code_;
};

#define SOFIC_ERROR_TYPE(Name, code_str, exit_code)               \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& message)                 \
            : Error(code_str, message, exit_code) {}              \
    }

SOFIC_ERROR_TYPE(ParseError, "ParseError", 2);
SOFIC_ERROR_TYPE(ValidationError, "ValidationError", 2);
SOFIC_ERROR_TYPE(NotPrimitive, "NotPrimitive", 2);
SOFIC_ERROR_TYPE(NoMagicWord, "NoMagicWord", 2);
SOFIC_ERROR_TYPE(WordNotAdmissible, "WordNotAdmissible", 2);
SOFIC_ERROR_TYPE(InsufficientContext, "InsufficientContext", 2);
SOFIC_ERROR_TYPE(NonPositiveEntry, "NonPositiveEntry", 2);
SOFIC_ERROR_TYPE(DepthMismatch, "DepthMismatch", 2);
SOFIC_ERROR_TYPE(GapTooSmall, "GapTooSmall", 2);
SOFIC_ERROR_TYPE(SupportViolation, "SupportViolation", 2);
SOFIC_ERROR_TYPE(PeriodTooLarge, "PeriodTooLarge", 3);
SOFIC_ERROR_TYPE(BudgetExceeded, "BudgetExceeded", 3);
SOFIC_ERROR_TYPE(NoConvergence, "NoConvergence", 4);

#undef SOFIC_ERROR_TYPE

// Enumeration and matrix-size limits shared by the language and transfer
// layers. Overridable per call.
struct Budgets {
    std::size_t max_words = 1'000'000;   // cap on enumerated word sets
    std::size_t dense_dim = 2000;        // max dimension for dense matrix work
    std::size_t magic_subsets = 1u << 20; // subset-automaton states explored
};

}  // namespace sofic
