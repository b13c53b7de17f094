#ifndef ORULES_ERRORS_HPP
#define ORULES_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace orules {

/// Base class for all simulator errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model construction errors.
struct DuplicateAgentError : Error {
    using Error::Error;
};
struct BadWeightError : Error {
    using Error::Error;
};

/// Dynamics errors.
struct GatedComponentError : Error {
    using Error::Error;
};

/// Rule-engine errors.
struct StepTooCoarseError : Error {
    using Error::Error;
};
struct NotReadyError : Error {
    using Error::Error;
};
struct UnknownEventError : Error {
    using Error::Error;
};

/// Harness errors.
struct NonTerminationError : Error {
    using Error::Error;
};
struct EmptySampleError : Error {
    using Error::Error;
};

/// Scenario-file diagnostics. Every parse/validation failure carries the
/// 1-based line and column it refers to (0 for whole-file problems).
struct ScenarioError : Error {
    enum class Kind { Syntax, UnknownKey, MissingRequired, OrderViolation };

    ScenarioError(Kind k, int line_, int column_, const std::string& msg)
        : Error(format(k, line_, column_, msg)), kind(k), line(line_), column(column_) {}

    Kind kind;
    int line;
    int column;

    static const char* kind_name(Kind k) {
        switch (k) {
            case Kind::Syntax: return "syntax error";
            case Kind::UnknownKey: return "unknown key";
            case Kind::MissingRequired: return "missing required";
            case Kind::OrderViolation: return "order violation";
        }
        return "error";
    }

  private:
    static std::string format(Kind k, int line, int column, const std::string& msg) {
        return std::to_string(line) + ":" + std::to_string(column) + ": " +
               std::string(kind_name(k)) + ": " + msg;
    }
};

}  // namespace orules

#endif
