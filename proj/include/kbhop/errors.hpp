#pragma once
// Error types thrown across the library. All derive from Error so callers
// can catch broadly or per condition.

#include <stdexcept>
#include <string>

namespace kbhop {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownName : Error { using Error::Error; };
struct TypeMismatch : Error { using Error::Error; };
struct DuplicateTriple : Error { using Error::Error; };
struct NegativeWeight : Error { using Error::Error; };
struct ParseError : Error {
    ParseError(const std::string& msg, int line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_no(line) {}
    int line_no;
};

struct DimensionMismatch : Error { using Error::Error; };
struct BatchMismatch : Error { using Error::Error; };
struct IncompatibleRelations : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct StrategyUnavailable : Error { using Error::Error; };
struct NonScalarLoss : Error { using Error::Error; };
struct InvalidShardCount : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct UnknownToken : Error { using Error::Error; };
struct MissingGroupTag : Error { using Error::Error; };
struct UnknownQueryRelation : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace kbhop
