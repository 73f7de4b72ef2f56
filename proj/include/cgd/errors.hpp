#pragma once

#include <stdexcept>
#include <string>

namespace cgd {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct InvariantViolation : Error {
    using Error::Error;
};

struct InconsistentUnion : Error {
    explicit InconsistentUnion(const std::string& witness)
        : Error("inconsistent union: " + witness), witness(witness) {}
    std::string witness;
};

struct NonInjectiveRenaming : Error {
    using Error::Error;
};

struct SizeGuardExceeded : Error {
    using Error::Error;
};

struct MalformedDisk : Error {
    using Error::Error;
};

struct AlphabetMismatch : Error {
    using Error::Error;
};

struct RadiusNotPowerOfTwo : Error {
    using Error::Error;
};

struct PortBudgetExceeded : Error {
    using Error::Error;
};

struct UnknownVertex : Error {
    using Error::Error;
};

struct SpaceTooLarge : Error {
    using Error::Error;
};

struct BadParameters : Error {
    using Error::Error;
};

struct EngineError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(int line, int column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                what),
          line(line),
          column(column) {}
    int line;
    int column;
};

}  // namespace cgd
