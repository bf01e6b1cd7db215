#pragma once

#include <stdexcept>
#include <string>

namespace spikemem {

/// Caller passed a value outside the documented parameter domain.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A structural invariant (refractory spacing, shared period, ...) is broken.
class InvariantError : public std::logic_error {
public:
    explicit InvariantError(const std::string& msg) : std::logic_error(msg) {}
};

/// Inconsistent internal state; indicates a bug, never silent data loss.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

/// Filesystem / format failures, reported with path context.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace spikemem
