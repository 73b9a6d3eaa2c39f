#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lattice {

/// Failure categories. The CLI maps each kind to a fixed exit code.
enum class ErrorKind {
    Dimension,             // state/operator length mismatch
    Capacity,              // padded width too small for the requested support
    Parameter,             // invalid numeric parameter (lambda <= 0, ...)
    Domain,                // empty cloud, bad argument domain
    UnsupportedForcing,    // forcing outside the certified class
    ConditionViolation,    // nonlinearity fails C2/C3/weak/Lipschitz sampling
    Divergence,            // NaN or overflow during integration
    BoundaryContamination, // padded reference system leaked to its boundary
    Config,                // unreadable or malformed experiment config
    Io,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by the integrator; carries the index of the step that produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, double t, const std::string& what)
        : Error(ErrorKind::Divergence, what), step_(step), time_(t) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    std::size_t step_;
    double time_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace lattice
