#pragma once

#include <stdexcept>
#include <string>

namespace hclab {

// Failure classes. The CLI maps them to exit codes (see tools/hclab.cpp).
enum class ErrorKind {
    invalid_argument,  // precondition / config value out of range
    guard,             // combinatorial or enumeration guard exceeded
    divergence,        // NaN or overflow in an iteration
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what)
{
    throw Error(ErrorKind::invalid_argument, what);
}

}  // namespace hclab
