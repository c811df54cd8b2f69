#pragma once

#include <stdexcept>
#include <string>

namespace stm {

// Bad input: parameter outside the domain of the operation (exit code 2).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Mass ratio outside the window (m*, m**) where s(m) exists (exit code 2).
struct RegimeError : std::domain_error {
    using std::domain_error::domain_error;
};

// A quadrature, series or root search ran out of budget (exit code 3).
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}
}  // namespace detail

}  // namespace stm
