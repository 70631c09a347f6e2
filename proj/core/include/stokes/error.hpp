#pragma once

#include <stdexcept>
#include <string>

namespace stokes {

// kind maps onto CLI exit codes: validation 2, convergence 3, verification 4
enum class ErrorKind { validation, convergence, verification };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& msg) { throw Error(ErrorKind::validation, msg); }
[[noreturn]] inline void fail_convergence(const std::string& msg) { throw Error(ErrorKind::convergence, msg); }

}  // namespace stokes
