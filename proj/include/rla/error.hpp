#pragma once

#include <stdexcept>
#include <string>

namespace rla {

enum class ErrorKind {
    invalid_input,  // malformed data or violated precondition
    infeasible,     // inputs are valid but no audit short of a full count works
};

class AuditError : public std::runtime_error {
public:
    AuditError(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(const std::string& what) {
    throw AuditError(ErrorKind::invalid_input, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(what);
}

}  // namespace rla
