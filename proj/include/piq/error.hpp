#pragma once

#include <stdexcept>
#include <string>

namespace piq {

/// Error categories mapped to CLI exit codes (usage=2, data=3, numeric=4).
enum class ErrorKind { usage, data, numeric, budget, dimension, unsupported };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    int exit_code() const noexcept {
        switch (kind_) {
        case ErrorKind::usage: return 2;
        case ErrorKind::data:
        case ErrorKind::dimension: return 3;
        default: return 4;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw_error(kind, what);
}

} // namespace piq
