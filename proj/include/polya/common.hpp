#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace polya {

// Crossing direction. Total means undirected (up + down).
enum class Direction { Up, Down, Total };

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::Up: return "up";
        case Direction::Down: return "down";
        default: return "total";
    }
}

struct ZeroVectorError : std::invalid_argument {
    explicit ZeroVectorError(const std::string& what) : std::invalid_argument(what) {}
};

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

struct InvalidStateError : std::runtime_error {
    explicit InvalidStateError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidTargetError : std::invalid_argument {
    explicit InvalidTargetError(const std::string& what) : std::invalid_argument(what) {}
};

struct EmptySampleError : std::runtime_error {
    explicit EmptySampleError(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientConditionedSample : std::runtime_error {
    explicit InsufficientConditionedSample(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a per-path audit finds a violated exact identity.
struct AuditError : std::logic_error {
    explicit AuditError(const std::string& what) : std::logic_error(what) {}
};

struct ConfigError : std::runtime_error {
    // path is a JSON pointer into the offending document
    ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), pointer(path) {}
    std::string pointer;
};

// Locale-independent float formatting; fixed format so reports are byte-stable.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
}

}  // namespace polya
