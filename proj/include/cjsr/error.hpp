#pragma once

#include <stdexcept>
#include <string>

namespace cjsr {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input documents.
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

// Enumeration work exceeded its configured cap. Never silently truncated.
struct CapError : Error {
    explicit CapError(const std::string& msg) : Error(msg) {}
};

// The LP solver could not produce a trustworthy value.
struct LpError : Error {
    explicit LpError(const std::string& msg) : Error(msg) {}
};

}  // namespace cjsr
