#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wsd {

// Data-level failure carrying a stable machine-readable code such as
// "DimensionMismatch" or "DuplicateId". The CLI reports these as
// "<code>: <message>" on stderr and exits with status 1.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace wsd
