#pragma once

#include <stdexcept>
#include <string>

namespace caspr {

// Runtime failure with a user-facing message. CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace caspr
