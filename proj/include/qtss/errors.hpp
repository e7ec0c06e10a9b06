#pragma once

#include <stdexcept>
#include <string>

namespace qtss {

// Thrown when a runtime invariant is violated (norm loss, malformed
// transcript, zero-probability collapse). Parameter and configuration
// problems throw std::invalid_argument / std::out_of_range instead.
class invariant_error : public std::runtime_error {
public:
    explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qtss
