#pragma once

#include <stdexcept>
#include <string>

namespace fracwave {

/// Invalid input: out-of-range parameters, mismatched lengths, bad configuration.
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not deliver its contract (singular pivot,
/// SOE verification failure).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw domain_error(message);
    }
}

}  // namespace detail
}  // namespace fracwave
