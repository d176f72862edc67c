#pragma once

#include <stdexcept>
#include <string>

namespace voskit {

/// Raised when input data (annotation files, traces, dataset layout) is
/// missing or malformed. The CLI maps this to exit code 2; argument and
/// configuration errors use std::invalid_argument and map to exit code 1.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace voskit
