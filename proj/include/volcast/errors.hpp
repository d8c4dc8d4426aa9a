#pragma once

#include <stdexcept>
#include <string>

namespace volcast {

// Error taxonomy mirrors the CLI exit codes: config 2, data 3, numeric 4.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct data_error : std::runtime_error {
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace volcast
