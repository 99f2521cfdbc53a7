#pragma once

#include <stdexcept>
#include <string>

namespace tpns {

// Configuration / usage problems (bad keys, invalid parameter combinations,
// unsupported geometry). CLI maps these to exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear-solver failures (singular systems, residual above tolerance,
// non-convergence). CLI maps these to exit code 2.
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem problems (unreadable config, unwritable output). Exit code 1.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tpns
