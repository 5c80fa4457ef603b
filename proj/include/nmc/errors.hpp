#ifndef NMC_ERRORS_HPP
#define NMC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nmc {

// Malformed or inconsistent user input (files, pmfs, datasets). CLI exit 2.
struct invalid_input : std::runtime_error {
    explicit invalid_input(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate numerical situation a solver cannot recover from. CLI exit 3.
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mutually inconsistent or out-of-range configuration. CLI exit 4.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace nmc

#endif
