#pragma once

#include <stdexcept>
#include <string>

namespace iso {

// Base class for all errors thrown by this library.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape mismatch or non-square input where a square matrix is required.
struct dimension_error : error {
    explicit dimension_error(const std::string& msg) : error(msg) {}
};

// Invalid representation or configuration parameters (bad j, gamma*dt guard, ...).
struct spec_error : error {
    explicit spec_error(const std::string& msg) : error(msg) {}
};

// Invalid operation argument (zero operator, vector that is not a root, ...).
struct argument_error : error {
    explicit argument_error(const std::string& msg) : error(msg) {}
};

// Generator set does not close under commutation.
struct algebra_error : error {
    explicit algebra_error(const std::string& msg) : error(msg) {}
};

// Rank deficiency / degenerate spectrum below tolerance.
struct degenerate_spectrum_error : error {
    explicit degenerate_spectrum_error(const std::string& msg) : error(msg) {}
};

// Overflow or non-finite values encountered.
struct numeric_error : error {
    explicit numeric_error(const std::string& msg) : error(msg) {}
};

// Not enough samples / snapshots for a statistic.
struct statistics_error : error {
    explicit statistics_error(const std::string& msg) : error(msg) {}
};

}  // namespace iso
