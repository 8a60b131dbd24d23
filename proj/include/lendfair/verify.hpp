#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lendfair {

struct Check
{
    std::string suite;
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    double margin = 0.0;   ///< positive when the check passes
    bool passed = false;
};

/// Pathwise loan vs option utilities for the fixed-term, perpetual and fixed-fee top-up models.
std::vector<Check> verify_replication(std::size_t n_paths, std::uint64_t seed);

/*!
 * Immediate-exercise floor over an alpha grid at S0=100, c=1.7, c0=1.2,
 * r=0.05, sigma=0.2 with beta = delta = 0 and every substep monitored.
 * Large alpha must also collapse to the floor with near-zero duration.
 */
std::vector<Check> verify_floor(std::size_t n_train, std::size_t n_test, std::uint64_t seed);

/// Direction of the value response to r, sigma, delta and monitor frequency at base parameters.
std::vector<Check> verify_trends(std::size_t n_train, std::size_t n_test, std::uint64_t seed);

}  // namespace lendfair
