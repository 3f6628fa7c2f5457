#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace perm {

// Input that violates an operation's contract (bad file, negative entry,
// non-square matrix where a square one is required, ...).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure: overflow of a DP table, a bound that refuses to nest
// after the refinement cap, exceeded trial budgets or size caps.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

class nesting_failure : public numeric_error {
public:
    explicit nesting_failure(const std::string& msg) : numeric_error(msg) {}
};

class budget_exceeded : public numeric_error {
public:
    budget_exceeded(const std::string& msg, std::uint64_t accepts, std::uint64_t trials)
        : numeric_error(msg), accepts(accepts), trials(trials) {}
    std::uint64_t accepts = 0;
    std::uint64_t trials = 0;
};

} // namespace perm
