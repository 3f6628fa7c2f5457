#pragma once

#include <cstdint>
#include <vector>

#include "perm/log_scale.hpp"
#include "perm/matrix.hpp"
#include "perm/rng.hpp"

namespace perm {

/// Literal sum over all n! permutations; the independent oracle for the
/// rest of the library. n <= 10.
double permanent_bruteforce(const Matrix& m);

/// Exact permanent in O(2^n n) via Gray-code Ryser (Nijenhuis-Wilf form).
/// Splits the subset range into fixed chunks so the OpenMP build returns
/// the same value for any thread count. n <= max_n (default 30).
LogScale permanent_exact(const Matrix& m, int max_n = 30);

/// Single-chunk reference kernel kept for testing against the parallel one.
double permanent_ryser_serial(const Matrix& m);

struct RPerOptions {
    std::uint64_t memory_budget_bytes = std::uint64_t(2) << 30; // 2 GiB
    int depth_cap = 28;
    bool parallel = true;
};

/// The g_i(K) table over column subsets K of J = {first d columns}:
/// g_i(K) = per B_{IK} with I = {1..i}, except that "forced" rows may not
/// be skipped (their skip branch is dropped), which restricts the sum to
/// row sets containing them. All i-slices are retained for DSample.
class DeepTable {
public:
    DeepTable(std::size_t n, int d, Matrix b, std::vector<std::uint8_t> forced)
        : n_(n), d_(d), b_(std::move(b)), forced_(std::move(forced)),
          g_(std::size_t(n + 1) << d, 0.0) {}

    std::size_t row_count() const { return n_; }
    int depth() const { return d_; }
    std::uint32_t full_mask() const { return (d_ == 32) ? ~0u : ((1u << d_) - 1u); }

    double g(std::size_t i, std::uint32_t mask) const { return g_[(i << d_) | mask]; }
    double& g(std::size_t i, std::uint32_t mask) { return g_[(i << d_) | mask]; }

    /// g_n(J): the rectangular permanent of B (restricted to forced rows
    /// when any are present).
    double total() const { return g(n_, full_mask()); }

    bool forced(std::size_t i) const { return forced_[i] != 0; }
    const Matrix& b() const { return b_; }

private:
    std::size_t n_;
    int d_;
    Matrix b_;
    std::vector<std::uint8_t> forced_;
    std::vector<double> g_;
};

/// Fills the subset DP table for an n x d matrix B in O(2^d d n) operations.
/// Errors out with the required byte count when the table would exceed the
/// memory budget, and when g_n(J) overflows to a non-finite value.
DeepTable rper(const Matrix& b, const std::vector<std::uint8_t>& forced = {},
               const RPerOptions& opts = {});

/// Draws an injection tau : J -> rows with probability prop. to
/// prod_j b_{tau(j) j} by stochastic backtracking over the table; O(n d).
/// tau[j] is the row matched to column j. Requires g_n(J) > 0.
std::vector<std::uint32_t> dsample(const DeepTable& t, rng::Engine& eng);

} // namespace perm
