#pragma once

#include <cstdint>
#include <vector>

#include "perm/log_scale.hpp"
#include "perm/matrix.hpp"

namespace perm {

/// A preprocessed matrix with exact bookkeeping:
/// per(original) = per(matrix) * exp(log_scale.log()).
struct ScaledMatrix {
    Matrix matrix;
    LogScale log_scale = LogScale::one();
    std::vector<std::uint8_t> support_mask; // row-major, entries kept
    bool zero_permanent = false;
};

/// Maximum bipartite matching between rows and columns of the positive
/// entries; matching[i] is the column matched to row i, or -1. Hopcroft-Karp.
std::vector<int> max_bipartite_matching(const Matrix& m);

bool has_perfect_matching(const Matrix& m);

/// Zeroes every entry that lies on no positive-weight permutation (perfect
/// matching + strongly connected components of the alternating digraph).
/// A matrix without a perfect matching comes back all-zero: per = 0.
ScaledMatrix support_filter(const Matrix& m);

/// Alternating row/column sum normalization; one iteration is a full row
/// pass followed by a full column pass. Every division factor accumulates
/// into log_scale. Requires full support (no row/column sums may vanish).
ScaledMatrix sinkhorn(const Matrix& m, std::size_t iterations);

/// Divides each row by its largest entry, factors into log_scale.
ScaledMatrix row_max_scale(const Matrix& m);

/// The DS pipeline: support_filter, sinkhorn(n^2), row-max division, with
/// all scale factors combined; O(n^4) total.
ScaledMatrix ds_pipeline(const Matrix& m);

} // namespace perm
