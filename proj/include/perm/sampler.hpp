#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "perm/bounds.hpp"
#include "perm/matrix.hpp"
#include "perm/rng.hpp"

namespace perm {

enum class PartitionStrategy { StaticColumns, AdaPart };

struct SamplerConfig {
    BoundKind kind = BoundKind::HuberLaw;
    int depth = 0;
    PartitionStrategy strategy = PartitionStrategy::StaticColumns;
    std::uint64_t seed = 0;
    int max_refinements = 32;
};

struct TrialOutcome {
    bool accepted = false;
    std::vector<std::uint32_t> permutation; // sigma[row] = column, set when accepted
    std::uint64_t trial_cost = 0;           // arithmetic-step counter
};

/// Working view of a partially fixed matrix: free row/column sets over the
/// original index space (no physical compaction), the Huber-Law row-sum
/// cache, and the per-row sorted column orders the Schrijver-Soules bounds
/// are built from. For kind HuberLaw every row is divided once, at
/// construction, by its largest entry over the free columns (h needs
/// entries <= 1); all bounds this state reports are relative to that fixed
/// scaling, which cancels from every probability the samplers form.
class SamplerState {
public:
    SamplerState(const Matrix& m, BoundKind kind);
    SamplerState(const Matrix& m, BoundKind kind, std::vector<std::uint8_t> free_rows,
                 std::vector<std::uint8_t> free_cols);

    std::size_t size() const { return n_; }
    BoundKind kind() const { return kind_; }
    const Matrix& working() const { return w_; }

    std::size_t free_row_count() const { return free_row_list_.size(); }
    bool row_free(std::size_t i) const { return row_free_[i] != 0; }
    bool col_free(std::size_t j) const { return col_free_[j] != 0; }
    const std::vector<std::size_t>& free_rows() const { return free_row_list_; }
    const std::vector<std::size_t>& free_cols() const { return free_col_list_; }

    void fix(std::size_t row, std::size_t col);
    void unfix();

    /// U(working submatrix), linear domain, kind-specific row factors.
    double node_bound() const;

    /// Child bounds for one column: entry i is w_ij * U(submatrix minus row
    /// i and column j), 0 at non-free rows. O(n) for HuberLaw after the
    /// row-sum cache.
    std::vector<double> hl_column_bounds(std::size_t col) const;
    void hl_column_bounds_into(std::size_t col, std::vector<double>& out) const;

    /// All n^2 child bounds (rows x columns); 0 outside the free sets.
    /// O(n^2) via the per-row sorted prefix/suffix sums.
    Matrix ss_all_bounds() const;

    /// Kind-dispatching variant used by the AdaPart column choice.
    Matrix all_child_bounds() const;

    const std::vector<double>& hl_row_sums() const { return row_sums_; }
    /// Active columns of one row, sorted by entry value nonincreasingly.
    std::vector<std::size_t> sorted_columns(std::size_t row) const;

    std::uint64_t cost() const { return cost_; }

private:
    void init();
    void ss_or_mb_all_into(Matrix& out) const;
    double ss_row_full_sum(std::size_t row) const;

    std::size_t n_ = 0;
    BoundKind kind_ = BoundKind::HuberLaw;
    Matrix w_;                                 // scaled working copy
    std::vector<std::uint8_t> row_free_, col_free_;
    std::vector<std::size_t> free_row_list_, free_col_list_;
    std::vector<double> row_sums_;             // over free columns (HL cache)
    std::vector<std::vector<std::uint32_t>> order_;  // per-row sorted columns (SS cache)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> fix_stack_;
    std::vector<std::vector<double>> sum_stack_;     // row-sum snapshots for unfix
    mutable std::uint64_t cost_ = 0;
};

/// One AdaPart partition of the current node: the minimizing column's
/// children, refined (largest part first) until the bounds sum no longer
/// exceeds the node bound. parts hold the fixed pairs relative to the node.
struct AdaPartition {
    std::size_t column = 0;
    struct Part {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
        double bound = 0.0;
    };
    std::vector<Part> parts;
    double total = 0.0;
    double node = 0.0;
    int refinements = 0;
};

/// Throws nesting_failure when max_refinements expansions still leave the
/// partition sum above the node bound.
AdaPartition adapart_pick_column(const SamplerState& state, int max_refinements = 32);

/// One rejection trial against the deep bound: the depth-d jump draws the
/// injection through the table, the remaining levels run the static
/// column-order (HuberLaw) or AdaPart recursion. P(accept and return sigma)
/// = a(sigma) / U_d(A).
TrialOutcome sample_trial(const Matrix& m, const DeepBound& db, const SamplerConfig& cfg,
                          rng::Engine& eng);

struct RateEstimate {
    std::uint64_t accepts = 0;
    std::uint64_t trials = 0;
    double mean_trial_cost = 0.0;
};

/// Independent trials with per-trial engines derived from (seed, index);
/// the result is identical for any thread count.
RateEstimate acceptance_rate_estimate(const Matrix& m, const SamplerConfig& cfg,
                                      std::uint64_t trials, bool parallel = true);

} // namespace perm
