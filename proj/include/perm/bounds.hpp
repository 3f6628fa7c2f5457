#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "perm/exact.hpp"
#include "perm/log_scale.hpp"
#include "perm/matrix.hpp"

namespace perm {

enum class BoundKind { MincBregman, SchrijverSoules, HuberLaw };

const char* bound_kind_name(BoundKind k);
BoundKind bound_kind_from_string(const std::string& s);

/// gamma(k) = (k!)^{1/k}, with gamma(0) = 0 so that a vanished row forces a
/// zero bound. Evaluated as exp(lgamma(k+1)/k).
double gamma_minc(std::size_t k);

/// The Huber-Law h: r + (ln r)/2 + e - 1 for r >= 1, else 1 + (e-1) r.
double huber_h(double r);

/// One row's contribution to the row-factorizable bound U(A) = prod_i factor.
///   MincBregman     gamma(#nonzeros)
///   SchrijverSoules sum_k a*_k [gamma(k) - gamma(k-1)], entries sorted
///                   nonincreasingly
///   HuberLaw        max * h(sum/max) / e, the 1-homogeneous form of
///                   Eq-style h(|A_i|)/e (identical whenever max = 1)
/// An all-zero or empty row yields 0 for every kind.
double row_factor(std::span<const double> row, BoundKind kind);

/// U(A): product of row factors; 1 for the vanishing (0 x 0) matrix.
LogScale bound(const Matrix& m, BoundKind kind);

/// u(S) of the partition tree: (product of picked entries) times the bound
/// of the matrix left after deleting the picked rows and columns.
LogScale partition_bound(const Matrix& m,
                         std::span<const std::pair<std::size_t, std::size_t>> fixed,
                         BoundKind kind);

/// U_d(A) = gamma_N * g_n(J) with J = {first d columns}, gamma_i the row
/// factor over the remaining columns, and B = (a_ij / gamma_i) fed to RPer.
/// Rows whose gamma_i vanishes cannot appear in any surviving complement,
/// so they enter B undivided and are marked forced in the table.
struct DeepBound {
    BoundKind kind = BoundKind::HuberLaw;
    int depth = 0;
    std::vector<double> gamma;          // row factors over the trailing columns
    std::vector<std::uint8_t> forced;
    LogScale gamma_product;             // over non-forced rows
    DeepTable table;
    LogScale value;                     // gamma_product * g_n(J)
};

DeepBound deep_bound(const Matrix& m, int depth, BoundKind kind,
                     const RPerOptions& opts = {});

/// Whether sum_i a_ij U(minor_ij) <= U(m) (1 + 1e-12) for the given column:
/// the column-wise nesting test of the partition scheme.
bool check_nesting(const Matrix& m, BoundKind kind, std::size_t column);

} // namespace perm
