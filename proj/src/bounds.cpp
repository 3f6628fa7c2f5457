#include "perm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace perm {

const char* bound_kind_name(BoundKind k) {
    switch (k) {
        case BoundKind::MincBregman: return "mb";
        case BoundKind::SchrijverSoules: return "ss";
        case BoundKind::HuberLaw: return "hl";
    }
    return "?";
}

BoundKind bound_kind_from_string(const std::string& s) {
    if (s == "mb" || s == "minc-bregman") return BoundKind::MincBregman;
    if (s == "ss" || s == "schrijver-soules") return BoundKind::SchrijverSoules;
    if (s == "hl" || s == "huber-law") return BoundKind::HuberLaw;
    throw input_error("unknown bound kind '" + s + "'");
}

double gamma_minc(std::size_t k) {
    if (k == 0) return 0.0;
    double kd = static_cast<double>(k);
    return std::exp(std::lgamma(kd + 1.0) / kd);
}

double huber_h(double r) {
    static const double e1 = std::exp(1.0) - 1.0;
    if (r >= 1.0) return r + 0.5 * std::log(r) + e1;
    return 1.0 + e1 * r;
}

double row_factor(std::span<const double> row, BoundKind kind) {
    if (row.empty()) return 0.0;
    switch (kind) {
        case BoundKind::MincBregman: {
            std::size_t nnz = 0;
            for (double v : row) nnz += v > 0.0;
            return gamma_minc(nnz);
        }
        case BoundKind::SchrijverSoules: {
            std::vector<double> sorted(row.begin(), row.end());
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            double acc = 0.0;
            double prev = 0.0;
            for (std::size_t k = 0; k < sorted.size(); ++k) {
                if (sorted[k] == 0.0) break;
                double cur = gamma_minc(k + 1);
                acc += sorted[k] * (cur - prev);
                prev = cur;
            }
            return acc;
        }
        case BoundKind::HuberLaw: {
            double sum = 0.0, mx = 0.0;
            for (double v : row) {
                sum += v;
                mx = std::max(mx, v);
            }
            if (mx == 0.0) return 0.0;
            return mx * huber_h(sum / mx) / std::exp(1.0);
        }
    }
    return 0.0;
}

LogScale bound(const Matrix& m, BoundKind kind) {
    if (m.rows() == 0) return LogScale::one(); // U(A) := 1 when A vanishes
    if (!m.square()) throw input_error("bound needs a square matrix");
    LogScale acc = LogScale::one();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        acc = acc * LogScale::from_value(row_factor(m.row(i), kind));
        if (acc.zero()) return acc;
    }
    return acc;
}

namespace {

Matrix remaining_submatrix(const Matrix& m,
                           std::span<const std::pair<std::size_t, std::size_t>> fixed) {
    std::size_t n = m.rows();
    std::vector<std::uint8_t> row_used(n, 0), col_used(n, 0);
    for (auto [r, c] : fixed) {
        if (r >= n || c >= n) throw input_error("fixed pair out of range");
        if (row_used[r] || col_used[c])
            throw input_error("fixed pairs repeat a row or column");
        row_used[r] = col_used[c] = 1;
    }
    std::size_t k = n - fixed.size();
    if (k == 0) return Matrix(); // vanishing matrix
    Matrix sub(k, k);
    std::size_t si = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (row_used[i]) continue;
        std::size_t sj = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (col_used[j]) continue;
            sub(si, sj++) = m(i, j);
        }
        ++si;
    }
    return sub;
}

} // namespace

LogScale partition_bound(const Matrix& m,
                         std::span<const std::pair<std::size_t, std::size_t>> fixed,
                         BoundKind kind) {
    if (!m.square()) throw input_error("partition_bound needs a square matrix");
    LogScale picked = LogScale::one();
    for (auto [r, c] : fixed) picked = picked * LogScale::from_value(m(r, c));
    if (picked.zero()) return picked;
    return picked * bound(remaining_submatrix(m, fixed), kind);
}

DeepBound deep_bound(const Matrix& m, int depth, BoundKind kind, const RPerOptions& opts) {
    if (!m.square()) throw input_error("deep_bound needs a square matrix");
    std::size_t n = m.rows();
    if (depth < 0 || std::size_t(depth) > n)
        throw input_error("depth must lie in [0, n]");

    std::vector<double> gamma(n);
    std::vector<std::uint8_t> forced(n, 0);
    LogScale gamma_product = LogScale::one();
    for (std::size_t i = 0; i < n; ++i) {
        auto r = m.row(i);
        gamma[i] = row_factor(r.subspan(depth), kind);
        if (gamma[i] == 0.0)
            forced[i] = 1;
        else
            gamma_product = gamma_product * LogScale::from_value(gamma[i]);
    }

    Matrix b(n, std::size_t(depth) == 0 ? 0 : depth);
    if (depth > 0) {
        for (std::size_t i = 0; i < n; ++i)
            for (int j = 0; j < depth; ++j)
                b(i, j) = forced[i] ? m(i, j) : m(i, j) / gamma[i];
    }
    DeepTable table = rper(b, forced, opts);
    LogScale value = gamma_product * LogScale::from_value(table.total());
    return DeepBound{kind, depth, std::move(gamma), std::move(forced),
                     gamma_product, std::move(table), value};
}

bool check_nesting(const Matrix& m, BoundKind kind, std::size_t column) {
    if (!m.square()) throw input_error("check_nesting needs a square matrix");
    std::size_t n = m.rows();
    if (column >= n) throw input_error("column out of range");
    LogScale parent = bound(m, kind);
    LogScale child_sum;
    for (std::size_t i = 0; i < n; ++i) {
        if (m(i, column) == 0.0) continue;
        std::pair<std::size_t, std::size_t> fix[1] = {{i, column}};
        child_sum = child_sum + partition_bound(m, fix, kind);
    }
    if (child_sum.zero()) return true;
    if (parent.zero()) return false;
    return child_sum.log() <= parent.log() + 1e-12; // relative slack on FP ties
}

} // namespace perm
