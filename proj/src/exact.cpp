#include "perm/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace perm {

double permanent_bruteforce(const Matrix& m) {
    if (!m.square()) throw input_error("permanent needs a square matrix");
    std::size_t n = m.rows();
    if (n > 10) throw input_error("brute force capped at n = 10");
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    double total = 0.0;
    do {
        double prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) prod *= m(i, sigma[i]);
        total += prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

namespace {

// Nijenhuis-Wilf Ryser over one contiguous Gray-code range [begin, end) of
// the 2^(n-1) column subsets. w holds x_i + sum_{j in gray(begin)} a_ij on
// entry and is clobbered.
long double ryser_range(const Matrix& m, std::uint64_t begin, std::uint64_t end,
                        std::vector<long double>& w) {
    std::size_t n = m.rows();
    long double acc = 0.0L;
    std::uint64_t gray = begin ^ (begin >> 1);
    int sign = (std::popcount(gray) & 1) ? -1 : 1;
    for (std::uint64_t s = begin; s < end; ++s) {
        if (s != begin) {
            int k = std::countr_zero(s);
            std::uint64_t bit = std::uint64_t(1) << k;
            gray = (s ^ (s >> 1));
            double dir = (gray & bit) ? 1.0 : -1.0;
            for (std::size_t i = 0; i < n; ++i) w[i] += dir * m(i, k);
            sign = (std::popcount(gray) & 1) ? -1 : 1;
        }
        long double prod = 1.0L;
        for (std::size_t i = 0; i < n; ++i) prod *= w[i];
        acc += sign * prod;
    }
    return acc;
}

long double ryser_chunked(const Matrix& m, int chunks) {
    std::size_t n = m.rows();
    if (n == 1) return m(0, 0);
    std::uint64_t total = std::uint64_t(1) << (n - 1);
    std::uint64_t chunk = (total + chunks - 1) / chunks;

    // x_i = a_{i,n-1} - (row sum)/2
    std::vector<long double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double rs = 0.0L;
        for (std::size_t j = 0; j < n; ++j) rs += m(i, j);
        x[i] = m(i, n - 1) - rs / 2.0L;
    }

    std::vector<long double> partial(chunks, 0.0L);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int c = 0; c < chunks; ++c) {
        std::uint64_t begin = std::uint64_t(c) * chunk;
        std::uint64_t end = std::min(begin + chunk, total);
        if (begin >= end) continue;
        std::vector<long double> w = x;
        std::uint64_t gray = begin ^ (begin >> 1);
        for (std::size_t j = 0; j + 1 < n; ++j)
            if (gray & (std::uint64_t(1) << j))
                for (std::size_t i = 0; i < n; ++i) w[i] += m(i, j);
        partial[c] = ryser_range(m, begin, end, w);
    }
    long double acc = 0.0L;
    for (int c = 0; c < chunks; ++c) acc += partial[c]; // fixed order
    // per = (-1)^(n-1) * 2 * acc
    return ((n % 2) ? 1.0L : -1.0L) * 2.0L * acc;
}

} // namespace

double permanent_ryser_serial(const Matrix& m) {
    if (!m.square()) throw input_error("permanent needs a square matrix");
    return static_cast<double>(ryser_chunked(m, 1));
}

LogScale permanent_exact(const Matrix& m, int max_n) {
    if (!m.square()) throw input_error("permanent needs a square matrix");
    std::size_t n = m.rows();
    if (n > std::size_t(max_n))
        throw numeric_error("exact permanent capped at n = " + std::to_string(max_n) +
                            ", got n = " + std::to_string(n));
    int chunks = n <= 8 ? 1 : 128;
    long double v = ryser_chunked(m, chunks);
    if (v < 0.0L) v = 0.0L; // roundoff on a zero permanent
    if (!std::isfinite(static_cast<double>(v)))
        throw numeric_error("Ryser accumulation overflowed");
    return LogScale::from_value(static_cast<double>(v));
}

DeepTable rper(const Matrix& b, const std::vector<std::uint8_t>& forced,
               const RPerOptions& opts) {
    std::size_t n = b.rows();
    int d = static_cast<int>(b.cols());
    if (std::size_t(d) > n) throw input_error("rper needs d <= n");
    if (d > opts.depth_cap)
        throw input_error("rper depth " + std::to_string(d) + " exceeds cap " +
                          std::to_string(opts.depth_cap));
    std::uint64_t bytes = (std::uint64_t(n) + 1) * (std::uint64_t(1) << d) * sizeof(double);
    if (bytes > opts.memory_budget_bytes)
        throw numeric_error("rper table needs " + std::to_string(bytes) +
                            " bytes, budget is " + std::to_string(opts.memory_budget_bytes));
    if (!forced.empty() && forced.size() != n)
        throw input_error("forced flags must match the row count");

    DeepTable t(n, d, b, forced.empty() ? std::vector<std::uint8_t>(n, 0) : forced);
    t.g(0, 0) = 1.0;
    std::int64_t nmask = std::int64_t(1) << d;
    for (std::size_t i = 1; i <= n; ++i) {
        const double* brow = b.data() + (i - 1) * d;
        bool skip_allowed = !t.forced(i - 1);
        const double* prev = &t.g(i - 1, 0);
        double* cur = &t.g(i, 0);
        // g_i(K) = g_{i-1}(K) + sum_{j in K} b_ij g_{i-1}(K \ {j})
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (opts.parallel && d >= 12)
#endif
        for (std::int64_t mask = 0; mask < nmask; ++mask) {
            double acc = skip_allowed ? prev[mask] : 0.0;
            std::uint32_t rest = static_cast<std::uint32_t>(mask);
            while (rest) {
                std::uint32_t j = std::countr_zero(rest);
                rest &= rest - 1;
                acc += brow[j] * prev[mask ^ (std::uint32_t(1) << j)];
            }
            cur[mask] = acc;
        }
    }
    if (!std::isfinite(t.total()))
        throw numeric_error("rper table overflowed; rescale the input");
    return t;
}

std::vector<std::uint32_t> dsample(const DeepTable& t, rng::Engine& eng) {
    if (!(t.total() > 0.0)) throw numeric_error("dsample needs a positive rectangular permanent");
    std::size_t n = t.row_count();
    int d = t.depth();
    std::vector<std::uint32_t> tau(d, 0);
    std::uint32_t mask = t.full_mask();
    for (std::size_t i = n; i >= 1 && mask != 0; --i) {
        double gi = t.g(i, mask);
        double u = rng::uniform01(eng) * gi;
        double skip_w = t.forced(i - 1) ? 0.0 : t.g(i - 1, mask);
        double cum = skip_w;
        if (u < cum && skip_w > 0.0) continue; // row i matched to no column
        std::uint32_t rest = mask;
        int pick = -1;
        while (rest) {
            std::uint32_t j = std::countr_zero(rest);
            rest &= rest - 1;
            double wj = t.b()(i - 1, j) * t.g(i - 1, mask ^ (std::uint32_t(1) << j));
            if (wj <= 0.0) continue;
            cum += wj;
            pick = static_cast<int>(j); // roundoff slack falls on the last positive branch
            if (u < cum) break;
        }
        if (pick < 0) continue; // only the skip branch has weight
        tau[pick] = static_cast<std::uint32_t>(i - 1);
        mask ^= std::uint32_t(1) << pick;
    }
    if (mask != 0) throw numeric_error("dsample backtracking failed to place every column");
    return tau;
}

} // namespace perm
