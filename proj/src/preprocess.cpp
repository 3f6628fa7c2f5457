#include "perm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace perm {

namespace {

constexpr int kInf = std::numeric_limits<int>::max();

struct HopcroftKarp {
    std::size_t n;
    const Matrix& m;
    std::vector<int> match_row, match_col, dist;

    explicit HopcroftKarp(const Matrix& mat)
        : n(mat.rows()), m(mat), match_row(n, -1), match_col(n, -1), dist(n) {}

    bool bfs() {
        std::queue<std::size_t> q;
        bool found = false;
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = match_row[i] < 0 ? 0 : kInf;
            if (match_row[i] < 0) q.push(i);
        }
        while (!q.empty()) {
            std::size_t i = q.front();
            q.pop();
            for (std::size_t j = 0; j < n; ++j) {
                if (m(i, j) <= 0.0) continue;
                int i2 = match_col[j];
                if (i2 < 0) {
                    found = true;
                } else if (dist[i2] == kInf) {
                    dist[i2] = dist[i] + 1;
                    q.push(std::size_t(i2));
                }
            }
        }
        return found;
    }

    bool dfs(std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (m(i, j) <= 0.0) continue;
            int i2 = match_col[j];
            if (i2 < 0 || (dist[i2] == dist[i] + 1 && dfs(std::size_t(i2)))) {
                match_row[i] = int(j);
                match_col[j] = int(i);
                return true;
            }
        }
        dist[i] = kInf;
        return false;
    }

    std::size_t run() {
        std::size_t size = 0;
        while (bfs())
            for (std::size_t i = 0; i < n; ++i)
                if (match_row[i] < 0 && dfs(i)) ++size;
        return size;
    }
};

// Iterative Tarjan over the digraph on columns: edge u -> v iff the row
// matched to column u has a positive entry in column v (u != v).
std::vector<int> scc_components(const Matrix& m, const std::vector<int>& match_col) {
    std::size_t n = m.rows();
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::size_t> stack;
    int next_index = 0, next_comp = 0;

    struct Frame {
        std::size_t v;
        std::size_t next_child;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            std::size_t u = f.v;
            std::size_t row = std::size_t(match_col[u]);
            bool descended = false;
            while (f.next_child < n) {
                std::size_t v = f.next_child++;
                if (v == u || m(row, v) <= 0.0) continue;
                if (index[v] < 0) {
                    index[v] = low[v] = next_index++;
                    stack.push_back(v);
                    on_stack[v] = 1;
                    call.push_back({v, 0});
                    descended = true;
                    break;
                }
                if (on_stack[v]) low[u] = std::min(low[u], index[v]);
            }
            if (descended) continue;
            if (low[u] == index[u]) {
                for (;;) {
                    std::size_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = next_comp;
                    if (w == u) break;
                }
                ++next_comp;
            }
            call.pop_back();
            if (!call.empty()) {
                std::size_t parent = call.back().v;
                low[parent] = std::min(low[parent], low[u]);
            }
        }
    }
    return comp;
}

} // namespace

std::vector<int> max_bipartite_matching(const Matrix& m) {
    if (!m.square()) throw input_error("matching needs a square matrix");
    HopcroftKarp hk(m);
    hk.run();
    return hk.match_row;
}

bool has_perfect_matching(const Matrix& m) {
    auto match = max_bipartite_matching(m);
    return std::none_of(match.begin(), match.end(), [](int c) { return c < 0; });
}

ScaledMatrix support_filter(const Matrix& m) {
    if (!m.square()) throw input_error("support_filter needs a square matrix");
    std::size_t n = m.rows();
    ScaledMatrix out;
    out.support_mask.assign(n * n, 0);

    HopcroftKarp hk(m);
    if (hk.run() < n) {
        out.matrix = Matrix(n, n, 0.0);
        out.zero_permanent = true;
        return out;
    }
    auto comp = scc_components(m, hk.match_col);

    // An entry (i, j) survives iff it is matched, or the matched column of
    // row i lies in the same strongly connected component as column j.
    out.matrix = Matrix(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t mi = std::size_t(hk.match_row[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (m(i, j) <= 0.0) continue;
            if (j == mi || comp[mi] == comp[j]) {
                out.matrix(i, j) = m(i, j);
                out.support_mask[i * n + j] = 1;
            }
        }
    }
    return out;
}

ScaledMatrix sinkhorn(const Matrix& m, std::size_t iterations) {
    if (!m.square()) throw input_error("sinkhorn needs a square matrix");
    std::size_t n = m.rows();
    ScaledMatrix out;
    out.matrix = m;
    double log_scale = 0.0;
    Matrix& a = out.matrix;
    for (std::size_t it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a(i, j);
            if (s <= 0.0) throw numeric_error("sinkhorn hit a zero row sum; run support_filter first");
            for (std::size_t j = 0; j < n; ++j) a(i, j) /= s;
            log_scale += std::log(s);
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += a(i, j);
            if (s <= 0.0) throw numeric_error("sinkhorn hit a zero column sum; run support_filter first");
            for (std::size_t i = 0; i < n; ++i) a(i, j) /= s;
            log_scale += std::log(s);
        }
    }
    out.log_scale = LogScale::from_log(log_scale);
    out.support_mask.assign(n * n, 0);
    for (std::size_t k = 0; k < n * n; ++k)
        out.support_mask[k] = a.data()[k] > 0.0;
    return out;
}

ScaledMatrix row_max_scale(const Matrix& m) {
    if (!m.square()) throw input_error("row_max_scale needs a square matrix");
    std::size_t n = m.rows();
    ScaledMatrix out;
    out.matrix = m;
    double log_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double mx = 0.0;
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, out.matrix(i, j));
        if (mx <= 0.0) throw numeric_error("row_max_scale hit an all-zero row");
        for (std::size_t j = 0; j < n; ++j) out.matrix(i, j) /= mx;
        log_scale += std::log(mx);
    }
    out.log_scale = LogScale::from_log(log_scale);
    out.support_mask.assign(n * n, 0);
    for (std::size_t k = 0; k < n * n; ++k)
        out.support_mask[k] = out.matrix.data()[k] > 0.0;
    return out;
}

ScaledMatrix ds_pipeline(const Matrix& m) {
    ScaledMatrix filtered = support_filter(m);
    if (filtered.zero_permanent) return filtered;
    std::size_t n = m.rows();
    ScaledMatrix balanced = sinkhorn(filtered.matrix, n * n);
    ScaledMatrix scaled = row_max_scale(balanced.matrix);
    ScaledMatrix out;
    out.matrix = std::move(scaled.matrix);
    out.log_scale = balanced.log_scale * scaled.log_scale;
    out.support_mask = std::move(filtered.support_mask);
    return out;
}

} // namespace perm
