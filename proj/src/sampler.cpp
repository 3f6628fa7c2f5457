#include "perm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace perm {

namespace {
const double kEInv = std::exp(-1.0);
// relative slack on nesting comparisons and probability clamps
constexpr double kSlack = 1e-12;
} // namespace

SamplerState::SamplerState(const Matrix& m, BoundKind kind)
    : SamplerState(m, kind, std::vector<std::uint8_t>(m.rows(), 1),
                   std::vector<std::uint8_t>(m.cols(), 1)) {}

SamplerState::SamplerState(const Matrix& m, BoundKind kind,
                           std::vector<std::uint8_t> free_rows,
                           std::vector<std::uint8_t> free_cols)
    : n_(m.rows()), kind_(kind), w_(m), row_free_(std::move(free_rows)),
      col_free_(std::move(free_cols)) {
    if (!m.square()) throw input_error("sampler needs a square matrix");
    if (row_free_.size() != n_ || col_free_.size() != n_)
        throw input_error("free masks must match the matrix order");
    init();
}

void SamplerState::init() {
    for (std::size_t i = 0; i < n_; ++i)
        if (row_free_[i]) free_row_list_.push_back(i);
    for (std::size_t j = 0; j < n_; ++j)
        if (col_free_[j]) free_col_list_.push_back(j);

    if (kind_ == BoundKind::HuberLaw) {
        // one-time row scaling over the free columns; stale thereafter
        for (std::size_t i : free_row_list_) {
            double mx = 0.0;
            for (std::size_t j : free_col_list_) mx = std::max(mx, w_(i, j));
            if (mx > 0.0 && mx != 1.0)
                for (std::size_t j = 0; j < n_; ++j) w_(i, j) /= mx;
        }
    }
    row_sums_.assign(n_, 0.0);
    for (std::size_t i : free_row_list_)
        for (std::size_t j : free_col_list_) row_sums_[i] += w_(i, j);

    order_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        order_[i].resize(n_);
        std::iota(order_[i].begin(), order_[i].end(), 0u);
        std::stable_sort(order_[i].begin(), order_[i].end(),
                         [&](std::uint32_t a, std::uint32_t b) { return w_(i, a) > w_(i, b); });
    }
}

void SamplerState::fix(std::size_t row, std::size_t col) {
    if (!row_free_[row] || !col_free_[col])
        throw input_error("fix on a used row or column");
    sum_stack_.push_back(row_sums_);
    fix_stack_.emplace_back(std::uint32_t(row), std::uint32_t(col));
    for (std::size_t s : free_row_list_) row_sums_[s] -= w_(s, col);
    row_free_[row] = 0;
    col_free_[col] = 0;
    std::erase(free_row_list_, row);
    std::erase(free_col_list_, col);
    cost_ += free_row_list_.size();
}

void SamplerState::unfix() {
    if (fix_stack_.empty()) throw input_error("unfix with nothing fixed");
    auto [row, col] = fix_stack_.back();
    fix_stack_.pop_back();
    row_sums_ = std::move(sum_stack_.back());
    sum_stack_.pop_back();
    row_free_[row] = 1;
    col_free_[col] = 1;
    free_row_list_.insert(std::upper_bound(free_row_list_.begin(), free_row_list_.end(), row), row);
    free_col_list_.insert(std::upper_bound(free_col_list_.begin(), free_col_list_.end(), col), col);
}

double SamplerState::ss_row_full_sum(std::size_t row) const {
    double acc = 0.0, prev_gamma = 0.0;
    std::size_t rank = 0;
    for (std::uint32_t j : order_[row]) {
        if (!col_free_[j]) continue;
        double v = w_(row, j);
        if (v == 0.0) break;
        double g = gamma_minc(++rank);
        acc += v * (g - prev_gamma);
        prev_gamma = g;
    }
    cost_ += order_[row].size();
    return acc;
}

double SamplerState::node_bound() const {
    double prod = 1.0;
    switch (kind_) {
        case BoundKind::HuberLaw:
            for (std::size_t s : free_row_list_) {
                if (row_sums_[s] <= 0.0) return 0.0;
                prod *= huber_h(row_sums_[s]) * kEInv;
            }
            cost_ += free_row_list_.size();
            return prod;
        case BoundKind::SchrijverSoules:
            for (std::size_t s : free_row_list_) {
                double f = ss_row_full_sum(s);
                if (f <= 0.0) return 0.0;
                prod *= f;
            }
            return prod;
        case BoundKind::MincBregman:
            for (std::size_t s : free_row_list_) {
                std::size_t nnz = 0;
                for (std::size_t j : free_col_list_) nnz += w_(s, j) > 0.0;
                if (nnz == 0) return 0.0;
                prod *= gamma_minc(nnz);
            }
            cost_ += free_row_list_.size() * free_col_list_.size();
            return prod;
    }
    return 0.0;
}

void SamplerState::hl_column_bounds_into(std::size_t col, std::vector<double>& out) const {
    out.assign(n_, 0.0);
    std::size_t m = free_row_list_.size();
    // factors h(r_s - w_s,col)/e; prefix/suffix products keep zeros exact
    std::vector<double> f(m), pre(m + 1, 1.0), suf(m + 1, 1.0);
    for (std::size_t k = 0; k < m; ++k) {
        double r = row_sums_[free_row_list_[k]] - w_(free_row_list_[k], col);
        f[k] = r > 0.0 ? huber_h(r) * kEInv : 0.0;
    }
    for (std::size_t k = 0; k < m; ++k) pre[k + 1] = pre[k] * f[k];
    for (std::size_t k = m; k-- > 0;) suf[k] = suf[k + 1] * f[k];
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t i = free_row_list_[k];
        out[i] = w_(i, col) * pre[k] * suf[k + 1];
    }
    cost_ += 4 * m;
}

std::vector<double> SamplerState::hl_column_bounds(std::size_t col) const {
    if (!col_free_[col]) throw input_error("hl_column_bounds on a used column");
    std::vector<double> out;
    hl_column_bounds_into(col, out);
    return out;
}

void SamplerState::ss_or_mb_all_into(Matrix& out) const {
    out = Matrix(n_, n_, 0.0);
    std::size_t m = free_row_list_.size();
    // D(s, j): row s's factor after column j is deleted from it
    Matrix dfac(n_, n_, 0.0);
    if (kind_ == BoundKind::SchrijverSoules) {
        std::vector<double> pre, suf;
        std::vector<std::uint32_t> act;
        for (std::size_t s : free_row_list_) {
            act.clear();
            for (std::uint32_t j : order_[s])
                if (col_free_[j]) act.push_back(j);
            std::size_t cnt = act.size();
            pre.assign(cnt + 2, 0.0);
            suf.assign(cnt + 2, 0.0);
            for (std::size_t t = 1; t <= cnt; ++t)
                pre[t] = pre[t - 1] +
                         w_(s, act[t - 1]) * (gamma_minc(t) - gamma_minc(t - 1));
            for (std::size_t t = cnt; t >= 2; --t)
                suf[t] = suf[t + 1] +
                         w_(s, act[t - 1]) * (gamma_minc(t - 1) - gamma_minc(t - 2));
            for (std::size_t t = 1; t <= cnt; ++t)
                dfac(s, act[t - 1]) = pre[t - 1] + suf[t + 1];
            cost_ += order_[s].size() + 2 * cnt;
        }
    } else { // MincBregman
        for (std::size_t s : free_row_list_) {
            std::size_t nnz = 0;
            for (std::size_t j : free_col_list_) nnz += w_(s, j) > 0.0;
            for (std::size_t j : free_col_list_)
                dfac(s, j) = gamma_minc(nnz - (w_(s, j) > 0.0 ? 1 : 0));
            cost_ += 2 * free_col_list_.size();
        }
    }
    std::vector<double> pre(m + 1), suf(m + 1);
    for (std::size_t j : free_col_list_) {
        pre[0] = 1.0;
        for (std::size_t k = 0; k < m; ++k)
            pre[k + 1] = pre[k] * dfac(free_row_list_[k], j);
        suf[m] = 1.0;
        for (std::size_t k = m; k-- > 0;)
            suf[k] = suf[k + 1] * dfac(free_row_list_[k], j);
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t i = free_row_list_[k];
            out(i, j) = w_(i, j) * pre[k] * suf[k + 1];
        }
        cost_ += 3 * m;
    }
}

Matrix SamplerState::ss_all_bounds() const {
    if (kind_ != BoundKind::SchrijverSoules)
        throw input_error("ss_all_bounds needs a SchrijverSoules state");
    Matrix out;
    ss_or_mb_all_into(out);
    return out;
}

Matrix SamplerState::all_child_bounds() const {
    Matrix out;
    if (kind_ == BoundKind::HuberLaw) {
        out = Matrix(n_, n_, 0.0);
        std::vector<double> col;
        for (std::size_t j : free_col_list_) {
            hl_column_bounds_into(j, col);
            for (std::size_t i : free_row_list_) out(i, j) = col[i];
        }
        return out;
    }
    ss_or_mb_all_into(out);
    return out;
}

std::vector<std::size_t> SamplerState::sorted_columns(std::size_t row) const {
    std::vector<std::size_t> act;
    for (std::uint32_t j : order_[row])
        if (col_free_[j]) act.push_back(j);
    return act;
}

AdaPartition adapart_pick_column(const SamplerState& state, int max_refinements) {
    AdaPartition part;
    part.node = state.node_bound();
    if (std::isinf(part.node))
        throw numeric_error("node bound overflowed; rescale the input (DS preprocessing)");
    if (!(part.node > 0.0)) return part; // every child is empty; caller rejects

    Matrix bounds = state.all_child_bounds();
    double best_sum = -1.0;
    std::size_t best_col = 0;
    for (std::size_t j : state.free_cols()) {
        double s = 0.0;
        for (std::size_t i : state.free_rows()) s += bounds(i, j);
        if (best_sum < 0.0 || s < best_sum) { // ties keep the smallest index
            best_sum = s;
            best_col = j;
        }
    }
    part.column = best_col;
    for (std::size_t i : state.free_rows()) {
        double b = bounds(i, best_col);
        if (b > 0.0)
            part.parts.push_back({{{std::uint32_t(i), std::uint32_t(best_col)}}, b});
    }
    part.total = best_sum;

    while (part.total > part.node * (1.0 + kSlack)) {
        if (part.refinements >= max_refinements)
            throw nesting_failure("partition sum " + std::to_string(part.total) +
                                  " still exceeds node bound " + std::to_string(part.node) +
                                  " after " + std::to_string(part.refinements) +
                                  " refinements");
        // replace the largest part by its own minimizing partition
        std::size_t widest = 0;
        bool found = false;
        for (std::size_t k = 0; k < part.parts.size(); ++k) {
            if (part.parts[k].pairs.size() >= state.free_row_count()) continue; // singleton
            if (!found || part.parts[k].bound > part.parts[widest].bound) {
                widest = k;
                found = true;
            }
        }
        if (!found)
            throw nesting_failure("no refinable part left below node bound");
        AdaPartition::Part expanding = std::move(part.parts[widest]);
        part.parts.erase(part.parts.begin() + widest);

        SamplerState sub(state);
        double prefix = 1.0;
        for (auto [r, c] : expanding.pairs) {
            prefix *= sub.working()(r, c);
            sub.fix(r, c);
        }
        Matrix sb = sub.all_child_bounds();
        double sub_best = -1.0;
        std::size_t sub_col = 0;
        for (std::size_t j : sub.free_cols()) {
            double s = 0.0;
            for (std::size_t i : sub.free_rows()) s += sb(i, j);
            if (sub_best < 0.0 || s < sub_best) {
                sub_best = s;
                sub_col = j;
            }
        }
        for (std::size_t i : sub.free_rows()) {
            double b = sb(i, sub_col);
            if (b <= 0.0) continue;
            AdaPartition::Part child;
            child.pairs = expanding.pairs;
            child.pairs.emplace_back(std::uint32_t(i), std::uint32_t(sub_col));
            child.bound = prefix * b;
            part.parts.push_back(std::move(child));
        }
        part.total = 0.0;
        for (const auto& p : part.parts) part.total += p.bound;
        ++part.refinements;
    }
    return part;
}

namespace {

TrialOutcome rejected(std::uint64_t cost) {
    TrialOutcome o;
    o.trial_cost = cost;
    return o;
}

} // namespace

TrialOutcome sample_trial(const Matrix& m, const DeepBound& db, const SamplerConfig& cfg,
                          rng::Engine& eng) {
    if (!m.square()) throw input_error("sample_trial needs a square matrix");
    if (db.kind != cfg.kind || db.depth != cfg.depth)
        throw input_error("deep bound was built for another configuration");
    if (cfg.strategy == PartitionStrategy::StaticColumns && cfg.kind != BoundKind::HuberLaw)
        throw input_error("the static column order nests only for the Huber-Law bound");
    if (db.value.zero()) throw input_error("sample_trial needs a positive bound");

    std::size_t n = m.rows();
    int d = cfg.depth;
    std::uint64_t cost = 0;
    std::vector<std::uint8_t> rows_free(n, 1), cols_free(n, 1);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> fixed;
    fixed.reserve(n);

    if (d > 0) {
        auto tau = dsample(db.table, eng); // jump straight to depth d
        for (int j = 0; j < d; ++j) {
            fixed.emplace_back(tau[j], std::uint32_t(j));
            rows_free[tau[j]] = 0;
            cols_free[j] = 0;
        }
        cost += std::uint64_t(n) * d;
    }

    auto accept = [&](std::uint64_t total_cost) {
        TrialOutcome o;
        o.accepted = true;
        o.trial_cost = total_cost;
        o.permutation.assign(n, 0);
        for (auto [r, c] : fixed) o.permutation[r] = c;
        return o;
    };
    if (fixed.size() == n) return accept(cost);

    SamplerState st(m, cfg.kind, std::move(rows_free), std::move(cols_free));

    if (cfg.strategy == PartitionStrategy::StaticColumns) {
        std::vector<double> child;
        for (std::size_t col = std::size_t(d); col < n; ++col) {
            // u(S) of the current node, relative to the entries picked so far
            double node = st.node_bound();
            if (std::isinf(node))
                throw numeric_error("node bound overflowed; rescale the input (DS preprocessing)");
            if (!(node > 0.0)) return rejected(cost + st.cost());
            st.hl_column_bounds_into(col, child);
            double u = rng::uniform01(eng) * node;
            double cum = 0.0;
            int pick = -1;
            for (std::size_t i : st.free_rows()) {
                if (child[i] <= 0.0) continue;
                cum += child[i];
                if (u < cum) {
                    pick = int(i);
                    break;
                }
            }
            if (pick < 0) return rejected(cost + st.cost()); // the p(0) mass
            fixed.emplace_back(std::uint32_t(pick), std::uint32_t(col));
            st.fix(std::size_t(pick), col);
        }
        return accept(cost + st.cost());
    }

    // AdaPart: dynamic column choice with refinement on nesting failure
    while (st.free_row_count() > 0) {
        AdaPartition part = adapart_pick_column(st, cfg.max_refinements);
        if (part.parts.empty()) return rejected(cost + st.cost());
        double u = rng::uniform01(eng) * part.node;
        double cum = 0.0;
        const AdaPartition::Part* chosen = nullptr;
        for (const auto& p : part.parts) {
            cum += p.bound;
            if (u < cum) {
                chosen = &p;
                break;
            }
        }
        if (!chosen) return rejected(cost + st.cost());
        for (auto [r, c] : chosen->pairs) {
            fixed.emplace_back(r, c);
            st.fix(r, c);
        }
    }
    return accept(cost + st.cost());
}

RateEstimate acceptance_rate_estimate(const Matrix& m, const SamplerConfig& cfg,
                                      std::uint64_t trials, bool parallel) {
    DeepBound db = deep_bound(m, cfg.depth, cfg.kind);
    RateEstimate r;
    r.trials = trials;
    if (db.value.zero()) return r; // nothing to accept
    std::uint64_t accepts = 0, total_cost = 0;
    bool failed = false;
    std::string what;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : accepts, total_cost) \
    if (parallel)
#endif
    for (std::int64_t i = 0; i < std::int64_t(trials); ++i) {
        if (failed) continue;
        try {
            rng::Engine eng = rng::derive(cfg.seed, std::uint64_t(i));
            TrialOutcome o = sample_trial(m, db, cfg, eng);
            accepts += o.accepted ? 1 : 0;
            total_cost += o.trial_cost;
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                failed = true;
                what = e.what();
            }
        }
    }
    if (failed) throw numeric_error(what);
    r.accepts = accepts;
    r.mean_trial_cost = trials ? double(total_cost) / double(trials) : 0.0;
    return r;
}

} // namespace perm
