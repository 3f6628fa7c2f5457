#include "perm/estimator.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "perm/preprocess.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace perm {

const char* estimator_scheme_name(EstimatorScheme s) {
    switch (s) {
        case EstimatorScheme::Dagum: return "dagum";
        case EstimatorScheme::GBAS: return "gbas";
        case EstimatorScheme::GBASExactK: return "gbas-exact";
    }
    return "?";
}

EstimatorScheme estimator_scheme_from_string(const std::string& s) {
    if (s == "dagum") return EstimatorScheme::Dagum;
    if (s == "gbas") return EstimatorScheme::GBAS;
    if (s == "gbas-exact" || s == "gbas-exact-k") return EstimatorScheme::GBASExactK;
    throw input_error("unknown estimator scheme '" + s + "'");
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw numeric_error("incomplete gamma series failed to converge");
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / 1e-30;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw numeric_error("incomplete gamma continued fraction failed to converge");
}

} // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw input_error("regularized_gamma_p needs a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double gamma_tail(std::uint64_t k, double eps) {
    if (k < 2) throw input_error("gamma_tail needs k >= 2");
    if (eps <= 0.0) throw input_error("gamma_tail needs eps > 0");
    double a = double(k);
    double rate = double(k - 1);
    double upper = regularized_gamma_p(a, rate * (1.0 + eps));
    double lower = eps < 1.0 ? regularized_gamma_p(a, rate * (1.0 - eps)) : 0.0;
    return 1.0 - (upper - lower);
}

std::uint64_t required_accepts(const EstimatorConfig& cfg) {
    if (cfg.epsilon <= 0.0) throw input_error("epsilon must be positive");
    if (cfg.delta <= 0.0 || cfg.delta >= 1.0) throw input_error("delta must lie in (0,1)");
    double eps = cfg.epsilon, delta = cfg.delta;
    switch (cfg.scheme) {
        case EstimatorScheme::Dagum:
            return std::uint64_t(std::ceil(1.0 + 2.88 * (1.0 + eps) / (eps * eps) *
                                           std::log(2.0 / delta)));
        case EstimatorScheme::GBAS: {
            if (eps >= 0.75) throw input_error("GBAS needs epsilon in (0, 3/4)");
            return std::uint64_t(std::ceil(2.0 / (1.0 - (4.0 / 3.0) * eps) / (eps * eps) *
                                           std::log(2.0 / delta)));
        }
        case EstimatorScheme::GBASExactK: {
            if (eps >= 0.75) throw input_error("GBAS needs epsilon in (0, 3/4)");
            // gamma_tail decreases in k; bracket from the closed-form bound
            std::uint64_t hi = std::uint64_t(std::ceil(
                2.0 / (1.0 - (4.0 / 3.0) * eps) / (eps * eps) * std::log(2.0 / delta)));
            hi = std::max<std::uint64_t>(hi, 2);
            while (gamma_tail(hi, eps) >= delta) hi *= 2;
            std::uint64_t lo = 2;
            while (lo < hi) {
                std::uint64_t mid = lo + (hi - lo) / 2;
                if (gamma_tail(mid, eps) < delta)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            return lo;
        }
    }
    throw input_error("unknown estimator scheme");
}

EstimateReport estimate(const Matrix& m, const EstimatorConfig& cfg,
                        const SamplerConfig& sampler_cfg, LogScale scale_correction,
                        bool parallel) {
    auto t0 = std::chrono::steady_clock::now();
    EstimateReport rep;
    rep.epsilon = cfg.epsilon;
    rep.delta = cfg.delta;
    rep.scheme = cfg.scheme;
    rep.scale_correction = scale_correction;

    auto finish = [&](LogScale value) {
        rep.estimate = value;
        rep.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return rep;
    };

    if (!has_perfect_matching(m)) {
        rep.zero_permanent = true;
        return finish(LogScale()); // exact 0, no sampling
    }

    std::uint64_t k = required_accepts(cfg);
    rep.accepted = k;

    DeepBound db = deep_bound(m, sampler_cfg.depth, sampler_cfg.kind);
    rep.bound_value = db.value;
    if (db.value.zero()) {
        rep.zero_permanent = true;
        return finish(LogScale());
    }

    bool gbas = cfg.scheme != EstimatorScheme::Dagum;
    std::uint64_t accepts = 0, trials = 0;
    double arrivals = 0.0;

    // Workers fill (accepted, Exp(1)) pairs per trial index; the stopping
    // rule consumes them in index order, so any chunking reproduces the
    // sequential run.
    const std::uint64_t chunk = 4096;
    std::vector<std::uint8_t> acc_buf(chunk);
    std::vector<double> exp_buf(chunk);
    bool done = false;
    while (!done) {
        if (trials >= cfg.trial_budget)
            throw budget_exceeded("trial budget " + std::to_string(cfg.trial_budget) +
                                      " exhausted with " + std::to_string(accepts) + "/" +
                                      std::to_string(k) + " accepts",
                                  accepts, trials);
        std::uint64_t base = trials;
        std::uint64_t count = std::min(chunk, cfg.trial_budget - base);
        bool failed = false;
        std::string what;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
#endif
        for (std::int64_t i = 0; i < std::int64_t(count); ++i) {
            if (failed) continue;
            try {
                rng::Engine eng = rng::derive(sampler_cfg.seed, base + std::uint64_t(i));
                exp_buf[i] = rng::exp1(eng);
                acc_buf[i] = sample_trial(m, db, sampler_cfg, eng).accepted ? 1 : 0;
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
        for (std::uint64_t i = 0; i < count; ++i) {
            ++trials;
            arrivals += exp_buf[i];
            if (acc_buf[i]) {
                ++accepts;
                if (accepts == k) {
                    done = true;
                    break;
                }
            }
        }
    }

    rep.total_trials = trials;
    rep.gamma_time = arrivals;
    LogScale ratio =
        gbas ? LogScale::from_value(double(k - 1)) / LogScale::from_value(arrivals)
             : LogScale::from_value(double(k)) / LogScale::from_value(double(trials));
    return finish(db.value * ratio * scale_correction);
}

} // namespace perm
