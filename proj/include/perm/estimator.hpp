#pragma once

#include <cstdint>
#include <string>

#include "perm/log_scale.hpp"
#include "perm/matrix.hpp"
#include "perm/sampler.hpp"

namespace perm {

enum class EstimatorScheme { Dagum, GBAS, GBASExactK };

const char* estimator_scheme_name(EstimatorScheme s);
EstimatorScheme estimator_scheme_from_string(const std::string& s);

struct EstimatorConfig {
    double epsilon = 0.1;
    double delta = 0.05;
    EstimatorScheme scheme = EstimatorScheme::GBASExactK;
    std::uint64_t trial_budget = 100'000'000; // hopeless runs fail loudly
};

struct EstimateReport {
    LogScale estimate;
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t accepted = 0;       // the scheme's target k
    std::uint64_t total_trials = 0;
    double gamma_time = 0.0;          // GBAS: the Exp(1) arrival sum t
    LogScale scale_correction = LogScale::one();
    LogScale bound_value;             // U_d used by the run
    double wall_time_s = 0.0;
    EstimatorScheme scheme = EstimatorScheme::GBASExactK;
    bool zero_permanent = false;      // support check failed: exact 0, no trials
};

/// Regularized lower incomplete gamma P(a, x), self-contained: power series
/// for x < a + 1, Lentz continued fraction otherwise; ~1e-15 termination.
double regularized_gamma_p(double a, double x);

/// Pr(|Z - 1| > eps) for Z ~ Gamma(k, rate k - 1); k >= 2.
double gamma_tail(std::uint64_t k, double eps);

/// Accepted draws required by the scheme:
///   Dagum      ceil(1 + 2.88 (1+eps) eps^-2 ln(2/delta))
///   GBAS       ceil(2 (1 - (4/3)eps)^-1 eps^-2 ln(2/delta)), eps in (0, 3/4)
///   GBASExactK min{k : gamma_tail(k, eps) < delta}
std::uint64_t required_accepts(const EstimatorConfig& cfg);

/// (eps, delta)-approximation of per(m) scaled by scale_correction. Dagum
/// returns U_d k/t over integer trial counts; the GBAS schemes return
/// U_d (k-1)/t with t a sum of per-trial Exp(1) arrivals. The support check
/// short-circuits zero permanents. Trials use engines derived from
/// (sampler_cfg.seed, trial index), so parallel evaluation reproduces the
/// sequential stream bit for bit.
EstimateReport estimate(const Matrix& m, const EstimatorConfig& cfg,
                        const SamplerConfig& sampler_cfg,
                        LogScale scale_correction = LogScale::one(),
                        bool parallel = true);

} // namespace perm
