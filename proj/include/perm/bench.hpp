#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "perm/gg.hpp"
#include "perm/matrix.hpp"
#include "perm/sampler.hpp"

namespace perm {

/// One scheme column of the benchmark grid: a rejection sampler (bound kind
/// + depth + optional DS preprocessing) or a Godsil-Gutman variant.
struct SchemeSpec {
    enum class Type { HL, AdaPart, GG };
    Type type = Type::HL;
    int depth = 0;
    bool ds = false;
    GGVariant gg_variant = GGVariant::Real;

    std::string name() const; // "HL-20-DS", "AdaPart-8", "GG-r"
};

struct BenchConfig {
    std::vector<InstanceSpec> instances;
    std::vector<SchemeSpec> schemes;
    std::uint64_t ert_accepts = 65;    // accepts sampled to extrapolate the ERT
    std::uint64_t target_accepts = 388;
    double time_limit_s = 4825.0;
    std::uint64_t repeats = 1;
    double epsilon = 0.1;
    double delta = 0.05;
    std::uint64_t seed = 0;
};

struct BenchRow {
    std::string instance;
    std::size_t n = 0;
    std::string scheme;
    double ert_seconds = 0.0; // a lower bound when status == timeout
    std::uint64_t accepts = 0;
    std::uint64_t trials = 0;
    double preprocess_seconds = 0.0; // DS + bound construction
    double bound_value_log = 0.0;
    std::string status = "ok"; // ok | timeout
};

/// ERT protocol: sample until ert_accepts accepts (or the time limit), then
/// extrapolate linearly to target_accepts; preprocessing counted once.
/// Rows run sequentially for timing fidelity.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

void write_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path);
std::vector<BenchRow> read_csv(const std::filesystem::path& path);

BenchConfig load_bench_config(const std::filesystem::path& json_path);

/// Diagnostic report: U^HL_d / per on a Bernoulli(n, p) instance next to the
/// high-probability ratio bound delta^-1 (pi (n-d))^-1/2
/// (e^{2e-1} (n-d) p0)^{1/(2 p0)}, p0 = p - n^-1 sqrt(2 p ln(1/delta)).
/// Reported, never gated: the bound is asymptotic in n.
struct RatioDiagnosticRow {
    int depth = 0;
    double log_per = 0.0;
    double log_bound = 0.0;
    double log_ratio = 0.0;
    double log_theorem_bound = 0.0;
};

std::vector<RatioDiagnosticRow> ratio_diagnostic(std::size_t n, double p, std::uint64_t seed,
                                                 double delta, const std::vector<int>& depths);

} // namespace perm
