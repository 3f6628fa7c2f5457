#include "perm/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "perm/estimator.hpp"
#include "perm/exact.hpp"
#include "perm/preprocess.hpp"

namespace perm {

using nlohmann::json;
using clock_type = std::chrono::steady_clock;

namespace {
double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}
} // namespace

std::string SchemeSpec::name() const {
    switch (type) {
        case Type::HL: return "HL-" + std::to_string(depth) + (ds ? "-DS" : "");
        case Type::AdaPart: return "AdaPart-" + std::to_string(depth) + (ds ? "-DS" : "");
        case Type::GG: {
            const char* v = gg_variant == GGVariant::Real      ? "r"
                            : gg_variant == GGVariant::Complex ? "c"
                                                               : "q";
            return std::string("GG-") + v;
        }
    }
    return "?";
}

namespace {

BenchRow run_sampler_row(const Matrix& input, const SchemeSpec& scheme,
                         const BenchConfig& cfg, std::uint64_t seed) {
    BenchRow row;
    row.n = input.rows();
    row.scheme = scheme.name();

    auto t0 = clock_type::now();
    Matrix mat = input;
    LogScale correction = LogScale::one();
    if (scheme.ds) {
        ScaledMatrix sm = ds_pipeline(input);
        if (sm.zero_permanent) {
            row.preprocess_seconds = seconds_since(t0);
            row.ert_seconds = row.preprocess_seconds; // exact zero, nothing to sample
            row.status = "ok";
            row.bound_value_log = -std::numeric_limits<double>::infinity();
            return row;
        }
        mat = std::move(sm.matrix);
        correction = sm.log_scale;
    }

    SamplerConfig scfg;
    scfg.kind = scheme.type == SchemeSpec::Type::HL ? BoundKind::HuberLaw
                                                    : BoundKind::SchrijverSoules;
    scfg.strategy = scheme.type == SchemeSpec::Type::HL ? PartitionStrategy::StaticColumns
                                                        : PartitionStrategy::AdaPart;
    scfg.depth = scheme.depth;
    scfg.seed = seed;

    DeepBound db = deep_bound(mat, scfg.depth, scfg.kind);
    row.bound_value_log = (db.value * correction).log();
    row.preprocess_seconds = seconds_since(t0);
    if (db.value.zero()) {
        row.ert_seconds = row.preprocess_seconds;
        return row;
    }

    auto ts = clock_type::now();
    std::uint64_t accepts = 0, trials = 0;
    double elapsed = 0.0;
    while (accepts < cfg.ert_accepts) {
        rng::Engine eng = rng::derive(seed, trials);
        accepts += sample_trial(mat, db, scfg, eng).accepted ? 1 : 0;
        ++trials;
        if ((trials & 0xff) == 0) {
            elapsed = seconds_since(ts);
            if (elapsed + row.preprocess_seconds > cfg.time_limit_s) break;
        }
    }
    elapsed = seconds_since(ts);
    row.accepts = accepts;
    row.trials = trials;
    if (accepts >= cfg.ert_accepts) {
        row.status = "ok";
        row.ert_seconds =
            row.preprocess_seconds + double(cfg.target_accepts) * elapsed / double(cfg.ert_accepts);
    } else {
        row.status = "timeout";
        // completing ert_accepts takes at least this long
        row.ert_seconds =
            row.preprocess_seconds + double(cfg.target_accepts) * elapsed / double(cfg.ert_accepts);
    }
    return row;
}

BenchRow run_gg_row(const Matrix& input, const SchemeSpec& scheme, const BenchConfig& cfg,
                    std::uint64_t seed) {
    BenchRow row;
    row.n = input.rows();
    row.scheme = scheme.name();
    row.bound_value_log = std::numeric_limits<double>::quiet_NaN();

    std::uint64_t needed = gg_batches(cfg.delta) * gg_batch_size(input.rows(), scheme.gg_variant,
                                                                 cfg.epsilon);
    auto ts = clock_type::now();
    std::uint64_t done = 0;
    double sink = 0.0, elapsed = 0.0;
    while (done < cfg.ert_accepts) {
        rng::Engine eng = rng::derive(seed, done);
        sink += gg_single_estimate(input, scheme.gg_variant, eng);
        ++done;
        elapsed = seconds_since(ts);
        if (elapsed > cfg.time_limit_s) break;
    }
    (void)sink;
    elapsed = seconds_since(ts);
    row.accepts = done;
    row.trials = done;
    if (done >= cfg.ert_accepts) {
        row.status = "ok";
        row.ert_seconds = double(needed) * elapsed / double(done);
    } else {
        row.status = "timeout";
        row.ert_seconds = double(needed) * elapsed / double(std::max<std::uint64_t>(done, 1));
    }
    return row;
}

} // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    std::vector<BenchRow> rows;
    std::uint64_t row_index = 0;
    for (const auto& inst : cfg.instances) {
        Matrix m = generate(inst);
        for (const auto& scheme : cfg.schemes) {
            for (std::uint64_t rep = 0; rep < cfg.repeats; ++rep) {
                std::uint64_t seed = rng::mix(cfg.seed, row_index++);
                BenchRow row = scheme.type == SchemeSpec::Type::GG
                                   ? run_gg_row(m, scheme, cfg, seed)
                                   : run_sampler_row(m, scheme, cfg, seed);
                row.instance = cfg.repeats > 1
                                   ? inst.name() + "#" + std::to_string(rep)
                                   : inst.name();
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

void write_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path.string());
    out.precision(17);
    out << "instance,n,scheme,ert_seconds,accepts,trials,preprocess_seconds,bound_value_log,status\n";
    for (const auto& r : rows)
        out << r.instance << ',' << r.n << ',' << r.scheme << ',' << r.ert_seconds << ','
            << r.accepts << ',' << r.trials << ',' << r.preprocess_seconds << ','
            << r.bound_value_log << ',' << r.status << '\n';
    if (!out) throw input_error("write failure on " + path.string());
}

std::vector<BenchRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw input_error(path.string() + ": empty CSV");
    std::vector<BenchRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        BenchRow r;
        auto next = [&]() {
            if (!std::getline(ls, field, ',')) throw input_error("short CSV row: " + line);
            return field;
        };
        r.instance = next();
        r.n = std::stoul(next());
        r.scheme = next();
        r.ert_seconds = std::stod(next());
        r.accepts = std::stoull(next());
        r.trials = std::stoull(next());
        r.preprocess_seconds = std::stod(next());
        r.bound_value_log = std::stod(next());
        r.status = next();
        rows.push_back(std::move(r));
    }
    return rows;
}

BenchConfig load_bench_config(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw input_error("cannot open " + json_path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw input_error(json_path.string() + ": " + e.what());
    }
    BenchConfig cfg;
    cfg.ert_accepts = j.value("ert_accepts", cfg.ert_accepts);
    cfg.target_accepts = j.value("target_accepts", cfg.target_accepts);
    cfg.time_limit_s = j.value("time_limit_s", cfg.time_limit_s);
    cfg.repeats = j.value("repeats", cfg.repeats);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.delta = j.value("delta", cfg.delta);
    cfg.seed = j.value("seed", cfg.seed);
    if (cfg.ert_accepts > cfg.target_accepts)
        throw input_error("ert_accepts must not exceed target_accepts");
    if (!j.contains("instances") || !j.contains("schemes"))
        throw input_error("bench config needs 'instances' and 'schemes' arrays");
    for (const auto& ji : j.at("instances")) {
        InstanceSpec spec;
        spec.cls = instance_class_from_string(ji.at("class").get<std::string>());
        spec.n = ji.value("n", 0);
        spec.p = ji.value("p", 0.0);
        spec.seed = ji.value("seed", 0);
        if (ji.contains("path")) spec.path = ji.at("path").get<std::string>();
        cfg.instances.push_back(std::move(spec));
    }
    for (const auto& js : j.at("schemes")) {
        SchemeSpec s;
        std::string type = js.at("type").get<std::string>();
        if (type == "hl")
            s.type = SchemeSpec::Type::HL;
        else if (type == "adapart")
            s.type = SchemeSpec::Type::AdaPart;
        else if (type == "gg")
            s.type = SchemeSpec::Type::GG;
        else
            throw input_error("unknown scheme type '" + type + "'");
        s.depth = js.value("depth", 0);
        s.ds = js.value("ds", false);
        if (js.contains("variant"))
            s.gg_variant = gg_variant_from_string(js.at("variant").get<std::string>());
        cfg.schemes.push_back(s);
    }
    return cfg;
}

std::vector<RatioDiagnosticRow> ratio_diagnostic(std::size_t n, double p, std::uint64_t seed,
                                                 double delta, const std::vector<int>& depths) {
    InstanceSpec spec;
    spec.cls = InstanceClass::Bernoulli;
    spec.n = n;
    spec.p = p;
    spec.seed = seed;
    Matrix m = generate(spec);
    LogScale per = permanent_exact(m);
    if (per.zero()) throw numeric_error("diagnostic instance has zero permanent; try another seed");

    std::vector<RatioDiagnosticRow> rows;
    for (int d : depths) {
        RatioDiagnosticRow r;
        r.depth = d;
        r.log_per = per.log();
        r.log_bound = deep_bound(m, d, BoundKind::HuberLaw).value.log();
        r.log_ratio = r.log_bound - r.log_per;
        double p0 = p - std::sqrt(2.0 * p * std::log(1.0 / delta)) / double(n);
        double t = double(n) - double(d);
        if (p0 > 0.0 && t > 0.0) {
            r.log_theorem_bound = -std::log(delta) - 0.5 * std::log(std::numbers::pi * t) +
                                  (2.0 * std::exp(1.0) - 1.0 + std::log(t * p0)) / (2.0 * p0);
        } else {
            r.log_theorem_bound = std::numeric_limits<double>::infinity();
        }
        rows.push_back(r);
    }
    return rows;
}

} // namespace perm
