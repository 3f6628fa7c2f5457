#include "perm/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "perm/bench.hpp"
#include "perm/bounds.hpp"
#include "perm/estimator.hpp"
#include "perm/exact.hpp"
#include "perm/gg.hpp"
#include "perm/matrix.hpp"
#include "perm/preprocess.hpp"
#include "perm/sampler.hpp"

namespace perm {

using nlohmann::json;

namespace {

json report_json(const EstimateReport& rep, const std::string& scheme) {
    return json{{"estimate", rep.estimate.value()},
                {"log_estimate", rep.estimate.log()},
                {"epsilon", rep.epsilon},
                {"delta", rep.delta},
                {"scheme", scheme},
                {"accepted", rep.accepted},
                {"trials", rep.total_trials},
                {"gamma_time", rep.gamma_time},
                {"log_scale_correction", rep.scale_correction.log()},
                {"log_bound", rep.bound_value.log()},
                {"zero_permanent", rep.zero_permanent},
                {"wall_time_s", rep.wall_time_s}};
}

int run(int argc, const char* const* argv) {
    CLI::App app{"permanent estimation toolkit: exact oracles, deep rejection "
                 "sampling, Sinkhorn preprocessing, Godsil-Gutman baselines"};
    app.require_subcommand(1);

    // exact
    std::string exact_file;
    int exact_max_n = 30;
    auto* cmd_exact = app.add_subcommand("exact", "exact permanent via Gray-code Ryser");
    cmd_exact->add_option("file", exact_file)->required();
    cmd_exact->add_option("--max-n", exact_max_n, "size cap (default 30)");

    // bound
    std::string bound_file, bound_kind = "hl";
    int bound_depth = 0;
    auto* cmd_bound = app.add_subcommand("bound", "permanental upper bound");
    cmd_bound->add_option("file", bound_file)->required();
    cmd_bound->add_option("--kind", bound_kind, "hl | ss | mb");
    cmd_bound->add_option("--depth", bound_depth, "depth d of the deep bound");

    // preprocess
    std::string pre_file, pre_out;
    auto* cmd_pre = app.add_subcommand("preprocess", "DS pipeline: support filter, "
                                                     "Sinkhorn, row-max division");
    cmd_pre->add_option("file", pre_file)->required();
    cmd_pre->add_option("--out", pre_out, "output matrix path (sidecar: <out>.scale.json)")
        ->required();

    // estimate
    std::string est_file, est_scheme = "gbas-exact", est_kind = "hl", est_strategy = "auto";
    double est_eps = 0.1, est_delta = 0.05;
    int est_depth = 0;
    bool est_ds = false;
    std::uint64_t est_seed = 0, est_budget = 100'000'000;
    auto* cmd_est = app.add_subcommand("estimate", "(eps,delta)-approximation by rejection "
                                                   "sampling");
    cmd_est->add_option("file", est_file)->required();
    cmd_est->add_option("--eps", est_eps, "relative error target");
    cmd_est->add_option("--delta", est_delta, "failure probability");
    cmd_est->add_option("--scheme", est_scheme, "dagum | gbas | gbas-exact");
    cmd_est->add_option("--kind", est_kind, "hl | ss | mb");
    cmd_est->add_option("--depth", est_depth, "deep bound depth");
    cmd_est->add_flag("--ds", est_ds, "run the DS pipeline first");
    cmd_est->add_option("--strategy", est_strategy, "static | adapart | auto");
    cmd_est->add_option("--seed", est_seed);
    cmd_est->add_option("--budget", est_budget, "trial cap");

    // gg
    std::string gg_file, gg_var = "real";
    double gg_eps = 0.1, gg_delta = 0.05;
    std::uint64_t gg_seed = 0;
    auto* cmd_gg = app.add_subcommand("gg", "Godsil-Gutman determinant estimator with "
                                            "median-of-means");
    cmd_gg->add_option("file", gg_file)->required();
    cmd_gg->add_option("--variant", gg_var, "real | complex | quaternion");
    cmd_gg->add_option("--eps", gg_eps);
    cmd_gg->add_option("--delta", gg_delta);
    cmd_gg->add_option("--seed", gg_seed);

    // gen
    std::string gen_class, gen_out, gen_path;
    std::size_t gen_n = 0;
    double gen_p = -1.0;
    std::uint64_t gen_seed = 0;
    auto* cmd_gen = app.add_subcommand("gen", "write a generated instance");
    cmd_gen->add_option("--class", gen_class, "uniform | blockdiag | bernoulli | staircase")
        ->required();
    cmd_gen->add_option("--n", gen_n)->required();
    cmd_gen->add_option("--p", gen_p, "Bernoulli probability");
    cmd_gen->add_option("--seed", gen_seed);
    cmd_gen->add_option("--out", gen_out)->required();

    // bench
    std::string bench_config, bench_out = "bench.csv";
    bool bench_diag = false;
    std::size_t diag_n = 20;
    double diag_p = 0.5, diag_delta = 0.05;
    std::uint64_t diag_seed = 1;
    auto* cmd_bench = app.add_subcommand("bench", "ERT benchmark grid; emits CSV");
    cmd_bench->add_option("--config", bench_config, "JSON config");
    cmd_bench->add_option("--out", bench_out, "CSV output path");
    cmd_bench->add_flag("--ratio-diagnostic", bench_diag,
                        "report U^HL_d/per against the high-probability ratio bound");
    cmd_bench->add_option("--diag-n", diag_n);
    cmd_bench->add_option("--diag-p", diag_p);
    cmd_bench->add_option("--diag-delta", diag_delta);
    cmd_bench->add_option("--diag-seed", diag_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    json out;
    if (*cmd_exact) {
        Matrix m = load_matrix(exact_file);
        LogScale v = permanent_exact(m, exact_max_n);
        out = json{{"permanent", v.value()}, {"log_permanent", v.log()}, {"n", m.rows()}};
        std::cerr << "per = " << v.value() << " (log " << v.log() << ")\n";
    } else if (*cmd_bound) {
        Matrix m = load_matrix(bound_file);
        DeepBound db = deep_bound(m, bound_depth, bound_kind_from_string(bound_kind));
        out = json{{"kind", bound_kind},
                   {"depth", bound_depth},
                   {"log_value", db.value.log()},
                   {"value", db.value.value()},
                   {"n", m.rows()}};
        std::cerr << "U_" << bound_depth << " = " << db.value.value() << " (log "
                  << db.value.log() << ")\n";
    } else if (*cmd_pre) {
        Matrix m = load_matrix(pre_file);
        ScaledMatrix sm = ds_pipeline(m);
        save_matrix(sm.matrix, pre_out);
        json sidecar{{"log_scale", sm.log_scale.log()},
                     {"zero_permanent", sm.zero_permanent},
                     {"source", pre_file}};
        std::ofstream side(pre_out + ".scale.json");
        side << sidecar.dump(2) << '\n';
        out = json{{"out", pre_out},
                   {"log_scale", sm.log_scale.log()},
                   {"zero_permanent", sm.zero_permanent}};
        std::cerr << "wrote " << pre_out << " log_scale " << sm.log_scale.log() << "\n";
    } else if (*cmd_est) {
        Matrix m = load_matrix(est_file);
        EstimatorConfig ecfg;
        ecfg.epsilon = est_eps;
        ecfg.delta = est_delta;
        ecfg.scheme = estimator_scheme_from_string(est_scheme);
        ecfg.trial_budget = est_budget;
        SamplerConfig scfg;
        scfg.kind = bound_kind_from_string(est_kind);
        scfg.depth = est_depth;
        scfg.seed = est_seed;
        if (est_strategy == "auto")
            scfg.strategy = scfg.kind == BoundKind::HuberLaw ? PartitionStrategy::StaticColumns
                                                             : PartitionStrategy::AdaPart;
        else if (est_strategy == "static")
            scfg.strategy = PartitionStrategy::StaticColumns;
        else if (est_strategy == "adapart")
            scfg.strategy = PartitionStrategy::AdaPart;
        else
            throw input_error("unknown strategy '" + est_strategy + "'");

        LogScale correction = LogScale::one();
        if (est_ds) {
            ScaledMatrix sm = ds_pipeline(m);
            if (sm.zero_permanent) {
                out = json{{"estimate", 0.0}, {"zero_permanent", true}};
                std::cout << out.dump(2) << std::endl;
                std::cerr << "zero permanent\n";
                return 0;
            }
            m = std::move(sm.matrix);
            correction = sm.log_scale;
        }
        EstimateReport rep = estimate(m, ecfg, scfg, correction);
        out = report_json(rep, est_scheme);
        std::cerr << "estimate = " << rep.estimate.value() << " (log " << rep.estimate.log()
                  << ") after " << rep.total_trials << " trials\n";
    } else if (*cmd_gg) {
        Matrix m = load_matrix(gg_file);
        GGConfig cfg;
        cfg.epsilon = gg_eps;
        cfg.delta = gg_delta;
        cfg.seed = gg_seed;
        GGVariant v = gg_variant_from_string(gg_var);
        EstimateReport rep = gg_estimate(m, v, cfg);
        out = report_json(rep, std::string("gg-") + gg_variant_name(v));
        out["samples"] = rep.total_trials;
        std::cerr << "estimate = " << rep.estimate.value() << " from " << rep.total_trials
                  << " samples\n";
    } else if (*cmd_gen) {
        InstanceSpec spec;
        spec.cls = instance_class_from_string(gen_class);
        spec.n = gen_n;
        spec.seed = gen_seed;
        if (spec.cls == InstanceClass::Bernoulli) {
            if (gen_p < 0.0) throw input_error("bernoulli needs --p");
            spec.p = gen_p;
        } else if (gen_p >= 0.0) {
            throw input_error("--p applies to the bernoulli class only");
        }
        Matrix m = generate(spec);
        save_matrix(m, gen_out);
        out = json{{"path", gen_out}, {"class", gen_class}, {"n", gen_n}, {"seed", gen_seed}};
        std::cerr << "wrote " << gen_out << "\n";
    } else if (*cmd_bench) {
        if (bench_diag) {
            auto rows = ratio_diagnostic(diag_n, diag_p, diag_seed, diag_delta, {0, 5});
            json jrows = json::array();
            bool ok = true;
            for (const auto& r : rows) {
                jrows.push_back({{"depth", r.depth},
                                 {"log_per", r.log_per},
                                 {"log_bound", r.log_bound},
                                 {"log_ratio", r.log_ratio},
                                 {"log_theorem_bound", r.log_theorem_bound}});
                ok = ok && std::isfinite(r.log_ratio) && r.log_ratio >= 0.0;
                std::cerr << "d=" << r.depth << " log ratio " << r.log_ratio
                          << " vs theorem bound " << r.log_theorem_bound << "\n";
            }
            out = json{{"ratio_diagnostic", jrows}, {"ok", ok}};
            if (!ok) {
                std::cout << out.dump(2) << std::endl;
                std::cerr << "ratio diagnostic failed\n";
                return 3;
            }
        } else {
            if (bench_config.empty()) throw input_error("bench needs --config (or --ratio-diagnostic)");
            BenchConfig cfg = load_bench_config(bench_config);
            auto rows = run_bench(cfg);
            write_csv(rows, bench_out);
            json jrows = json::array();
            for (const auto& r : rows) {
                jrows.push_back({{"instance", r.instance},
                                 {"n", r.n},
                                 {"scheme", r.scheme},
                                 {"ert_seconds", r.ert_seconds},
                                 {"accepts", r.accepts},
                                 {"trials", r.trials},
                                 {"preprocess_seconds", r.preprocess_seconds},
                                 {"bound_value_log", r.bound_value_log},
                                 {"status", r.status}});
                std::cerr << r.instance << " " << r.scheme << " ert " << r.ert_seconds << "s ["
                          << r.status << "]\n";
            }
            out = json{{"csv", bench_out}, {"rows", jrows}};
        }
    }

    std::cout << out.dump(2) << std::endl;
    return 0;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    try {
        return run(argc, argv);
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace perm
