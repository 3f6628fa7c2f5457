#include "perm/gg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace perm {

const char* gg_variant_name(GGVariant v) {
    switch (v) {
        case GGVariant::Real: return "real";
        case GGVariant::Complex: return "complex";
        case GGVariant::Quaternion: return "quaternion";
    }
    return "?";
}

GGVariant gg_variant_from_string(const std::string& s) {
    if (s == "real" || s == "r") return GGVariant::Real;
    if (s == "complex" || s == "c") return GGVariant::Complex;
    if (s == "quaternion" || s == "q") return GGVariant::Quaternion;
    throw input_error("unknown GG variant '" + s + "'");
}

double gg_critical_ratio_base(GGVariant v) {
    switch (v) {
        case GGVariant::Real: return 3.0;
        case GGVariant::Complex: return 2.0;
        case GGVariant::Quaternion: return 1.5;
    }
    return 0.0;
}

double det_real(std::vector<double> a, std::size_t n) {
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a[i * n + k]) > std::fabs(a[piv * n + k])) piv = i;
        if (a[piv * n + k] == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(a[piv * n + j], a[k * n + j]);
            det = -det;
        }
        det *= a[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = a[i * n + k] / a[k * n + k];
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    return det;
}

std::complex<double> det_complex(std::vector<std::complex<double>> a, std::size_t n) {
    std::complex<double> det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
        if (a[piv * n + k] == std::complex<double>(0.0)) return 0.0;
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(a[piv * n + j], a[k * n + j]);
            det = -det;
        }
        det *= a[k * n + k];
        for (std::size_t i = k + 1; i < n; ++i) {
            std::complex<double> f = a[i * n + k] / a[k * n + k];
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    return det;
}

namespace {

// uniform unit quaternion from three uniforms (Shoemake)
void unit_quaternion(rng::Engine& eng, double q[4]) {
    double u1 = rng::uniform01(eng);
    double u2 = rng::uniform01(eng);
    double u3 = rng::uniform01(eng);
    double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
    double t2 = 2.0 * std::numbers::pi * u2, t3 = 2.0 * std::numbers::pi * u3;
    q[0] = s1 * std::sin(t2);
    q[1] = s1 * std::cos(t2);
    q[2] = s2 * std::sin(t3);
    q[3] = s2 * std::cos(t3);
}

} // namespace

double gg_single_estimate(const Matrix& m, GGVariant v, rng::Engine& eng) {
    if (!m.square()) throw input_error("gg_single_estimate needs a square matrix");
    std::size_t n = m.rows();
    switch (v) {
        case GGVariant::Real: {
            std::vector<double> a(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double s = (eng() & 1) ? 1.0 : -1.0;
                    a[i * n + j] = s * std::sqrt(m(i, j));
                }
            double d = det_real(std::move(a), n);
            return d * d;
        }
        case GGVariant::Complex: {
            static const std::complex<double> roots[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            std::vector<std::complex<double>> a(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    a[i * n + j] = roots[eng() & 3] * std::sqrt(m(i, j));
            std::complex<double> d = det_complex(std::move(a), n);
            return std::norm(d);
        }
        case GGVariant::Quaternion: {
            // q = a+bi+cj+dk embeds as [[a+bi, c+di], [-c+di, a-bi]]; the
            // embedding determinant of the full matrix is real >= 0 and has
            // expectation per(m).
            std::size_t N = 2 * n;
            std::vector<std::complex<double>> a(N * N, 0.0);
            double q[4];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    unit_quaternion(eng, q);
                    double s = std::sqrt(m(i, j));
                    std::complex<double> z0(s * q[0], s * q[1]);
                    std::complex<double> z1(s * q[2], s * q[3]);
                    a[(2 * i) * N + 2 * j] = z0;
                    a[(2 * i) * N + 2 * j + 1] = z1;
                    a[(2 * i + 1) * N + 2 * j] = -std::conj(z1);
                    a[(2 * i + 1) * N + 2 * j + 1] = std::conj(z0);
                }
            std::complex<double> d = det_complex(std::move(a), N);
            return std::max(0.0, d.real()); // imaginary part is roundoff
        }
    }
    return 0.0;
}

std::uint64_t gg_batches(double delta) {
    if (delta <= 0.0 || delta >= 1.0) throw input_error("delta must lie in (0,1)");
    return std::uint64_t(std::ceil(8.0 * std::log(2.0 / delta)));
}

std::uint64_t gg_batch_size(std::size_t n, GGVariant v, double epsilon) {
    if (epsilon <= 0.0) throw input_error("epsilon must be positive");
    double c = gg_critical_ratio_base(v);
    double count = 3.0 * std::pow(c, double(n) / 2.0) / (epsilon * epsilon);
    if (!(count < 1e18)) throw numeric_error("GG sample count overflows for this n");
    return std::uint64_t(std::ceil(count));
}

EstimateReport gg_estimate(const Matrix& m, GGVariant v, const GGConfig& cfg, bool parallel) {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t batches = gg_batches(cfg.delta);
    std::uint64_t per_batch = gg_batch_size(m.rows(), v, cfg.epsilon);
    std::uint64_t total = batches * per_batch;
    if (total > cfg.sample_cap)
        throw budget_exceeded("GG needs " + std::to_string(total) + " samples, cap is " +
                                  std::to_string(cfg.sample_cap),
                              0, 0);

    std::vector<double> means(batches, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::int64_t b = 0; b < std::int64_t(batches); ++b) {
        double sum = 0.0;
        for (std::uint64_t s = 0; s < per_batch; ++s) {
            rng::Engine eng = rng::derive(cfg.seed, std::uint64_t(b) * per_batch + s);
            sum += gg_single_estimate(m, v, eng);
        }
        means[b] = sum / double(per_batch);
    }
    std::sort(means.begin(), means.end());
    double median = batches % 2 ? means[batches / 2]
                                : 0.5 * (means[batches / 2 - 1] + means[batches / 2]);

    EstimateReport rep;
    rep.estimate = LogScale::from_value(median);
    rep.epsilon = cfg.epsilon;
    rep.delta = cfg.delta;
    rep.accepted = total;
    rep.total_trials = total;
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace perm
