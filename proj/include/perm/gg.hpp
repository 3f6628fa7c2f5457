#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "perm/estimator.hpp"
#include "perm/matrix.hpp"
#include "perm/rng.hpp"

namespace perm {

enum class GGVariant { Real, Complex, Quaternion };

const char* gg_variant_name(GGVariant v);
GGVariant gg_variant_from_string(const std::string& s);

/// Critical-ratio base c: sample counts scale as c^{n/2}; 3, 2, 3/2.
double gg_critical_ratio_base(GGVariant v);

/// Gaussian elimination with partial pivoting; O(n^3). Exposed for the
/// cofactor-expansion oracle tests.
double det_real(std::vector<double> a, std::size_t n);
std::complex<double> det_complex(std::vector<std::complex<double>> a, std::size_t n);

/// One unbiased draw of per(m): entries sqrt(a_ij) carry i.i.d. signs
/// (Real, returns det^2), uniform 4th roots of unity (Complex, |det|^2),
/// or uniform unit quaternions (Quaternion, determinant of the standard
/// 2n x 2n complex embedding, which is real and nonnegative).
double gg_single_estimate(const Matrix& m, GGVariant v, rng::Engine& eng);

struct GGConfig {
    double epsilon = 0.1;
    double delta = 0.05;
    std::uint64_t seed = 0;
    std::uint64_t sample_cap = 200'000'000; // total draws across batches
};

std::uint64_t gg_batches(double delta);
std::uint64_t gg_batch_size(std::size_t n, GGVariant v, double epsilon);

/// Median of ceil(8 ln(2/delta)) batch means, each over
/// ceil(3 c^{n/2} / eps^2) single draws. Per-sample engines derive from
/// (seed, sample index): the result is thread-count independent.
EstimateReport gg_estimate(const Matrix& m, GGVariant v, const GGConfig& cfg,
                           bool parallel = true);

} // namespace perm
