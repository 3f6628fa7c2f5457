#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "perm/bounds.hpp"
#include "perm/exact.hpp"
#include "perm/preprocess.hpp"

using namespace perm;

namespace {

Matrix random_uniform(std::size_t n, std::uint64_t seed) {
    InstanceSpec spec;
    spec.cls = InstanceClass::Uniform;
    spec.n = n;
    spec.seed = seed;
    return generate(spec);
}

} // namespace

TEST_CASE("support filter keeps the identity") {
    ScaledMatrix out = support_filter(Matrix::identity(4));
    CHECK(out.matrix == Matrix::identity(4));
    CHECK_FALSE(out.zero_permanent);
}

TEST_CASE("support filter zeroes entries off every positive permutation") {
    Matrix m = Matrix::from_rows({{1, 1}, {1, 0}});
    ScaledMatrix out = support_filter(m);
    CHECK(out.matrix == Matrix::from_rows({{0, 1}, {1, 0}}));
    CHECK(out.support_mask == std::vector<std::uint8_t>{0, 1, 1, 0});
}

TEST_CASE("support filter signals zero permanents") {
    Matrix m = Matrix::from_rows({{1, 1, 1}, {0, 0, 0}, {1, 1, 1}});
    ScaledMatrix out = support_filter(m);
    CHECK(out.zero_permanent);
    CHECK(out.matrix == Matrix(3, 3, 0.0));
    CHECK_FALSE(has_perfect_matching(m));
}

TEST_CASE("support filter is idempotent and preserves the permanent") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        InstanceSpec spec;
        spec.cls = InstanceClass::Bernoulli;
        spec.n = 6;
        spec.p = 0.5;
        spec.seed = 900 + s;
        Matrix m = generate(spec);
        ScaledMatrix once = support_filter(m);
        ScaledMatrix twice = support_filter(once.matrix);
        CHECK(once.matrix == twice.matrix);
        CHECK(permanent_bruteforce(once.matrix) ==
              doctest::Approx(permanent_bruteforce(m)).epsilon(1e-12));
    }
}

TEST_CASE("sinkhorn fixed point on a doubly stochastic matrix") {
    Matrix m(4, 4, 0.25);
    ScaledMatrix out = sinkhorn(m, 5);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(out.matrix(i, j) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out.log_scale.log() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sinkhorn scaling bookkeeping on diag(2,2)") {
    Matrix m = Matrix::from_rows({{2, 0}, {0, 2}});
    ScaledMatrix out = sinkhorn(m, 1);
    CHECK(out.matrix == Matrix::identity(2));
    CHECK(out.log_scale.log() == doctest::Approx(std::log(4.0)));
}

TEST_CASE("sinkhorn converges on random matrices") {
    Matrix m = random_uniform(6, 77);
    ScaledMatrix out = sinkhorn(m, 36);
    for (std::size_t i = 0; i < 6; ++i) {
        double rs = 0.0, cs = 0.0;
        for (std::size_t j = 0; j < 6; ++j) {
            rs += out.matrix(i, j);
            cs += out.matrix(j, i);
        }
        CHECK(std::fabs(rs - 1.0) < 1e-6);
        CHECK(std::fabs(cs - 1.0) < 1e-6);
    }
}

TEST_CASE("sinkhorn preserves the zero pattern and rejects empty rows") {
    Matrix m = Matrix::from_rows({{0.3, 0.0, 0.9}, {0.0, 1.0, 0.4}, {2.0, 0.1, 0.0}});
    ScaledMatrix out = sinkhorn(m, 9);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK((m(i, j) == 0.0) == (out.matrix(i, j) == 0.0));
    CHECK_THROWS_AS(sinkhorn(Matrix(2, 2, 0.0), 1), numeric_error);
}

TEST_CASE("ds pipeline identity passthrough") {
    ScaledMatrix out = ds_pipeline(Matrix::identity(5));
    CHECK(out.matrix == Matrix::identity(5));
    CHECK(out.log_scale.log() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ds pipeline recovers the permanent") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        Matrix m = random_uniform(5, 1000 + s);
        double per = permanent_bruteforce(m);
        ScaledMatrix out = ds_pipeline(m);
        double rec = permanent_bruteforce(out.matrix) * std::exp(out.log_scale.log());
        CHECK(rec == doctest::Approx(per).epsilon(1e-6));
    }
}

TEST_CASE("row-max division never hurts the HL ratio") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        Matrix m = random_uniform(5, 2000 + s);
        ScaledMatrix balanced = sinkhorn(support_filter(m).matrix, 25);
        ScaledMatrix scaled = row_max_scale(balanced.matrix);
        double ratio_before = bound(balanced.matrix, BoundKind::HuberLaw).log() -
                              std::log(permanent_bruteforce(balanced.matrix));
        double ratio_after = bound(scaled.matrix, BoundKind::HuberLaw).log() -
                             std::log(permanent_bruteforce(scaled.matrix));
        CHECK(ratio_after <= ratio_before + 1e-9);
    }
}

TEST_CASE("ds pipeline flags zero permanents") {
    Matrix m = Matrix::from_rows({{1, 1, 0}, {1, 1, 0}, {1, 1, 0}});
    ScaledMatrix out = ds_pipeline(m);
    CHECK(out.zero_permanent);
}
