#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perm/common.hpp"

namespace perm {

/// Dense row-major matrix of finite nonnegative reals. Immutable by
/// convention after construction; safe to share across threads read-only.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    const double* data() const { return data_.data(); }
    double* data() { return data_.data(); }

    bool operator==(const Matrix& o) const = default;

    /// Throws input_error unless every entry is finite and >= 0.
    void validate() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class MatrixFormat { DenseText, MatrixMarket };

/// Reads dense-text ("rows cols" header then row-major entries) or
/// MatrixMarket (coordinate/array, real/integer/pattern; pattern entries map
/// to 1.0). Without an explicit format the MatrixMarket banner decides.
Matrix load_matrix(const std::filesystem::path& path,
                   std::optional<MatrixFormat> format = std::nullopt);

/// Round-trips with load_matrix at full double precision.
void save_matrix(const Matrix& m, const std::filesystem::path& path,
                 MatrixFormat format = MatrixFormat::DenseText);

enum class InstanceClass { Uniform, BlockDiagonal, Bernoulli, Staircase, File };

struct InstanceSpec {
    InstanceClass cls = InstanceClass::Uniform;
    std::size_t n = 0;
    double p = 0.0;               // Bernoulli only
    std::size_t block = 5;        // BlockDiagonal block order
    std::uint64_t seed = 0;
    std::filesystem::path path;   // File only

    std::string name() const;
};

/// Deterministic: same seed, same matrix.
///   Uniform        i.i.d. uniform [0,1]
///   BlockDiagonal  independent block x block Uniform blocks on the diagonal,
///                  last block truncated to n mod block when nonzero
///   Bernoulli(p)   i.i.d. {0,1} with P(1) = p
///   Staircase      a_ij = 1 iff i + j <= n + 2 (1-based)
Matrix generate(const InstanceSpec& spec);

InstanceClass instance_class_from_string(const std::string& s);

} // namespace perm
