#include "perm/matrix.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

#include "perm/rng.hpp"

namespace perm {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows.begin()->size() : 0;
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw input_error("ragged initializer rows");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

void Matrix::validate() const {
    if (rows_ == 0 || cols_ == 0) throw input_error("matrix must have at least one row and column");
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            double v = (*this)(i, j);
            if (!std::isfinite(v)) throw input_error("non-finite matrix entry");
            if (v < 0.0) throw input_error("negative matrix entry at (" + std::to_string(i + 1) +
                                           "," + std::to_string(j + 1) + ")");
        }
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

Matrix load_dense_text(std::istream& in, const std::string& name) {
    std::size_t r = 0, c = 0;
    if (!(in >> r >> c) || r == 0 || c == 0)
        throw input_error(name + ": expected 'rows cols' header");
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            if (!(in >> m(i, j)))
                throw input_error(name + ": truncated entries, expected " +
                                  std::to_string(r * c));
    m.validate();
    return m;
}

Matrix load_matrix_market(std::istream& in, const std::string& name) {
    std::string banner;
    if (!std::getline(in, banner) || lower(banner).rfind("%%matrixmarket", 0) != 0)
        throw input_error(name + ": missing MatrixMarket banner");
    std::istringstream hs(banner.substr(2));
    std::string tag, object, layout, field, symmetry;
    hs >> tag >> object >> layout >> field >> symmetry;
    object = lower(object);
    layout = lower(layout);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") throw input_error(name + ": unsupported object '" + object + "'");
    if (field != "real" && field != "integer" && field != "pattern")
        throw input_error(name + ": unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        throw input_error(name + ": unsupported symmetry '" + symmetry + "'");

    std::string line;
    auto next_data_line = [&](std::string& out) {
        while (std::getline(in, line)) {
            std::size_t pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '%') continue;
            out = line;
            return true;
        }
        return false;
    };

    if (!next_data_line(line)) throw input_error(name + ": missing size line");
    std::istringstream sz(line);

    if (layout == "coordinate") {
        std::size_t r = 0, c = 0, nnz = 0;
        if (!(sz >> r >> c >> nnz) || r == 0 || c == 0)
            throw input_error(name + ": bad coordinate size line");
        Matrix m(r, c);
        for (std::size_t k = 0; k < nnz; ++k) {
            if (!next_data_line(line)) throw input_error(name + ": truncated coordinate data");
            std::istringstream es(line);
            std::size_t i = 0, j = 0;
            double v = 1.0;
            if (!(es >> i >> j)) throw input_error(name + ": bad coordinate entry");
            if (field != "pattern" && !(es >> v))
                throw input_error(name + ": coordinate entry missing value");
            if (i < 1 || i > r || j < 1 || j > c)
                throw input_error(name + ": coordinate index out of range");
            m(i - 1, j - 1) = v;
            if (symmetry == "symmetric") m(j - 1, i - 1) = v;
        }
        m.validate();
        return m;
    }
    if (layout == "array") {
        if (field == "pattern") throw input_error(name + ": array/pattern is not a valid combination");
        std::size_t r = 0, c = 0;
        if (!(sz >> r >> c) || r == 0 || c == 0)
            throw input_error(name + ": bad array size line");
        Matrix m(r, c);
        // array data is column-major; symmetric stores the lower triangle
        for (std::size_t j = 0; j < c; ++j) {
            std::size_t i0 = symmetry == "symmetric" ? j : 0;
            for (std::size_t i = i0; i < r; ++i) {
                double v;
                if (!(in >> v)) throw input_error(name + ": truncated array data");
                m(i, j) = v;
                if (symmetry == "symmetric") m(j, i) = v;
            }
        }
        m.validate();
        return m;
    }
    throw input_error(name + ": unsupported layout '" + layout + "'");
}

} // namespace

Matrix load_matrix(const std::filesystem::path& path, std::optional<MatrixFormat> format) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path.string());
    if (!format) {
        int c = in.peek();
        format = (c == '%') ? MatrixFormat::MatrixMarket : MatrixFormat::DenseText;
    }
    return *format == MatrixFormat::DenseText ? load_dense_text(in, path.string())
                                              : load_matrix_market(in, path.string());
}

void save_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot write " + path.string());
    out.precision(17);
    if (format == MatrixFormat::DenseText) {
        out << m.rows() << ' ' << m.cols() << '\n';
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j)
                out << (j ? " " : "") << m(i, j);
            out << '\n';
        }
    } else {
        out << "%%MatrixMarket matrix array real general\n";
        out << m.rows() << ' ' << m.cols() << '\n';
        for (std::size_t j = 0; j < m.cols(); ++j)
            for (std::size_t i = 0; i < m.rows(); ++i)
                out << m(i, j) << '\n';
    }
    if (!out) throw input_error("write failure on " + path.string());
}

std::string InstanceSpec::name() const {
    switch (cls) {
        case InstanceClass::Uniform:
            return "uniform-n" + std::to_string(n) + "-s" + std::to_string(seed);
        case InstanceClass::BlockDiagonal:
            return "blockdiag-n" + std::to_string(n) + "-s" + std::to_string(seed);
        case InstanceClass::Bernoulli: {
            std::ostringstream os;
            os << "bernoulli-p" << p << "-n" << n << "-s" << seed;
            return os.str();
        }
        case InstanceClass::Staircase:
            return "staircase-n" + std::to_string(n);
        case InstanceClass::File:
            return path.stem().string();
    }
    return "?";
}

InstanceClass instance_class_from_string(const std::string& s) {
    std::string t = lower(s);
    if (t == "uniform") return InstanceClass::Uniform;
    if (t == "blockdiag" || t == "block-diagonal" || t == "blockdiagonal")
        return InstanceClass::BlockDiagonal;
    if (t == "bernoulli") return InstanceClass::Bernoulli;
    if (t == "staircase") return InstanceClass::Staircase;
    if (t == "file") return InstanceClass::File;
    throw input_error("unknown instance class '" + s + "'");
}

Matrix generate(const InstanceSpec& spec) {
    if (spec.cls == InstanceClass::File) {
        if (spec.path.empty()) throw input_error("File instance needs a path");
        return load_matrix(spec.path);
    }
    if (spec.n == 0) throw input_error("instance order n must be >= 1");
    if (spec.cls == InstanceClass::Bernoulli && (spec.p < 0.0 || spec.p > 1.0))
        throw input_error("Bernoulli probability must lie in [0,1]");

    std::size_t n = spec.n;
    Matrix m(n, n);
    rng::Engine eng = rng::derive(spec.seed, 0);
    switch (spec.cls) {
        case InstanceClass::Uniform:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = rng::uniform01(eng);
            break;
        case InstanceClass::Bernoulli:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    m(i, j) = rng::uniform01(eng) < spec.p ? 1.0 : 0.0;
            break;
        case InstanceClass::BlockDiagonal: {
            if (spec.block == 0) throw input_error("block order must be >= 1");
            for (std::size_t start = 0; start < n; start += spec.block) {
                std::size_t b = std::min(spec.block, n - start);
                for (std::size_t i = 0; i < b; ++i)
                    for (std::size_t j = 0; j < b; ++j)
                        m(start + i, start + j) = rng::uniform01(eng);
            }
            break;
        }
        case InstanceClass::Staircase:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    m(i, j) = (i + 1) + (j + 1) <= n + 2 ? 1.0 : 0.0;
            break;
        case InstanceClass::File:
            break; // handled above
    }
    return m;
}

} // namespace perm
