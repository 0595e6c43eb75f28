#pragma once
// Dense row-major matrix of doubles, used for both similarity matrices
// and embedding matrices, plus the shared binary file format:
//
//   magic, version, rows, cols   as little-endian uint64
//   rows*cols doubles             row-major, little-endian IEEE-754
//
// Embedding files and similarity-matrix files use the same layout and
// differ only in the magic tag.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace kgalign {

constexpr std::uint64_t kEmbeddingMagic = 0x31424D4541474Bull; // "KGAEMB1"
constexpr std::uint64_t kMatrixMagic = 0x3154414D41474Bull;    // "KGAMAT1"
constexpr std::uint64_t kFormatVersion = 1;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline void put_f64(std::ostream& out, double d) {
    put_u64(out, std::bit_cast<std::uint64_t>(d));
}

inline double get_f64(std::istream& in) {
    return std::bit_cast<double>(get_u64(in));
}

} // namespace detail

inline void save_matrix(const Matrix& m, const std::string& path,
                        std::uint64_t magic = kMatrixMagic) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    detail::put_u64(out, magic);
    detail::put_u64(out, kFormatVersion);
    detail::put_u64(out, m.rows());
    detail::put_u64(out, m.cols());
    for (double d : m.data()) detail::put_f64(out, d);
    if (!out) throw DataError("short write to " + path);
}

inline Matrix load_matrix(const std::string& path,
                          std::uint64_t magic = kMatrixMagic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::uint64_t got_magic = detail::get_u64(in);
    std::uint64_t version = detail::get_u64(in);
    std::uint64_t rows = detail::get_u64(in);
    std::uint64_t cols = detail::get_u64(in);
    if (!in || got_magic != magic)
        throw DataError(path + ": bad magic (not a matrix file of the expected kind)");
    if (version != kFormatVersion)
        throw DataError(path + ": unsupported format version");
    Matrix m(rows, cols);
    for (double& d : m.data()) d = detail::get_f64(in);
    if (!in) throw DataError(path + ": truncated matrix data");
    return m;
}

inline void save_embedding(const Matrix& m, const std::string& path) {
    save_matrix(m, path, kEmbeddingMagic);
}

inline Matrix load_embedding(const std::string& path) {
    return load_matrix(path, kEmbeddingMagic);
}

} // namespace kgalign
