#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace bbleed {

/// Row-major dense matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return entries_.size(); }

    double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }

    const double* data() const { return entries_.data(); }
    double* data() { return entries_.data(); }
    const std::vector<double>& entries() const { return entries_; }

    bool all_nonnegative() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

// Binary layout: magic "BBMX", u32 rows, u32 cols, then rows*cols
// little-endian 64-bit floats, row-major.
void write_bbmx(const DenseMatrix& m, const std::filesystem::path& path);
DenseMatrix read_bbmx(const std::filesystem::path& path);

void write_csv(const DenseMatrix& m, const std::filesystem::path& path);
DenseMatrix read_csv(const std::filesystem::path& path);

}  // namespace bbleed
