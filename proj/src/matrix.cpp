#include "bbleed/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bbleed {

static_assert(std::endian::native == std::endian::little,
              "BBMX io assumes a little-endian host");

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), entries_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("DenseMatrix: zero dimension");
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("DenseMatrix: zero dimension");
    if (entries_.size() != rows * cols)
        throw std::invalid_argument("DenseMatrix: entries length != rows*cols");
}

bool DenseMatrix::all_nonnegative() const {
    return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v >= 0.0; });
}

namespace {
constexpr char kMagic[4] = {'B', 'B', 'M', 'X'};
}

void write_bbmx(const DenseMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out.write(kMagic, 4);
    const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write: " + path.string());
}

DenseMatrix read_bbmx(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a BBMX file: " + path.string());
    std::uint32_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!in || rows == 0 || cols == 0)
        throw std::runtime_error("bad BBMX header: " + path.string());
    std::vector<double> entries(static_cast<std::size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(entries.data()),
            static_cast<std::streamsize>(entries.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated BBMX payload: " + path.string());
    return DenseMatrix(rows, cols, std::move(entries));
}

void write_csv(const DenseMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out.precision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << m(r, c);
        }
        out << '\n';
    }
}

DenseMatrix read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::vector<double> entries;
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t this_cols = 0;
        while (std::getline(ss, cell, ',')) {
            entries.push_back(std::stod(cell));
            ++this_cols;
        }
        if (rows == 0) {
            cols = this_cols;
        } else if (this_cols != cols) {
            throw std::runtime_error("ragged CSV row in " + path.string());
        }
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("empty CSV: " + path.string());
    return DenseMatrix(rows, cols, std::move(entries));
}

}  // namespace bbleed
