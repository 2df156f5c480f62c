#pragma once
// Sparse coordinate-pair (COO) matrix: an index list plus a parallel weight
// vector. Entries are kept sorted row-major and unique; lookups of absent
// pairs read as zero. This is the only sparse format in the engine.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "kbhop/dense.hpp"
#include "kbhop/errors.hpp"

namespace kbhop {

struct CooEntry {
    std::uint32_t row;
    std::uint32_t col;
    double w;
};

class CooMatrix {
public:
    CooMatrix() = default;
    CooMatrix(std::size_t n_rows, std::size_t n_cols) : n_rows_(n_rows), n_cols_(n_cols) {}

    // Sorts row-major and collapses duplicate coordinates by accumulation.
    static CooMatrix from_entries(std::size_t n_rows, std::size_t n_cols,
                                  std::vector<CooEntry> entries) {
        CooMatrix m(n_rows, n_cols);
        std::sort(entries.begin(), entries.end(), [](const CooEntry& a, const CooEntry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        for (const CooEntry& e : entries) {
            if (e.row >= n_rows || e.col >= n_cols)
                throw DimensionMismatch("coo entry out of bounds");
            if (!m.entries_.empty() && m.entries_.back().row == e.row &&
                m.entries_.back().col == e.col) {
                m.entries_.back().w += e.w;
            } else {
                m.entries_.push_back(e);
            }
        }
        return m;
    }

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return n_cols_; }
    std::size_t nnz() const { return entries_.size(); }
    const std::vector<CooEntry>& entries() const { return entries_; }

    double at(std::size_t i, std::size_t j) const {
        CooEntry probe{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), 0.0};
        auto it = std::lower_bound(entries_.begin(), entries_.end(), probe,
                                   [](const CooEntry& a, const CooEntry& b) {
                                       return a.row != b.row ? a.row < b.row : a.col < b.col;
                                   });
        if (it != entries_.end() && it->row == i && it->col == j) return it->w;
        return 0.0;
    }

    DenseMatrix to_dense() const {
        DenseMatrix out(n_rows_, n_cols_);
        for (const CooEntry& e : entries_) out(e.row, e.col) += e.w;
        return out;
    }

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<CooEntry> entries_;
};

// spmm: sparse-dense product with the sparse operand on the left.
// transpose_a=false computes a*x, transpose_a=true computes a^T*x; both
// orientations are defined directly instead of materializing a transpose.
inline DenseMatrix spmm(const CooMatrix& a, const DenseMatrix& x, bool transpose_a = false) {
    const std::size_t inner = transpose_a ? a.n_rows() : a.n_cols();
    const std::size_t out_rows = transpose_a ? a.n_cols() : a.n_rows();
    if (inner != x.rows()) throw DimensionMismatch("spmm: inner dims differ");
    DenseMatrix out(out_rows, x.cols());
    const std::size_t c = x.cols();
    for (const CooEntry& e : a.entries()) {
        const std::size_t to = transpose_a ? e.col : e.row;
        const std::size_t from = transpose_a ? e.row : e.col;
        const double* src = x.row(from);
        double* dst = out.row(to);
        for (std::size_t j = 0; j < c; ++j) dst[j] += e.w * src[j];
    }
    return out;
}

// dense_spmm: sparse-dense product with the dense operand on the left,
// x*a or x*a^T. Iterates batch rows outermost so each dense row stays hot.
inline DenseMatrix dense_spmm(const DenseMatrix& x, const CooMatrix& a,
                              bool transpose_a = false) {
    const std::size_t inner = transpose_a ? a.n_cols() : a.n_rows();
    const std::size_t out_cols = transpose_a ? a.n_rows() : a.n_cols();
    if (x.cols() != inner) throw DimensionMismatch("dense_spmm: inner dims differ");
    DenseMatrix out(x.rows(), out_cols);
    const auto& es = a.entries();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* src = x.row(i);
        double* dst = out.row(i);
        if (transpose_a) {
            for (const CooEntry& e : es) dst[e.row] += e.w * src[e.col];
        } else {
            for (const CooEntry& e : es) dst[e.col] += e.w * src[e.row];
        }
    }
    return out;
}

// Weighted sum of COO matrices of a common shape.
inline CooMatrix coo_weighted_sum(std::size_t n_rows, std::size_t n_cols,
                                  const std::vector<std::pair<const CooMatrix*, double>>& terms) {
    std::vector<CooEntry> all;
    std::size_t total = 0;
    for (const auto& [m, w] : terms) total += m->nnz();
    all.reserve(total);
    for (const auto& [m, w] : terms) {
        if (m->n_rows() != n_rows || m->n_cols() != n_cols)
            throw DimensionMismatch("coo_weighted_sum: shapes differ");
        if (w == 0.0) continue;
        for (const CooEntry& e : m->entries()) all.push_back({e.row, e.col, w * e.w});
    }
    return CooMatrix::from_entries(n_rows, n_cols, std::move(all));
}

} // namespace kbhop
