#pragma once
// Row-major dense matrix in double precision, plus the elementwise kernels
// shared by the follow strategies. Every allocation is tracked by the
// instrumentation counters in kbhop::mem so benchmarks can report
// intermediate sizes without touching process RSS.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "kbhop/errors.hpp"

namespace kbhop {

namespace mem {

// live: currently allocated elements; peak: max of live since reset;
// cumulative: total elements ever allocated since reset.
inline std::atomic<std::int64_t> live{0};
inline std::atomic<std::int64_t> peak{0};
inline std::atomic<std::int64_t> cumulative{0};

inline void on_alloc(std::int64_t n) {
    if (n == 0) return;
    cumulative.fetch_add(n, std::memory_order_relaxed);
    std::int64_t now = live.fetch_add(n, std::memory_order_relaxed) + n;
    std::int64_t p = peak.load(std::memory_order_relaxed);
    while (now > p && !peak.compare_exchange_weak(p, now, std::memory_order_relaxed)) {
    }
}

inline void on_free(std::int64_t n) {
    if (n != 0) live.fetch_sub(n, std::memory_order_relaxed);
}

inline void reset() {
    live.store(0);
    peak.store(0);
    cumulative.store(0);
}

inline std::int64_t peak_elements() { return peak.load(); }
inline std::int64_t cumulative_elements() { return cumulative.load(); }
inline std::int64_t live_elements() { return live.load(); }

} // namespace mem

class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {
        mem::on_alloc(static_cast<std::int64_t>(d_.size()));
    }

    DenseMatrix(const DenseMatrix& o) : rows_(o.rows_), cols_(o.cols_), d_(o.d_) {
        mem::on_alloc(static_cast<std::int64_t>(d_.size()));
    }

    DenseMatrix(DenseMatrix&& o) noexcept
        : rows_(o.rows_), cols_(o.cols_), d_(std::move(o.d_)) {
        o.rows_ = o.cols_ = 0;
        o.d_.clear();
    }

    DenseMatrix& operator=(const DenseMatrix& o) {
        if (this != &o) {
            mem::on_free(static_cast<std::int64_t>(d_.size()));
            rows_ = o.rows_;
            cols_ = o.cols_;
            d_ = o.d_;
            mem::on_alloc(static_cast<std::int64_t>(d_.size()));
        }
        return *this;
    }

    DenseMatrix& operator=(DenseMatrix&& o) noexcept {
        if (this != &o) {
            mem::on_free(static_cast<std::int64_t>(d_.size()));
            rows_ = o.rows_;
            cols_ = o.cols_;
            d_ = std::move(o.d_);
            o.rows_ = o.cols_ = 0;
            o.d_.clear();
        }
        return *this;
    }

    ~DenseMatrix() { mem::on_free(static_cast<std::int64_t>(d_.size())); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return d_.size(); }
    bool empty() const { return d_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

    double* row(std::size_t i) { return d_.data() + i * cols_; }
    const double* row(std::size_t i) const { return d_.data() + i * cols_; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }

    bool same_shape(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> d_;
};

inline DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("hadamard: shapes differ");
    DenseMatrix out(a.rows(), a.cols());
    const double* pa = a.data();
    const double* pb = b.data();
    double* po = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) po[i] = pa[i] * pb[i];
    return out;
}

inline void add_inplace(DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("add: shapes differ");
    double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] += pb[i];
}

inline DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix out(a);
    add_inplace(out, b);
    return out;
}

inline DenseMatrix scale(const DenseMatrix& a, double s) {
    DenseMatrix out(a.rows(), a.cols());
    const double* pa = a.data();
    double* po = out.data();
    for (std::size_t i = 0; i < a.size(); ++i) po[i] = pa[i] * s;
    return out;
}

// dense-dense product, used by reference code and the tape's linear layers
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dims differ");
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ra = a.row(i);
        double* ro = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double av = ra[k];
            if (av == 0.0) continue;
            const double* rb = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ro[j] += av * rb[j];
        }
    }
    return out;
}

// a^T * b without materializing the transpose
inline DenseMatrix matmul_ta(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("matmul_ta: inner dims differ");
    DenseMatrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ra = a.row(k);
        const double* rb = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            double av = ra[i];
            if (av == 0.0) continue;
            double* ro = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) ro[j] += av * rb[j];
        }
    }
    return out;
}

// a * b^T
inline DenseMatrix matmul_tb(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw DimensionMismatch("matmul_tb: inner dims differ");
    DenseMatrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ra = a.row(i);
        double* ro = out.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* rb = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += ra[k] * rb[k];
            ro[j] = acc;
        }
    }
    return out;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("max_abs_diff: shapes differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.data()[i] - b.data()[i];
        if (d < 0) d = -d;
        if (d > m) m = d;
    }
    return m;
}

} // namespace kbhop
