#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstring>
#include <initializer_list>

#include "mlb/error.hpp"

namespace mlb {

// Dense row-major matrix of doubles.  Small matrices (up to 4 entries, e.g.
// the 1x2 states flowing through a neural-ODE solve) live inline without a
// heap allocation; larger buffers go through new[].  Row-major layout matches
// the on-disk checkpoint format and lets Eigen::Map wrap the storage for the
// heavy matrix products.
class Mat {
  public:
    Mat() : rows_(0), cols_(0), data_(sbo_) {}

    Mat(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0)
            throw BadShape("Mat: negative dimension");
        data_ = allocate(static_cast<std::size_t>(rows) * cols);
        std::fill(data_, data_ + size(), 0.0);
    }

    Mat(int rows, int cols, double fill_value) : Mat(rows, cols) {
        std::fill(data_, data_ + size(), fill_value);
    }

    // Row-major initializer: Mat(2, 2, {a, b, c, d}) is [[a,b],[c,d]].
    Mat(int rows, int cols, std::initializer_list<double> values) : Mat(rows, cols) {
        if (static_cast<std::size_t>(size()) != values.size())
            throw BadShape("Mat: initializer size does not match dimensions");
        std::copy(values.begin(), values.end(), data_);
    }

    static Mat scalar(double v) { return Mat(1, 1, {v}); }

    Mat(const Mat& other) : rows_(other.rows_), cols_(other.cols_) {
        data_ = allocate(static_cast<std::size_t>(size()));
        std::memcpy(data_, other.data_, sizeof(double) * size());
    }

    Mat(Mat&& other) noexcept : rows_(other.rows_), cols_(other.cols_) {
        if (other.on_heap()) {
            data_ = other.data_;
            other.data_ = other.sbo_;
        } else {
            data_ = sbo_;
            std::memcpy(sbo_, other.sbo_, sizeof(sbo_));
        }
        other.rows_ = other.cols_ = 0;
    }

    Mat& operator=(const Mat& other) {
        if (this == &other)
            return *this;
        release();
        rows_ = other.rows_;
        cols_ = other.cols_;
        data_ = allocate(static_cast<std::size_t>(size()));
        std::memcpy(data_, other.data_, sizeof(double) * size());
        return *this;
    }

    Mat& operator=(Mat&& other) noexcept {
        if (this == &other)
            return *this;
        release();
        rows_ = other.rows_;
        cols_ = other.cols_;
        if (other.on_heap()) {
            data_ = other.data_;
            other.data_ = other.sbo_;
        } else {
            data_ = sbo_;
            std::memcpy(sbo_, other.sbo_, sizeof(sbo_));
        }
        other.rows_ = other.cols_ = 0;
        return *this;
    }

    ~Mat() { release(); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return rows_ * cols_; }
    bool empty() const { return size() == 0; }
    bool is_scalar() const { return rows_ == 1 && cols_ == 1; }

    double* data() { return data_; }
    const double* data() const { return data_; }

    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    double& operator[](int i) { return data_[i]; }
    double operator[](int i) const { return data_[i]; }

    void set_zero() { std::fill(data_, data_ + size(), 0.0); }

    bool same_shape(const Mat& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

  private:
    static constexpr int kInline = 4;

    double* allocate(std::size_t n) {
        return n > kInline ? new double[n] : sbo_;
    }

    bool on_heap() const { return data_ != sbo_; }

    void release() {
        if (on_heap())
            delete[] data_;
        data_ = sbo_;
    }

    int rows_;
    int cols_;
    double sbo_[kInline];
    double* data_;
};

using EigenRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<EigenRowMajor> emap(Mat& m) {
    return Eigen::Map<EigenRowMajor>(m.data(), m.rows(), m.cols());
}

inline Eigen::Map<const EigenRowMajor> emap(const Mat& m) {
    return Eigen::Map<const EigenRowMajor>(m.data(), m.rows(), m.cols());
}

// out = a * b.  Shapes must conform; out is resized by assignment.
inline void matmul_into(const Mat& a, const Mat& b, Mat& out) {
    if (a.cols() != b.rows())
        throw ShapeMismatch("matmul: inner dimensions disagree");
    if (out.rows() != a.rows() || out.cols() != b.cols())
        out = Mat(a.rows(), b.cols());
    emap(out).noalias() = emap(a) * emap(b);
}

} // namespace mlb
