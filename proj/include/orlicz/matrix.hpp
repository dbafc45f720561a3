#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

/// Small dense row-major matrix with inline storage (rows, cols <= 8).
class Matrix {
public:
    static constexpr std::size_t kMaxDim = 8;

    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        if (rows == 0 || cols == 0 || rows > kMaxDim || cols > kMaxDim) {
            throw DomainError("matrix dimensions must lie in [1, 8]");
        }
    }

    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> entries) : Matrix(rows, cols) {
        if (entries.size() != rows * cols) throw DomainError("matrix initializer has the wrong length");
        std::size_t i = 0;
        for (double e : entries) data_[i++] = e;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] std::size_t size() const { return rows_ * cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }

    [[nodiscard]] double norm() const { return std::sqrt(dot(*this, *this)); }

    [[nodiscard]] bool is_zero() const {
        for (std::size_t i = 0; i < size(); ++i) {
            if (data_[i] != 0.0) return false;
        }
        return true;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Matrix& operator*=(double s) {
        for (std::size_t i = 0; i < size(); ++i) data_[i] *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    /// Frobenius inner product A : B.
    friend double dot(const Matrix& a, const Matrix& b) {
        a.check_same(b);
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a.data_[i] * b.data_[i];
        return s;
    }

    friend Matrix matmul(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DomainError("matmul: inner dimensions differ");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        }
        return c;
    }

private:
    void check_same(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DomainError("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::array<double, kMaxDim * kMaxDim> data_{};
};

/// Linear map on n x m matrices, indexed J[(i,j),(k,l)].
class Tensor4 {
public:
    Tensor4(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols * rows * cols, 0.0) {}

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }

    double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[(i * cols_ + j) * rows_ * cols_ + k * cols_ + l];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[(i * cols_ + j) * rows_ * cols_ + k * cols_ + l];
    }

    /// (J B)_{kl} = sum_{ij} J[(i,j),(k,l)] B_{ij}
    [[nodiscard]] Matrix apply(const Matrix& b) const {
        Matrix out(rows_, cols_);
        const std::size_t nm = rows_ * cols_;
        for (std::size_t a = 0; a < nm; ++a) {
            for (std::size_t c = 0; c < nm; ++c) out[c] += data_[a * nm + c] * b[a];
        }
        return out;
    }

    /// B : J : C
    [[nodiscard]] double contract(const Matrix& b, const Matrix& c) const { return dot(apply(b), c); }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

}  // namespace orlicz
