#pragma once

#include "kgring/numeric.hpp"

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace kgring {

// Dense matrix over the rationals.  All arithmetic is exact; the localization
// invariant (denominators smooth over the inverted modulus) is checked where
// matrices enter from outside, not on every operation.
class QMat {
public:
    QMat() = default;
    QMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}
    QMat(std::initializer_list<std::initializer_list<Rat>> init);

    static QMat identity(std::size_t n);
    static QMat zero(std::size_t rows, std::size_t cols) { return QMat(rows, cols); }
    static QMat column(const std::vector<Rat>& v);
    static QMat diag(const std::vector<Rat>& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rat& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const Rat& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    bool operator==(const QMat& o) const = default;

    QMat operator*(const QMat& o) const;
    QMat operator+(const QMat& o) const;
    QMat operator-(const QMat& o) const;
    QMat operator-() const;
    QMat operator*(const Rat& c) const;
    friend QMat operator*(const Rat& c, const QMat& a) { return a * c; }

    QMat transposed() const;
    bool is_zero() const;
    bool is_identity() const;
    bool is_integral() const;
    bool is_smooth(const Int& m) const;  // all denominators m-smooth

    QMat col_range(std::size_t lo, std::size_t hi) const;  // columns [lo, hi)
    QMat row_range(std::size_t lo, std::size_t hi) const;
    std::vector<Rat> col(std::size_t j) const;
    void set_col(std::size_t j, const std::vector<Rat>& v);

    static QMat hstack(const QMat& a, const QMat& b);
    static QMat vstack(const QMat& a, const QMat& b);
    // Places a at (i, j) inside *this.
    void paste(std::size_t i, std::size_t j, const QMat& a);

    void swap_rows(std::size_t i, std::size_t j);
    void swap_cols(std::size_t i, std::size_t j);

    // Least common multiple of all entry denominators.
    Int denominator_lcm() const;

    std::string to_string() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rat> e_;
};

std::vector<Rat> mat_vec(const QMat& a, const std::vector<Rat>& x);

}  // namespace kgring
