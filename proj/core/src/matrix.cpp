#include "kgring/matrix.hpp"

#include <sstream>

namespace kgring {

Rat parse_fraction(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw kg_error("fraction with zero denominator: " + s);
        return Rat(num, den);
    } catch (const std::exception& e) {
        throw kg_error("cannot parse fraction '" + s + "': " + e.what());
    }
}

std::string fraction_to_string(const Rat& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << '/' << denominator(r);
    return os.str();
}

QMat::QMat(std::initializer_list<std::initializer_list<Rat>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    e_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        if (row.size() != cols_) throw kg_error("ragged matrix initializer");
        for (const auto& x : row) e_.push_back(x);
    }
}

QMat QMat::identity(std::size_t n) {
    QMat a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1;
    return a;
}

QMat QMat::column(const std::vector<Rat>& v) {
    QMat a(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) a(i, 0) = v[i];
    return a;
}

QMat QMat::diag(const std::vector<Rat>& d) {
    QMat a(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
    return a;
}

QMat QMat::operator*(const QMat& o) const {
    if (cols_ != o.rows_) throw kg_error("matrix product dimension mismatch");
    QMat r(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Rat& a = (*this)(i, k);
            if (a == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) {
                const Rat& b = o(k, j);
                if (b != 0) r(i, j) += a * b;
            }
        }
    return r;
}

QMat QMat::operator+(const QMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw kg_error("matrix sum dimension mismatch");
    QMat r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] += o.e_[i];
    return r;
}

QMat QMat::operator-(const QMat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw kg_error("matrix difference dimension mismatch");
    QMat r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
    return r;
}

QMat QMat::operator-() const {
    QMat r = *this;
    for (auto& x : r.e_) x = -x;
    return r;
}

QMat QMat::operator*(const Rat& c) const {
    QMat r = *this;
    for (auto& x : r.e_) x *= c;
    return r;
}

QMat QMat::transposed() const {
    QMat r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

bool QMat::is_zero() const {
    for (const auto& x : e_)
        if (x != 0) return false;
    return true;
}

bool QMat::is_identity() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

bool QMat::is_integral() const {
    for (const auto& x : e_)
        if (denominator(x) != 1) return false;
    return true;
}

bool QMat::is_smooth(const Int& m) const {
    for (const auto& x : e_)
        if (!kgring::is_smooth(denominator(x), m)) return false;
    return true;
}

QMat QMat::col_range(std::size_t lo, std::size_t hi) const {
    QMat r(rows_, hi - lo);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = lo; j < hi; ++j) r(i, j - lo) = (*this)(i, j);
    return r;
}

QMat QMat::row_range(std::size_t lo, std::size_t hi) const {
    QMat r(hi - lo, cols_);
    for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(i - lo, j) = (*this)(i, j);
    return r;
}

std::vector<Rat> QMat::col(std::size_t j) const {
    std::vector<Rat> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void QMat::set_col(std::size_t j, const std::vector<Rat>& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

QMat QMat::hstack(const QMat& a, const QMat& b) {
    if (a.cols_ == 0 && a.rows_ == 0) return b;
    if (b.cols_ == 0 && b.rows_ == 0) return a;
    if (a.rows_ != b.rows_) throw kg_error("hstack row mismatch");
    QMat r(a.rows_, a.cols_ + b.cols_);
    r.paste(0, 0, a);
    r.paste(0, a.cols_, b);
    return r;
}

QMat QMat::vstack(const QMat& a, const QMat& b) {
    if (a.cols_ == 0 && a.rows_ == 0) return b;
    if (b.cols_ == 0 && b.rows_ == 0) return a;
    if (a.cols_ != b.cols_) throw kg_error("vstack column mismatch");
    QMat r(a.rows_ + b.rows_, a.cols_);
    r.paste(0, 0, a);
    r.paste(a.rows_, 0, b);
    return r;
}

void QMat::paste(std::size_t i, std::size_t j, const QMat& a) {
    for (std::size_t r = 0; r < a.rows_; ++r)
        for (std::size_t c = 0; c < a.cols_; ++c) (*this)(i + r, j + c) = a(r, c);
}

void QMat::swap_rows(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
}

void QMat::swap_cols(std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
}

Int QMat::denominator_lcm() const {
    Int l = 1;
    for (const auto& x : e_) l = lcm(l, denominator(x));
    return l;
}

std::string QMat::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        if (i) os << "; ";
        for (std::size_t j = 0; j < cols_; ++j) {
            if (j) os << ' ';
            os << fraction_to_string((*this)(i, j));
        }
    }
    os << ']';
    return os.str();
}

std::vector<Rat> mat_vec(const QMat& a, const std::vector<Rat>& x) {
    if (a.cols() != x.size()) throw kg_error("mat_vec dimension mismatch");
    std::vector<Rat> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0 && x[j] != 0) y[i] += a(i, j) * x[j];
    return y;
}

}  // namespace kgring
