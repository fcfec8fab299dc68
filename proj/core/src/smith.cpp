#include "kgring/smith.hpp"

#include <algorithm>

namespace kgring {

namespace {

struct ZMat {
    std::size_t rows = 0, cols = 0;
    std::vector<Int> e;
    ZMat(std::size_t r, std::size_t c) : rows(r), cols(c), e(r * c) {}
    Int& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return e[i * cols + j]; }
};

// Clears denominators row by row; row scaling never changes kernels or
// solvability over a domain when the right-hand side is scaled along.
ZMat to_integer_rows(const QMat& a, QMat* rhs) {
    ZMat z(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Int l = 1;
        for (std::size_t j = 0; j < a.cols(); ++j) l = lcm(l, denominator(a(i, j)));
        if (rhs)
            for (std::size_t j = 0; j < rhs->cols(); ++j) l = lcm(l, denominator((*rhs)(i, j)));
        for (std::size_t j = 0; j < a.cols(); ++j) {
            Rat x = a(i, j) * l;
            z.at(i, j) = numerator(x);
        }
        if (rhs)
            for (std::size_t j = 0; j < rhs->cols(); ++j) (*rhs)(i, j) *= l;
    }
    return z;
}

void add_col(ZMat& a, std::size_t dst, std::size_t src, const Int& f) {
    if (f == 0) return;
    for (std::size_t i = 0; i < a.rows; ++i) a.at(i, dst) += f * a.at(i, src);
}

void swap_cols(ZMat& a, std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t r = 0; r < a.rows; ++r) std::swap(a.at(r, i), a.at(r, j));
}

// Column echelon reduction: transforms a in place to a*V with V unimodular,
// so that the nonzero columns form a staircase by pivot row.  Returns the
// list of (pivot row, pivot col) pairs.
std::vector<std::pair<std::size_t, std::size_t>> column_echelon(ZMat& a, ZMat& v) {
    std::vector<std::pair<std::size_t, std::size_t>> pivots;
    std::size_t lead = 0;
    for (std::size_t row = 0; row < a.rows && lead < a.cols; ++row) {
        // Euclid across columns [lead, cols) on this row.
        while (true) {
            std::size_t best = a.cols;
            for (std::size_t j = lead; j < a.cols; ++j) {
                const Int& x = a.at(row, j);
                if (x == 0) continue;
                if (best == a.cols || abs_int(x) < abs_int(a.at(row, best))) best = j;
            }
            if (best == a.cols) break;  // row is zero past lead
            swap_cols(a, lead, best);
            swap_cols(v, lead, best);
            bool clean = true;
            const Int p = a.at(row, lead);
            for (std::size_t j = lead + 1; j < a.cols; ++j) {
                const Int& x = a.at(row, j);
                if (x == 0) continue;
                Int q = x / p;
                add_col(a, j, lead, -q);
                add_col(v, j, lead, -q);
                if (a.at(row, j) != 0) clean = false;
            }
            if (clean) break;
        }
        if (a.at(row, lead) != 0) {
            if (a.at(row, lead) < 0) {
                for (std::size_t i = 0; i < a.rows; ++i) a.at(i, lead) = -a.at(i, lead);
                for (std::size_t i = 0; i < v.rows; ++i) v.at(i, lead) = -v.at(i, lead);
            }
            pivots.emplace_back(row, lead);
            ++lead;
        }
    }
    return pivots;
}

QMat to_qmat(const ZMat& z) {
    QMat q(z.rows, z.cols);
    for (std::size_t i = 0; i < z.rows; ++i)
        for (std::size_t j = 0; j < z.cols; ++j) q(i, j) = Rat(z.at(i, j));
    return q;
}

}  // namespace

SmithForm smith_normal_form(const QMat& a) {
    if (!a.is_integral()) throw kg_error("smith_normal_form requires integer entries");
    const std::size_t m = a.rows(), n = a.cols();
    ZMat d(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) d.at(i, j) = numerator(a(i, j));
    ZMat u(m, m), v(n, n);
    for (std::size_t i = 0; i < m; ++i) u.at(i, i) = 1;
    for (std::size_t j = 0; j < n; ++j) v.at(j, j) = 1;

    auto add_row = [&](ZMat& z, std::size_t dst, std::size_t src, const Int& f) {
        if (f == 0) return;
        for (std::size_t j = 0; j < z.cols; ++j) z.at(dst, j) += f * z.at(src, j);
    };
    auto swap_rows = [&](ZMat& z, std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < z.cols; ++c) std::swap(z.at(i, c), z.at(j, c));
    };

    const std::size_t nmin = std::min(m, n);
    for (std::size_t t = 0; t < nmin; ++t) {
        while (true) {
            // Smallest nonzero entry of the trailing submatrix to (t, t).
            std::size_t bi = m, bj = n;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j) {
                    const Int& x = d.at(i, j);
                    if (x == 0) continue;
                    if (bi == m || abs_int(x) < abs_int(d.at(bi, bj))) { bi = i; bj = j; }
                }
            if (bi == m) { t = nmin; break; }  // trailing block is zero
            swap_rows(d, t, bi); swap_rows(u, t, bi);
            swap_cols(d, t, bj); swap_cols(v, t, bj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                Int q = d.at(i, t) / d.at(t, t);
                add_row(d, i, t, -q); add_row(u, i, t, -q);
                if (d.at(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                Int q = d.at(t, j) / d.at(t, t);
                add_col(d, j, t, -q); add_col(v, j, t, -q);
                if (d.at(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            // Divisibility of the remaining block by the pivot.
            std::size_t ri = m, rj = n;
            for (std::size_t i = t + 1; i < m && ri == m; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (d.at(i, j) % d.at(t, t) != 0) { ri = i; rj = j; break; }
            if (ri == m) {
                if (d.at(t, t) < 0) {
                    for (std::size_t j = 0; j < n; ++j) d.at(t, j) = -d.at(t, j);
                    for (std::size_t j = 0; j < m; ++j) u.at(t, j) = -u.at(t, j);
                }
                break;
            }
            add_row(d, t, ri, 1); add_row(u, t, ri, 1);
        }
        if (t >= nmin) break;
    }
    return SmithForm{to_qmat(u), to_qmat(d), to_qmat(v)};
}

QMat kernel(const QMat& a, const Int& m) {
    (void)m;  // the integer kernel basis also generates the Z[1/m] kernel
    if (a.cols() == 0) return QMat(0, 0);
    ZMat z = to_integer_rows(a, nullptr);
    ZMat v(a.cols(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) v.at(j, j) = 1;
    auto pivots = column_echelon(z, v);
    std::size_t rank = pivots.size();
    QMat k(a.cols(), a.cols() - rank);
    for (std::size_t j = rank; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.cols(); ++i) k(i, j - rank) = Rat(v.at(i, j));
    return k;
}

std::optional<QMat> solve_matrix(const QMat& a, const QMat& b, const Int& m) {
    if (a.rows() != b.rows()) throw kg_error("solve dimension mismatch");
    QMat rhs = b;
    ZMat z = to_integer_rows(a, &rhs);
    ZMat v(a.cols(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) v.at(j, j) = 1;
    auto pivots = column_echelon(z, v);

    QMat y(a.cols(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        // Forward substitution over the staircase; candidates are forced.
        for (std::size_t k = 0; k < pivots.size(); ++k) {
            auto [pr, pc] = pivots[k];
            Rat acc = rhs(pr, c);
            for (std::size_t j = 0; j < k; ++j) {
                const Int& h = z.at(pr, pivots[j].second);
                if (h != 0) acc -= Rat(h) * y(pivots[j].second, c);
            }
            Rat cand = acc / Rat(z.at(pr, pc));
            if (!is_smooth(denominator(cand), m)) return std::nullopt;
            y(pc, c) = cand;
        }
        // Consistency on the non-pivot rows.
        for (std::size_t i = 0; i < a.rows(); ++i) {
            Rat acc = rhs(i, c);
            for (auto [pr, pc] : pivots) {
                (void)pr;
                if (z.at(i, pc) != 0) acc -= Rat(z.at(i, pc)) * y(pc, c);
            }
            if (acc != 0) return std::nullopt;
        }
    }
    QMat x(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t c = 0; c < b.cols(); ++c) {
            Rat acc;
            for (std::size_t j = 0; j < a.cols(); ++j)
                if (v.at(i, j) != 0 && y(j, c) != 0) acc += Rat(v.at(i, j)) * y(j, c);
            x(i, c) = acc;
        }
    return x;
}

std::optional<std::vector<Rat>> solve(const QMat& a, const std::vector<Rat>& b, const Int& m) {
    auto r = solve_matrix(a, QMat::column(b), m);
    if (!r) return std::nullopt;
    return r->col(0);
}

QMat column_span_basis(const QMat& g, const Int& m) {
    if (g.cols() == 0) return QMat(g.rows(), 0);
    ZMat z = to_integer_rows(g, nullptr);
    // Row scaling changes the span, so undo it: reduce the original columns
    // instead, tracking the column transform computed on the integer model.
    ZMat v(g.cols(), g.cols());
    for (std::size_t j = 0; j < g.cols(); ++j) v.at(j, j) = 1;
    auto pivots = column_echelon(z, v);
    QMat vq = to_qmat(v);
    QMat h = g * vq;
    QMat basis = h.col_range(0, pivots.size());
    // Strip unit content (powers of primes dividing m) to keep entries small.
    for (std::size_t j = 0; j < basis.cols(); ++j) {
        Int num_gcd = 0;
        Int den_lcm = 1;
        for (std::size_t i = 0; i < basis.rows(); ++i) {
            num_gcd = gcd(num_gcd, numerator(basis(i, j)));
            den_lcm = lcm(den_lcm, denominator(basis(i, j)));
        }
        if (num_gcd == 0 || !is_smooth(den_lcm, m)) continue;
        Int smooth_part = num_gcd / coprime_part(num_gcd, m);
        Rat unit(den_lcm, smooth_part);
        if (unit == 1) continue;
        for (std::size_t i = 0; i < basis.rows(); ++i) basis(i, j) *= unit;
    }
    return basis;
}

}  // namespace kgring
