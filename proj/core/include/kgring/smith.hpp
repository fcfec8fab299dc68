#pragma once

#include "kgring/matrix.hpp"

#include <optional>

namespace kgring {

struct SmithForm {
    QMat u, d, v;  // u*a*v = d, u and v unimodular, d diagonal with d1 | d2 | ...
};

// Smith normal form of an integer matrix.  Throws on non-integral input.
SmithForm smith_normal_form(const QMat& a);

// Basis of { x : a*x = 0 } as a Z[1/m]-module (saturated); columns are
// linearly independent.  Accepts rational entries with m-smooth denominators.
QMat kernel(const QMat& a, const Int& m);

// Some x with a*x = b over Z[1/m], if one exists.
std::optional<std::vector<Rat>> solve(const QMat& a, const std::vector<Rat>& b, const Int& m);

// Columnwise solve: x with a*x = b, all columns simultaneously.
std::optional<QMat> solve_matrix(const QMat& a, const QMat& b, const Int& m);

// Basis for the column span of g over Z[1/m] (independent columns, same span).
QMat column_span_basis(const QMat& g, const Int& m);

}  // namespace kgring
