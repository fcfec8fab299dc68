#include "kgring/abgroup.hpp"

#include <algorithm>
#include <sstream>

namespace kgring {

Int AbGroup::order() const {
    if (!is_finite()) throw kg_error("order() on an infinite group");
    Int o = 1;
    for (const auto& d : factors) o *= d;
    return o;
}

std::string AbGroup::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    auto sep = [&] {
        if (!first) os << " + ";
        first = false;
    };
    if (rank > 0) {
        sep();
        if (m == 1)
            os << "Z";
        else
            os << "Z[1/" << m << "]";
        if (rank > 1) os << "^" << rank;
    }
    for (const auto& d : factors) {
        sep();
        os << "Z/" << d;
    }
    return os.str();
}

std::string GradedGroup::to_string() const {
    return "even: " + even.to_string() + ", odd: " + odd.to_string();
}

QMat AbGroup::relation_matrix() const {
    QMat r(ngens(), factors.size());
    for (std::size_t t = 0; t < factors.size(); ++t) r(rank + t, t) = Rat(factors[t]);
    return r;
}

void AbGroup::check_invariants() const {
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i] < 2) throw kg_error("invariant factor < 2");
        if (gcd(factors[i], m) != 1) throw kg_error("invariant factor not coprime to modulus");
        if (i + 1 < factors.size() && factors[i + 1] % factors[i] != 0)
            throw kg_error("invariant factors not a divisibility chain");
    }
}

CanonGroup canonicalize(const Pres& p) {
    if (!p.rels.is_integral()) {
        // Relations may arrive with m-smooth denominators; unit-scale columns.
        QMat cleared = p.rels;
        for (std::size_t j = 0; j < cleared.cols(); ++j) {
            Int l = 1;
            for (std::size_t i = 0; i < cleared.rows(); ++i)
                l = lcm(l, denominator(cleared(i, j)));
            if (!is_smooth(l, p.m)) throw kg_error("relation with non-unit denominator");
            for (std::size_t i = 0; i < cleared.rows(); ++i) cleared(i, j) *= Rat(l);
        }
        return canonicalize(Pres{p.m, p.ngens, cleared});
    }
    SmithForm snf = smith_normal_form(p.rels);
    const std::size_t n = p.ngens;
    // In coordinates y = U x the relation lattice is spanned by diag entries.
    std::vector<Int> orders(n, 0);
    const std::size_t nmin = std::min(snf.d.rows(), snf.d.cols());
    for (std::size_t i = 0; i < nmin; ++i) {
        Int d = numerator(snf.d(i, i));
        orders[i] = coprime_part(d, p.m);  // powers of inverted primes are units
    }
    std::vector<std::size_t> keep_free, keep_tors;
    for (std::size_t i = 0; i < n; ++i) {
        if (orders[i] == 0)
            keep_free.push_back(i);
        else if (orders[i] != 1)
            keep_tors.push_back(i);
    }
    std::sort(keep_tors.begin(), keep_tors.end(),
              [&](std::size_t a, std::size_t b) { return orders[a] < orders[b]; });

    CanonGroup out;
    out.group.m = p.m;
    out.group.rank = keep_free.size();
    for (auto i : keep_tors) out.group.factors.push_back(orders[i]);
    out.group.check_invariants();

    std::vector<std::size_t> sel = keep_free;
    sel.insert(sel.end(), keep_tors.begin(), keep_tors.end());
    out.to_canon = QMat(sel.size(), n);
    for (std::size_t r = 0; r < sel.size(); ++r)
        for (std::size_t c = 0; c < n; ++c) out.to_canon(r, c) = snf.u(sel[r], c);

    auto uinv = solve_matrix(snf.u, QMat::identity(n), Int(1));
    if (!uinv) throw kg_error("unimodular inverse failed");
    out.from_canon = QMat(n, sel.size());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < sel.size(); ++c) out.from_canon(r, c) = (*uinv)(r, sel[c]);
    return out;
}

CanonGroup canonicalize_diagonal(const Int& m, const std::vector<Int>& gen_orders) {
    std::size_t count = 0;
    for (auto& d : gen_orders)
        if (d != 0) ++count;
    QMat rels(gen_orders.size(), count);
    std::size_t c = 0;
    for (std::size_t i = 0; i < gen_orders.size(); ++i)
        if (gen_orders[i] != 0) rels(i, c++) = Rat(gen_orders[i]);
    return canonicalize(Pres{m, gen_orders.size(), rels});
}

std::vector<Rat> normalize_element(const AbGroup& g, std::vector<Rat> v) {
    if (v.size() != g.ngens()) throw kg_error("element dimension mismatch");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!is_smooth(denominator(v[i]), g.m)) throw kg_error("element denominator not a unit");
        Int d = g.gen_order(i);
        if (d == 0) continue;
        auto inv = inverse_mod(denominator(v[i]), d);
        if (!inv) throw kg_error("torsion coordinate denominator not invertible");
        v[i] = Rat(mod_floor(numerator(v[i]) * *inv, d));
    }
    return v;
}

bool element_is_zero(const AbGroup& g, const std::vector<Rat>& v) {
    auto n = normalize_element(g, v);
    return std::all_of(n.begin(), n.end(), [](const Rat& x) { return x == 0; });
}

bool map_is_valid(const QMat& f, const AbGroup& src, const AbGroup& tgt) {
    if (f.rows() != tgt.ngens() || f.cols() != src.ngens()) return false;
    if (!f.is_smooth(src.m)) return false;
    for (std::size_t j = 0; j < src.ngens(); ++j) {
        Int d = src.gen_order(j);
        if (d == 0) continue;
        std::vector<Rat> col = f.col(j);
        for (auto& x : col) x *= Rat(d);
        if (!element_is_zero(tgt, col)) return false;
    }
    return true;
}

QMat normalize_map(const QMat& f, const AbGroup& src, const AbGroup& tgt) {
    QMat r = f;
    for (std::size_t j = 0; j < r.cols(); ++j) {
        auto col = normalize_element(tgt, r.col(j));
        r.set_col(j, col);
    }
    return r;
}

bool maps_equal(const QMat& f, const QMat& g, const AbGroup& src, const AbGroup& tgt) {
    return normalize_map(f, src, tgt) == normalize_map(g, src, tgt);
}

bool map_is_zero(const QMat& f, const AbGroup& src, const AbGroup& tgt) {
    return normalize_map(f, src, tgt).is_zero();
}

bool subgroup_contains(const AbGroup& g, const QMat& big, const QMat& small) {
    return !containment_witness(g, big, small).has_value();
}

std::optional<std::vector<Rat>> containment_witness(const AbGroup& g, const QMat& big,
                                                    const QMat& small) {
    QMat sys = QMat::hstack(big, g.relation_matrix());
    if (sys.cols() == 0) sys = QMat(g.ngens(), 0);
    for (std::size_t j = 0; j < small.cols(); ++j) {
        auto x = solve(sys, small.col(j), g.m);
        if (!x) return small.col(j);
    }
    return std::nullopt;
}

bool subgroup_equal(const AbGroup& g, const QMat& a, const QMat& b) {
    return subgroup_contains(g, a, b) && subgroup_contains(g, b, a);
}

QMat kernel_subgroup(const QMat& f, const AbGroup& src, const AbGroup& tgt) {
    QMat sys = QMat::hstack(f, tgt.relation_matrix());
    QMat full = kernel(sys, src.m);
    QMat proj = full.row_range(0, src.ngens());
    return column_span_basis(proj, src.m);
}

SubgroupPresentation subgroup_to_group(const AbGroup& g, const QMat& s) {
    // Syzygies: { y : s*y lies in the relation lattice of g }.
    QMat sys = QMat::hstack(s, g.relation_matrix());
    QMat full = kernel(sys, g.m);
    QMat syz = full.row_range(0, s.cols());
    CanonGroup cg = canonicalize(Pres{g.m, s.cols(), column_span_basis(syz, g.m)});
    SubgroupPresentation out;
    out.group = cg.group;
    out.inclusion = s * cg.from_canon;
    return out;
}

CanonGroup quotient_group(const AbGroup& g, const QMat& gens, const QMat& rels) {
    QMat sys = QMat::hstack(gens, g.relation_matrix());
    QMat full = kernel(sys, g.m);
    QMat syz = column_span_basis(full.row_range(0, gens.cols()), g.m);
    QMat expressed(gens.cols(), rels.cols());
    for (std::size_t j = 0; j < rels.cols(); ++j) {
        auto x = solve(sys, rels.col(j), g.m);
        if (!x) throw kg_error("quotient_group: relation outside generator span");
        for (std::size_t i = 0; i < gens.cols(); ++i) expressed(i, j) = (*x)[i];
    }
    return canonicalize(Pres{g.m, gens.cols(), QMat::hstack(syz, expressed)});
}

std::optional<QMat> express_in_span(const AbGroup& g, const QMat& gens, const QMat& target) {
    QMat sys = QMat::hstack(gens, g.relation_matrix());
    auto x = solve_matrix(sys, target, g.m);
    if (!x) return std::nullopt;
    return x->row_range(0, gens.cols());
}

bool image_equals_kernel(const QMat& f, const QMat& g, const AbGroup& domain, const AbGroup& mid,
                         const AbGroup& codomain) {
    if (f.rows() != mid.ngens() || f.cols() != domain.ngens() || g.rows() != codomain.ngens() ||
        g.cols() != mid.ngens())
        throw kg_error("image_equals_kernel dimension mismatch");
    QMat ker = kernel_subgroup(g, mid, codomain);
    return subgroup_equal(mid, f, ker);
}

}  // namespace kgring
