#pragma once

#include "kgring/smith.hpp"

#include <string>
#include <vector>

namespace kgring {

// One parity piece of a finitely generated Z[1/m]-module, in invariant-factor
// normal form: free generators first, then torsion generators whose orders
// form a divisibility chain of integers >= 2 coprime to m.
struct AbGroup {
    Int m = 1;
    std::size_t rank = 0;
    std::vector<Int> factors;

    std::size_t ngens() const { return rank + factors.size(); }
    bool is_zero() const { return ngens() == 0; }
    bool is_finite() const { return rank == 0; }
    Int order() const;  // throws if infinite
    Int gen_order(std::size_t i) const { return i < rank ? Int(0) : factors[i - rank]; }

    bool operator==(const AbGroup&) const = default;
    std::string to_string() const;

    // Columns d_t * e_t for the torsion generators.
    QMat relation_matrix() const;

    void check_invariants() const;  // divisibility chain, coprime to m
};

struct GradedGroup {
    AbGroup even, odd;
    bool operator==(const GradedGroup&) const = default;
    bool is_zero() const { return even.is_zero() && odd.is_zero(); }
    GradedGroup suspended() const { return GradedGroup{odd, even}; }
    std::string to_string() const;
};

// Cokernel presentation: Z[1/m]^ngens modulo the column span of rels.
struct Pres {
    Int m = 1;
    std::size_t ngens = 0;
    QMat rels;  // ngens x r, integer entries
};

// Canonicalization of a presentation, with the coordinate transport needed
// to move maps along: new = to_canon * old, old = from_canon * new (up to
// relations).
struct CanonGroup {
    AbGroup group;
    QMat to_canon;
    QMat from_canon;
};

CanonGroup canonicalize(const Pres& p);
CanonGroup canonicalize_diagonal(const Int& m, const std::vector<Int>& gen_orders);

// --- elements -------------------------------------------------------------

// Reduces torsion coordinates into [0, d) (exact division by units mod d);
// free coordinates must be m-smooth rationals.
std::vector<Rat> normalize_element(const AbGroup& g, std::vector<Rat> v);
bool element_is_zero(const AbGroup& g, const std::vector<Rat>& v);

// --- maps -----------------------------------------------------------------

// A homomorphism src -> tgt is a tgt.ngens x src.ngens matrix of m-smooth
// rationals sending each relation of src into the relation lattice of tgt.
bool map_is_valid(const QMat& f, const AbGroup& src, const AbGroup& tgt);
QMat normalize_map(const QMat& f, const AbGroup& src, const AbGroup& tgt);
bool maps_equal(const QMat& f, const QMat& g, const AbGroup& src, const AbGroup& tgt);
bool map_is_zero(const QMat& f, const AbGroup& src, const AbGroup& tgt);

// --- subgroups ------------------------------------------------------------

// Subgroups of an AbGroup are given by generating columns in its coordinates.
bool subgroup_contains(const AbGroup& g, const QMat& big, const QMat& small);
bool subgroup_equal(const AbGroup& g, const QMat& a, const QMat& b);

// First witness column of `small` not contained in the span of `big`.
std::optional<std::vector<Rat>> containment_witness(const AbGroup& g, const QMat& big,
                                                    const QMat& small);

// Generators of { x in src : f(x) = 0 } as a subgroup of src.
QMat kernel_subgroup(const QMat& f, const AbGroup& src, const AbGroup& tgt);

// Presents the subgroup generated by the columns of s as an abstract group;
// inclusion maps the canonical generators back into g's coordinates.
struct SubgroupPresentation {
    AbGroup group;
    QMat inclusion;  // g.ngens() x group.ngens()
};
SubgroupPresentation subgroup_to_group(const AbGroup& g, const QMat& s);

// Presents span(gens)/span(rels) where both live in g and span(rels) is
// contained in span(gens); throws otherwise.
CanonGroup quotient_group(const AbGroup& g, const QMat& gens, const QMat& rels);

// Solves gens * x = target inside g (modulo relations of g); column-wise.
std::optional<QMat> express_in_span(const AbGroup& g, const QMat& gens, const QMat& target);

// True iff im(f) = ker(g) inside mid, for f: domain -> mid, g: mid -> codomain.
bool image_equals_kernel(const QMat& f, const QMat& g, const AbGroup& domain, const AbGroup& mid,
                         const AbGroup& codomain);

}  // namespace kgring
