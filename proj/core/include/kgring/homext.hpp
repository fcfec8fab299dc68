#pragma once

#include "kgring/module.hpp"

namespace kgring {

// The group of module maps M -> N of one parity, computed by solving the
// commutation system exactly.  Keeps enough data to express arbitrary
// commuting maps in canonical coordinates, which ext1 needs.
class HomSpace {
public:
    // parity 1 solves against the suspension of N and relabels.
    static HomSpace compute(const KGModulePtr& m, const KGModulePtr& n, int parity);

    const AbGroup& group() const { return canon_.group; }
    std::size_t ngens() const { return canon_.group.ngens(); }
    ModuleMap generator(std::size_t c) const;
    // Canonical coordinates of the class of a commuting map.
    std::vector<Rat> class_of(const ModuleMap& f) const;

    // Presentation relation matrix of the hom group in canonical coordinates.
    QMat relation_matrix() const { return canon_.group.relation_matrix(); }

private:
    KGModulePtr m_, n_, neff_;
    int parity_ = 0;
    // Layout of the flattened unknown vector: per vertex, offsets of the two
    // lanes of H_v.
    struct LaneLoc {
        std::size_t offset, rows, cols;
    };
    std::vector<LaneLoc> plus_loc_, minus_loc_;
    std::size_t dim_ = 0;
    QMat gens_;        // dim_ x (raw generator count): kernel of the constraint system
    CanonGroup canon_;  // quotient by the trivial maps

    ModuleMap unflatten(const std::vector<Rat>& v) const;
    std::vector<Rat> flatten(const ModuleMap& f) const;
};

// Graded hom: even part the parity-preserving maps, odd part the even maps
// into the suspension.
GradedGroup hom(const KGModulePtr& m, const KGModulePtr& n);

// A free cover of M with one summand per presentation generator, its kernel
// with the induced action, and both structure maps.
struct FreeCover {
    KGModulePtr f;
    ModuleMap pi;         // F -> M
    KGModulePtr k;
    ModuleMap inclusion;  // K -> F
};
FreeCover free_cover(const KGModulePtr& m);

// Ext^1 via the length-1 resolution 0 -> K -> F -> M -> 0.  Throws a defect
// error when the kernel fails to be exact (which cannot happen for exact M).
GradedGroup ext1(const KGModulePtr& m, const KGModulePtr& n);

}  // namespace kgring
