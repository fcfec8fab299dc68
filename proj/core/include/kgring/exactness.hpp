#pragma once

#include "kgring/module.hpp"

namespace kgring {

// One node check of the triangle sequences: per prime, per orientation
// (clockwise 0 -> 1 -> 2 -> 0 via a10, a21, a02; counterclockwise
// 1 -> 0 -> 2 -> 1 via a01, a20, a12), per node.
struct NodeCheck {
    Int prime;
    bool clockwise;
    int node;
    bool ok;
    std::string witness;  // element of ker not in im, empty if ok
};

struct ExactnessReport {
    std::vector<NodeCheck> nodes;
    bool exact() const;
};

// Decides exactness by restricting to each prime and testing im = ker at the
// three nodes of both orientations, parity-tracked.  Throws if the module
// fails validate().
ExactnessReport is_exact(const KGModulePtr& m);

// Element-by-element oracle on finite modules; every component order must
// stay within the bound.
bool brute_force_exactness(const KGModulePtr& m, const Int& order_bound = 512);

}  // namespace kgring
