#pragma once

#include "kgring/abgroup.hpp"
#include "kgring/ring.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>

namespace kgring {

// Vertices of the tensor ring are digit tuples over {0,1,2}, one digit per
// prime factor, ordered with the first prime most significant.
using Vertex = std::vector<int>;

std::size_t vertex_index(const Vertex& v);
Vertex vertex_of_index(std::size_t idx, std::size_t k);
std::string vertex_string(const Vertex& v);
Vertex vertex_from_string(const std::string& s);

// A parity-homogeneous map between graded components, stored as a pair of
// matrices.  For an even map, plus : src+ -> tgt+ and minus : src- -> tgt-;
// for an odd map, plus : src+ -> tgt- and minus : src- -> tgt+.
struct MapPair {
    QMat plus, minus;
    bool operator==(const MapPair&) const = default;
};

MapPair zero_pair(const GradedGroup& src, const GradedGroup& tgt, int parity);
MapPair identity_pair(const GradedGroup& g);
MapPair pair_add(const MapPair& a, const MapPair& b);
MapPair pair_scale(const MapPair& a, const Rat& c);
// g after f; fp/gp are the parities of f and g.
MapPair pair_compose(const MapPair& g, int gp, const MapPair& f, int fp);

class KGModule;
using KGModulePtr = std::shared_ptr<const KGModule>;

// A finitely generated Z/2-graded module over the tensor ring: one graded
// group per vertex and one generator-action map per (factor, arrow, source
// vertex).  Immutable after construction.
class KGModule {
public:
    using ActionKey = std::tuple<std::size_t, Arrow, std::size_t>;  // factor, arrow, src vertex
    using ActionMap = std::map<ActionKey, MapPair>;

    // Missing actions default to zero maps.  Verifies structure (dimensions,
    // parity shape, well-definedness); relation checking is validate()'s job.
    static KGModulePtr create(KgRingPtr ring, Int m, std::vector<GradedGroup> comps,
                              const ActionMap& actions);

    const KgRingPtr& ring() const { return ring_; }
    const std::vector<Int>& primes() const { return ring_->primes(); }
    const Int& modulus() const { return m_; }
    std::size_t nfactors() const { return ring_->nfactors(); }
    std::size_t nvertices() const { return comps_.size(); }

    const GradedGroup& comp(std::size_t vidx) const { return comps_[vidx]; }
    const GradedGroup& comp(const Vertex& v) const { return comps_[vertex_index(v)]; }
    const std::vector<GradedGroup>& comps() const { return comps_; }

    // Action of one arrow of one factor at a source vertex whose j-th digit
    // equals the arrow's source.
    const MapPair& action(std::size_t j, Arrow a, std::size_t src_vidx) const;
    std::size_t arrow_target_vertex(std::size_t j, Arrow a, std::size_t src_vidx) const;

    bool is_zero() const;
    bool operator==(const KGModule& o) const;

private:
    KGModule() = default;
    KgRingPtr ring_;
    Int m_ = 1;
    std::vector<GradedGroup> comps_;
    // actions_[j][arrow][src_vidx]
    std::vector<std::array<std::vector<MapPair>, 6>> actions_;
};

// --- module maps ------------------------------------------------------------

// Additive parity-homogeneous map between modules, given by sparse vertex
// blocks.  Module linearity over a factor subset is a property checked by
// commutes_with_factor, never assumed.
struct ModuleMap {
    KGModulePtr src, tgt;
    int parity = 0;
    std::map<std::pair<std::size_t, std::size_t>, MapPair> blocks;  // (tgt_vidx, src_vidx)

    MapPair block_or_zero(std::size_t t, std::size_t s) const;
    bool is_vertex_diagonal() const;
};

ModuleMap identity_map(const KGModulePtr& m);
ModuleMap zero_module_map(const KGModulePtr& src, const KGModulePtr& tgt, int parity);
ModuleMap map_compose(const ModuleMap& g, const ModuleMap& f);
ModuleMap map_add(const ModuleMap& a, const ModuleMap& b);
ModuleMap map_scale(const ModuleMap& a, const Rat& c);
bool module_maps_equal(const ModuleMap& a, const ModuleMap& b);
bool map_blocks_valid(const ModuleMap& f);  // every block a well-defined hom

// The action of one ring generator as a ModuleMap.
ModuleMap arrow_action_map(const KGModulePtr& m, std::size_t j, Arrow a);
ModuleMap idem_action_map(const KGModulePtr& m, std::size_t j, int digit);

// Action of a whole normal-form word / integer combination of the ring.
MapPair word_action(const KGModule& m, std::size_t j, const Word& w, std::size_t src_vidx);
ModuleMap element_action(const KGModulePtr& m, const RingElement& x);

bool commutes_with_factor(const ModuleMap& f, std::size_t j);
bool is_module_map(const ModuleMap& f);
// True if f commutes with every factor except the ones listed.
bool commutes_outside(const ModuleMap& f, const std::set<std::size_t>& excluded);

// Kernel/surjectivity diagnostics for vertex-diagonal maps.
bool map_is_injective(const ModuleMap& f);
bool map_is_surjective(const ModuleMap& f);
bool map_is_isomorphism(const ModuleMap& f);

// --- extensions -------------------------------------------------------------

struct Extension {
    ModuleMap iota;  // Q' -> Q''
    ModuleMap beta;  // Q'' -> Q
};

// iota injective, beta surjective, im(iota) = ker(beta) componentwise.
bool extension_is_exact(const Extension& e);

// --- operations -------------------------------------------------------------

struct ValidationIssue {
    std::string relation;
    std::string where;  // "p=3 @ v=01 (+)" style
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

ValidationReport validate(const KGModule& m);

KGModulePtr suspend(const KGModulePtr& m);

struct DirectSumResult {
    KGModulePtr sum;
    ModuleMap into_first;   // A -> A (+) B
    ModuleMap into_second;  // B -> A (+) B
    ModuleMap onto_first;   // A (+) B -> A
    ModuleMap onto_second;
};
DirectSumResult direct_sum(const KGModulePtr& a, const KGModulePtr& b);

// Several summands at once (empty list gives the zero module).
struct MultiSumResult {
    KGModulePtr sum;
    std::vector<ModuleMap> into;
    std::vector<ModuleMap> onto;
};
MultiSumResult direct_sum_many(const KgRingPtr& ring, const Int& m,
                               const std::vector<KGModulePtr>& parts);

KGModulePtr zero_module(const KgRingPtr& ring, const Int& m);

// Restriction to one ring factor: component i collects the vertices whose
// j-th digit is i; the result is a module over the single prime p_j.
KGModulePtr restrict_to_prime(const KGModulePtr& m, std::size_t j);

// The free module generated at one vertex (optionally suspended), with
// components spanned by normal-form monomials and left-multiplication
// actions.
KGModulePtr free_module(const KgRingPtr& ring, const Int& m, const Vertex& v, int parity = 0);

// Basis bookkeeping for free modules: the monomial list per vertex and
// parity, in the generator order used by free_module.
struct FreeBasis {
    Vertex source;
    int parity;  // parity of the generator
    // per vertex index: even monomial list, odd monomial list (as tensor words)
    std::vector<std::vector<TensorWord>> even, odd;
};
FreeBasis free_basis(const KgRingPtr& ring, const Vertex& v, int parity = 0);

}  // namespace kgring
