#pragma once

#include "kgring/numeric.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace kgring {

// The six arrow generators of one ring factor.  a_jk runs from vertex k to
// vertex j; a12 and a21 are the odd ones.
enum class Arrow : std::uint8_t { a01, a10, a02, a20, a12, a21 };

constexpr int arrow_source(Arrow a) {
    constexpr std::array<int, 6> s{1, 0, 2, 0, 2, 1};
    return s[static_cast<int>(a)];
}
constexpr int arrow_target(Arrow a) {
    constexpr std::array<int, 6> t{0, 1, 0, 2, 1, 2};
    return t[static_cast<int>(a)];
}
constexpr int arrow_degree(Arrow a) { return (a == Arrow::a12 || a == Arrow::a21) ? 1 : 0; }
std::string arrow_name(Arrow a);

// A path monomial: letters compose right to left (letters.back() acts
// first).  The empty word at vertex v is the idempotent 1_v.
struct Word {
    int vertex = 0;  // source vertex for the empty word
    std::vector<Arrow> letters;

    int source() const { return letters.empty() ? vertex : arrow_source(letters.back()); }
    int target() const { return letters.empty() ? vertex : arrow_target(letters.front()); }
    int degree() const;
    bool is_idempotent() const { return letters.empty(); }

    // Concatenation as ring product; returns false when vertices mismatch.
    static bool concat(const Word& x, const Word& y, Word& out);

    // Append one arrow on the source side; keeps the vertex field canonical
    // (zero for nonempty words, so that comparison is well defined).
    Word extended(Arrow a) const;

    auto operator<=>(const Word&) const = default;
    std::string to_string() const;
};

Word idem_word(int vertex);
Word arrow_word(Arrow a);

using LinComb = std::map<Word, Int>;

LinComb lincomb_add(const LinComb& a, const LinComb& b);
LinComb lincomb_scale(const LinComb& a, const Int& c);

// One oriented reduction rule L -> sum of smaller words.
struct Rule {
    Word lhs;
    LinComb rhs;
    std::string name;
};

// The completed rewriting system of one ring factor.  The rule schema is
// instantiated from the prime (it depends on p only through the norm
// polynomial N(t) = 1 + t + ... + t^(p-1)); construction verifies that every
// rule strictly decreases the word order and that all critical pairs
// resolve.
class RewriteSystem {
public:
    explicit RewriteSystem(const Int& p);

    const Int& prime() const { return p_; }
    const std::vector<Rule>& rules() const { return rules_; }
    bool confluence_verified() const { return confluent_; }
    const std::string& failure() const { return failure_; }

    bool is_irreducible(const Word& w) const;
    LinComb reduce_word(const Word& w) const;
    LinComb reduce(const LinComb& x) const;

    // Word order used to orient the rules: weighted length with ties broken
    // by shorter-first, then letter precedence.  Returns <0, 0, >0.
    int compare(const Word& a, const Word& b) const;

    // All irreducible monomials, grouped by (target, source) vertex pair.
    // Enumeration is capped at length 2p and throws if the cap is hit.
    std::map<std::pair<int, int>, std::vector<Word>> basis() const;

private:
    Int p_;
    std::vector<Rule> rules_;
    bool confluent_ = false;
    std::string failure_;

    void build_rules();
    void verify_orientation() const;
    void verify_confluence();
};

// Named relation of a presentation, stored as a pair of equal elements.
struct Relation {
    std::string name;
    LinComb lhs, rhs;
};

// Generators-and-relations description of one ring factor: three idempotents,
// six arrows, and the seven relation families with N of degree p-1.
struct RingPresentation {
    Int p;
    std::vector<Relation> relations;       // the defining families
    std::vector<Relation> derived;         // the twelve derived identities
};

RingPresentation build_presentation(const Int& p);  // throws unless p is prime
RewriteSystem complete_rewrite_system(const RingPresentation& pres);

struct RelationReport {
    struct Entry {
        std::string name;
        bool ok;
    };
    std::vector<Entry> entries;
    bool all_ok() const;
};

// Reduces both sides of the twelve derived identities.
RelationReport verify_derived_relations(const Int& p);
// Reduces both sides of the seven defining families.
RelationReport verify_presentation(const Int& p);

// --- tensor product ring ---------------------------------------------------

struct TensorWord {
    std::vector<Word> factor;
    auto operator<=>(const TensorWord&) const = default;
    int degree() const;
    std::vector<int> source() const;
    std::vector<int> target() const;
    std::string to_string() const;
};

class KgRing;
using KgRingPtr = std::shared_ptr<const KgRing>;

// An exact integer combination of tensor monomials; heterogeneous sums are
// kept as formal vertex-indexed families.
class RingElement {
public:
    RingElement() = default;
    RingElement(KgRingPtr ring, std::map<TensorWord, Int> terms);

    const KgRingPtr& ring() const { return ring_; }
    const std::map<TensorWord, Int>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_homogeneous() const;       // one (source, target, degree) class
    int degree() const;                // throws if inhomogeneous
    std::vector<int> source() const;   // throws if mixed
    std::vector<int> target() const;

    RingElement operator+(const RingElement& o) const;
    RingElement operator-(const RingElement& o) const;
    RingElement operator*(const RingElement& o) const;
    RingElement operator*(const Int& c) const;
    friend RingElement operator*(const Int& c, const RingElement& x) { return x * c; }
    bool operator==(const RingElement& o) const;

    std::string to_string() const;

private:
    KgRingPtr ring_;
    std::map<TensorWord, Int> terms_;  // all words in normal form
};

// Immutable context for the tensor ring of the given distinct primes; holds
// one completed rewrite system per factor.
class KgRing : public std::enable_shared_from_this<KgRing> {
public:
    static KgRingPtr make(std::vector<Int> primes);

    const std::vector<Int>& primes() const { return primes_; }
    std::size_t nfactors() const { return primes_.size(); }
    const RewriteSystem& system(std::size_t j) const { return systems_[j]; }

    RingElement zero() const;
    RingElement unit() const;
    RingElement idem(const std::vector<int>& vertex) const;
    // 1_i of factor j, summed over the idempotents of the other factors.
    RingElement gen_idem(std::size_t j, int i) const;
    // a of factor j, summed likewise.
    RingElement gen_arrow(std::size_t j, Arrow a) const;
    RingElement monomial(const TensorWord& w) const;

    RingElement normal_form(const RingElement& x) const;

private:
    explicit KgRing(std::vector<Int> primes);
    std::vector<Int> primes_;
    std::vector<RewriteSystem> systems_;

    friend class RingElement;
};

}  // namespace kgring
