#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgring/ring.hpp"

#include <random>
#include <set>

using namespace kgring;

namespace {

// Independent basis oracle: enumerate every vertex-compatible word up to the
// length cap (no pruning) and keep the irreducible ones.
std::set<Word> irreducible_by_enumeration(const RewriteSystem& sys, unsigned long cap) {
    std::set<Word> out;
    std::vector<Word> frontier;
    for (int v = 0; v < 3; ++v) frontier.push_back(idem_word(v));
    for (unsigned long len = 0; len <= cap; ++len) {
        std::vector<Word> next;
        for (const auto& w : frontier) {
            if (sys.is_irreducible(w)) out.insert(w);
            if (len == cap) continue;
            for (int ai = 0; ai < 6; ++ai) {
                Arrow a = static_cast<Arrow>(ai);
                if (arrow_target(a) != w.source()) continue;
                next.push_back(w.extended(a));
            }
        }
        frontier = std::move(next);
    }
    return out;
}

RingElement random_monomial(const KgRingPtr& ring, const std::vector<std::vector<Word>>& pools,
                            std::mt19937_64& rng) {
    TensorWord w;
    for (std::size_t j = 0; j < ring->nfactors(); ++j)
        w.factor.push_back(pools[j][rng() % pools[j].size()]);
    return ring->monomial(w) * Int(1 + static_cast<int>(rng() % 3));
}

std::vector<std::vector<Word>> basis_pools(const KgRingPtr& ring) {
    std::vector<std::vector<Word>> pools;
    for (std::size_t j = 0; j < ring->nfactors(); ++j) {
        std::vector<Word> all;
        for (const auto& [vk, words] : ring->system(j).basis())
            all.insert(all.end(), words.begin(), words.end());
        pools.push_back(std::move(all));
    }
    return pools;
}

}  // namespace

TEST_CASE("build_presentation rejects composites") {
    CHECK_THROWS_AS(build_presentation(4), kg_error);
    CHECK_THROWS_AS(build_presentation(1), kg_error);
    CHECK_NOTHROW(build_presentation(2));
}

TEST_CASE("rewrite system is confluent and orientation-sound") {
    for (int p : {2, 3, 5}) {
        RewriteSystem sys((Int(p)));
        CAPTURE(p);
        CHECK(sys.confluence_verified());
        CHECK(sys.failure().empty());
    }
}

TEST_CASE("every presentation relation reduces to an identity") {
    for (int p : {2, 3, 5}) {
        auto rep = verify_presentation(p);
        CAPTURE(p);
        for (const auto& e : rep.entries) {
            CAPTURE(e.name);
            CHECK(e.ok);
        }
    }
}

TEST_CASE("the twelve derived relations hold") {
    for (int p : {2, 3, 5, 7}) {
        auto rep = verify_derived_relations(p);
        CAPTURE(p);
        CHECK(rep.entries.size() == 14);  // t/s powers listed once per vertex
        for (const auto& e : rep.entries) {
            CAPTURE(e.name);
            CHECK(e.ok);
        }
    }
}

TEST_CASE("normal form examples") {
    auto ring = KgRing::make({Int(3)});
    auto a01 = ring->gen_arrow(0, Arrow::a01);
    auto a10 = ring->gen_arrow(0, Arrow::a10);
    auto a02 = ring->gen_arrow(0, Arrow::a02);
    auto a20 = ring->gen_arrow(0, Arrow::a20);
    auto e0 = ring->gen_idem(0, 0);
    auto e1 = ring->gen_idem(0, 1);

    SUBCASE("orthogonal idempotents") { CHECK((e0 * e1).is_zero()); }
    SUBCASE("t0^p = 1_0") {
        auto t0 = e0 - a02 * a20;
        CHECK(t0 * t0 * t0 == e0);
    }
    SUBCASE("N(t0)*a02 = 0") {
        auto t0 = e0 - a02 * a20;
        auto n = e0 + t0 + t0 * t0;
        CHECK((n * a02).is_zero());
    }
    SUBCASE("a01*a10 = N(t0)") {
        auto t0 = e0 - a02 * a20;
        CHECK(a01 * a10 == e0 + t0 + t0 * t0);
    }
    SUBCASE("a01*a10*a01 = p*a01") { CHECK(a01 * a10 * a01 == a01 * Int(3)); }
    SUBCASE("a10*a01*a10 = p*a10") { CHECK(a10 * a01 * a10 == a10 * Int(3)); }
}

TEST_CASE("degree bookkeeping") {
    auto ring = KgRing::make({Int(2)});
    auto a12 = ring->gen_arrow(0, Arrow::a12);
    auto a21 = ring->gen_arrow(0, Arrow::a21);
    auto a01 = ring->gen_arrow(0, Arrow::a01);
    CHECK(a12.degree() == 1);
    CHECK(a01.degree() == 0);
    CHECK((a21 * a12).degree() == 0);
    CHECK_THROWS_AS((a01 + a12).degree(), kg_error);
}

TEST_CASE("ring basis against the enumeration oracle") {
    for (int p : {2, 3, 5}) {
        CAPTURE(p);
        RewriteSystem sys((Int(p)));
        auto grouped = sys.basis();
        std::set<Word> flat;
        for (const auto& [vk, ws] : grouped) flat.insert(ws.begin(), ws.end());
        auto oracle = irreducible_by_enumeration(sys, 2 * static_cast<unsigned long>(p));
        CHECK(flat == oracle);

        auto rank = [&](int t, int s) {
            auto it = grouped.find({t, s});
            return it == grouped.end() ? std::size_t(0) : it->second.size();
        };
        CHECK(rank(0, 0) == static_cast<std::size_t>(p));
        CHECK(rank(1, 1) == static_cast<std::size_t>(p));
        CHECK(rank(2, 2) == static_cast<std::size_t>(2 * p - 2));
        CHECK(rank(0, 1) == 1);
        CHECK(rank(1, 0) == 1);
        CHECK(rank(0, 2) == static_cast<std::size_t>(p - 1));
        CHECK(rank(2, 0) == static_cast<std::size_t>(p - 1));
        CHECK(rank(1, 2) == static_cast<std::size_t>(p - 1));
        CHECK(rank(2, 1) == static_cast<std::size_t>(p - 1));

        // vertex pair (0,1) is exactly {a01}
        REQUIRE(rank(0, 1) == 1);
        CHECK(grouped[{0, 1}][0] == arrow_word(Arrow::a01));
        // (0,0) consists of powers of the loop a02.a20
        for (const auto& w : grouped[{0, 0}]) {
            for (std::size_t i = 0; i < w.letters.size(); ++i)
                CHECK(w.letters[i] == (i % 2 == 0 ? Arrow::a02 : Arrow::a20));
        }
    }
}

TEST_CASE("normal_form is idempotent on random elements") {
    auto ring = KgRing::make({Int(3)});
    auto pools = basis_pools(ring);
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 50; ++i) {
        auto x = random_monomial(ring, pools, rng) + random_monomial(ring, pools, rng);
        auto once = ring->normal_form(x);
        CHECK(ring->normal_form(once) == once);
    }
}

TEST_CASE("unit law, associativity, distributivity") {
    for (auto primes : std::vector<std::vector<Int>>{{Int(2)}, {Int(2), Int(3)}}) {
        auto ring = KgRing::make(primes);
        auto pools = basis_pools(ring);
        auto one = ring->unit();
        std::mt19937_64 rng(555);
        for (int i = 0; i < 30; ++i) {
            auto x = random_monomial(ring, pools, rng);
            auto y = random_monomial(ring, pools, rng);
            auto z = random_monomial(ring, pools, rng);
            CHECK(one * x == x);
            CHECK(x * one == x);
            CHECK((x * y) * z == x * (y * z));
            CHECK(x * (y + z) == x * y + x * z);
            CHECK((y + z) * x == y * x + z * x);
        }
    }
}

TEST_CASE("degree is additive under multiplication") {
    auto ring = KgRing::make({Int(3)});
    auto pools = basis_pools(ring);
    std::mt19937_64 rng(31415);
    int checked = 0;
    for (int i = 0; i < 200 && checked < 40; ++i) {
        auto x = random_monomial(ring, pools, rng);
        auto y = random_monomial(ring, pools, rng);
        auto xy = x * y;
        if (xy.is_zero()) continue;
        CHECK(xy.degree() == ((x.degree() + y.degree()) % 2));
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("tensor unit law: (x ox 1)(1 ox y) = x ox y") {
    auto ring = KgRing::make({Int(2), Int(3)});
    auto pools = basis_pools(ring);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 25; ++i) {
        const Word& wx = pools[0][rng() % pools[0].size()];
        const Word& wy = pools[1][rng() % pools[1].size()];
        // x ox 1: sum over idempotents in the second slot
        std::map<TensorWord, Int> xterms, yterms;
        for (int v = 0; v < 3; ++v) {
            xterms[TensorWord{{wx, idem_word(v)}}] = 1;
            yterms[TensorWord{{idem_word(v), wy}}] = 1;
        }
        RingElement x(ring, xterms), y(ring, yterms);
        auto prod = x * y;
        auto direct = ring->monomial(TensorWord{{wx, wy}});
        CHECK(prod == direct);
    }
}

TEST_CASE("tensor basis multiplies per factor") {
    auto r2 = KgRing::make({Int(2)});
    auto r3 = KgRing::make({Int(3)});
    auto r6 = KgRing::make({Int(2), Int(3)});
    std::size_t n2 = 0, n3 = 0;
    for (const auto& [vk, ws] : r2->system(0).basis()) n2 += ws.size();
    for (const auto& [vk, ws] : r3->system(0).basis()) n3 += ws.size();
    CHECK(n2 == 12);   // 8p-4 with p = 2
    CHECK(n3 == 20);   // 8p-4 with p = 3
    std::size_t n6 = 0;
    for (std::size_t j = 0; j < 2; ++j) {
        std::size_t n = 0;
        for (const auto& [vk, ws] : r6->system(j).basis()) n += ws.size();
        n6 = (j == 0) ? n : n6 * n;
    }
    CHECK(n6 == n2 * n3);
}
