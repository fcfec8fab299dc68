#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kgring/abgroup.hpp"
#include "kgring/smith.hpp"

#include <random>

using namespace kgring;

namespace {

QMat random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    QMat a(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) a(i, j) = Rat(d(rng));
    return a;
}

bool is_divisibility_chain(const QMat& d) {
    Int prev = 0;
    for (std::size_t i = 0; i < std::min(d.rows(), d.cols()); ++i) {
        Int x = numerator(d(i, i));
        if (x < 0) return false;
        if (prev != 0 && x != 0 && x % prev != 0) return false;
        if (prev == 0 && i > 0 && x != 0) return false;  // zeros must trail
        prev = x;
    }
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
            if (i != j && d(i, j) != 0) return false;
    return true;
}

Rat det2(const QMat& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

}  // namespace

TEST_CASE("smith normal form: identity, zero, fixed example") {
    SUBCASE("identity") {
        auto s = smith_normal_form(QMat::identity(2));
        CHECK(s.d == QMat::identity(2));
    }
    SUBCASE("zero 1x1") {
        auto s = smith_normal_form(QMat{{Rat(0)}});
        CHECK(s.d == QMat{{Rat(0)}});
    }
    SUBCASE("2x2 with gcd 2 and det -8") {
        QMat a{{Rat(2), Rat(4)}, {Rat(6), Rat(8)}};
        // Oracle: d1 = gcd of all entries, d1*d2 = |det|.
        Int d1 = gcd(gcd(Int(2), Int(4)), gcd(Int(6), Int(8)));
        Rat dt = det2(a);
        CHECK(d1 == 2);
        CHECK(abs_int(numerator(dt)) == 8);
        auto s = smith_normal_form(a);
        CHECK(s.d == QMat{{Rat(2), Rat(0)}, {Rat(0), Rat(4)}});
        CHECK(s.u * a * s.v == s.d);
    }
    SUBCASE("empty") {
        auto s = smith_normal_form(QMat(0, 0));
        CHECK(s.d.rows() == 0);
    }
}

TEST_CASE("smith normal form postcondition on random matrices") {
    std::mt19937_64 rng(12345);
    for (int iter = 0; iter < 60; ++iter) {
        std::size_t r = 1 + (rng() % 5), c = 1 + (rng() % 5);
        QMat a = random_matrix(rng, r, c, -9, 9);
        auto s = smith_normal_form(a);
        CHECK(s.u * a * s.v == s.d);
        CHECK(is_divisibility_chain(s.d));
        // Unimodularity: U and V invertible over the integers.
        auto ui = solve_matrix(s.u, QMat::identity(r), Int(1));
        auto vi = solve_matrix(s.v, QMat::identity(c), Int(1));
        REQUIRE(ui.has_value());
        REQUIRE(vi.has_value());
    }
}

TEST_CASE("kernel") {
    SUBCASE("single relation [p, -1]") {
        QMat a{{Rat(5), Rat(-1)}};
        QMat k = kernel(a, 1);
        REQUIRE(k.cols() == 1);
        // generated by (1, 5)^T up to sign
        Rat x = k(0, 0), y = k(1, 0);
        CHECK(y == 5 * x);
        CHECK(abs_int(numerator(x)) == 1);
    }
    SUBCASE("identity has zero kernel") { CHECK(kernel(QMat::identity(3), 1).cols() == 0); }
    SUBCASE("nonsingular 2x2 over Z") {
        QMat a{{Rat(2), Rat(4)}, {Rat(6), Rat(8)}};
        CHECK(det2(a) != 0);
        CHECK(kernel(a, 1).cols() == 0);
    }
    SUBCASE("kernel composed with matrix is zero") {
        std::mt19937_64 rng(777);
        for (int iter = 0; iter < 40; ++iter) {
            std::size_t r = 1 + (rng() % 4), c = 1 + (rng() % 5);
            QMat a = random_matrix(rng, r, c, -6, 6);
            QMat k = kernel(a, 6);
            CHECK((a * k).is_zero());
            CHECK(k.cols() >= (c > r ? c - r : 0));
        }
    }
}

TEST_CASE("solve") {
    SUBCASE("2x = 4 over Z") {
        auto x = solve(QMat{{Rat(2)}}, {Rat(4)}, 1);
        REQUIRE(x.has_value());
        CHECK((*x)[0] == 2);
    }
    SUBCASE("2x = 1 over Z is unsolvable") {
        CHECK_FALSE(solve(QMat{{Rat(2)}}, {Rat(1)}, 1).has_value());
    }
    SUBCASE("2x = 1 over Z[1/2]") {
        auto x = solve(QMat{{Rat(2)}}, {Rat(1)}, 2);
        REQUIRE(x.has_value());
        CHECK((*x)[0] == Rat(1, 2));
    }
    SUBCASE("random consistent systems solve exactly") {
        std::mt19937_64 rng(99);
        for (int iter = 0; iter < 50; ++iter) {
            std::size_t r = 1 + (rng() % 4), c = 1 + (rng() % 4);
            QMat a = random_matrix(rng, r, c, -7, 7);
            QMat x0 = random_matrix(rng, c, 1, -5, 5);
            QMat b = a * x0;
            auto x = solve(a, b.col(0), 1);
            REQUIRE(x.has_value());
            CHECK(mat_vec(a, *x) == b.col(0));
        }
    }
}

TEST_CASE("canonicalize presentations") {
    SUBCASE("diag(2,4,3) has invariant factors 2, 12") {
        auto cg = canonicalize_diagonal(1, {Int(2), Int(4), Int(3)});
        CHECK(cg.group.rank == 0);
        REQUIRE(cg.group.factors.size() == 2);
        CHECK(cg.group.factors[0] == 2);
        CHECK(cg.group.factors[1] == 12);
    }
    SUBCASE("inverted primes strip torsion") {
        auto cg = canonicalize_diagonal(3, {Int(9), Int(6), Int(0)});
        // Z[1/3]/9 = 0, Z[1/3]/6 = Z/2
        CHECK(cg.group.rank == 1);
        REQUIRE(cg.group.factors.size() == 1);
        CHECK(cg.group.factors[0] == 2);
    }
    SUBCASE("transport matrices invert each other modulo relations") {
        std::mt19937_64 rng(4242);
        for (int iter = 0; iter < 25; ++iter) {
            std::size_t n = 1 + (rng() % 4), r = rng() % 4;
            QMat rels = random_matrix(rng, n, r, -8, 8);
            auto cg = canonicalize(Pres{1, n, rels});
            // from_canon then to_canon is the identity on the canonical group
            QMat round = cg.to_canon * cg.from_canon;
            CHECK(maps_equal(round, QMat::identity(cg.group.ngens()), cg.group, cg.group));
        }
    }
}

TEST_CASE("image_equals_kernel") {
    AbGroup z_loc_p{5, 1, {}};   // Z[1/5]
    AbGroup z_plain{1, 1, {}};   // Z
    AbGroup zero{1, 0, {}};

    SUBCASE("multiplication by p is onto over Z[1/p]") {
        QMat f{{Rat(5)}};
        QMat g(0, 1);
        CHECK(image_equals_kernel(f, g, z_loc_p, z_loc_p, zero));
    }
    SUBCASE("multiplication by p is not onto over Z") {
        QMat f{{Rat(5)}};
        QMat g(0, 1);
        CHECK_FALSE(image_equals_kernel(f, g, z_plain, z_plain, zero));
    }
    SUBCASE("zero into identity") {
        QMat f(1, 0);
        QMat g{{Rat(1)}};
        CHECK(image_equals_kernel(f, g, zero, z_plain, z_plain));
    }
}

TEST_CASE("subgroup machinery") {
    AbGroup g{1, 2, {Int(4)}};  // Z^2 + Z/4
    QMat s{{Rat(2), Rat(0)}, {Rat(0), Rat(1)}, {Rat(0), Rat(0)}};
    SUBCASE("containment and witnesses") {
        QMat inside{{Rat(4)}, {Rat(3)}, {Rat(0)}};
        QMat outside{{Rat(1)}, {Rat(0)}, {Rat(0)}};
        CHECK(subgroup_contains(g, s, inside));
        auto w = containment_witness(g, s, outside);
        REQUIRE(w.has_value());
        CHECK((*w)[0] == 1);
    }
    SUBCASE("subgroup presentation") {
        QMat tors{{Rat(0)}, {Rat(0)}, {Rat(2)}};
        auto sp = subgroup_to_group(g, tors);
        CHECK(sp.group.rank == 0);
        REQUIRE(sp.group.factors.size() == 1);
        CHECK(sp.group.factors[0] == 2);  // <2> inside Z/4
    }
    SUBCASE("quotient") {
        // Z^2 / <(2,0)> = Z + Z/2 (ignore the torsion generator)
        AbGroup free2{1, 2, {}};
        QMat gens = QMat::identity(2);
        QMat rels{{Rat(2)}, {Rat(0)}};
        auto q = quotient_group(free2, gens, rels);
        CHECK(q.group.rank == 1);
        REQUIRE(q.group.factors.size() == 1);
        CHECK(q.group.factors[0] == 2);
    }
}
