#include "kgring/ring.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <sstream>

namespace kgring {

std::string arrow_name(Arrow a) {
    static const char* names[6] = {"a01", "a10", "a02", "a20", "a12", "a21"};
    return names[static_cast<int>(a)];
}

int Word::degree() const {
    int d = 0;
    for (auto a : letters) d ^= arrow_degree(a);
    return d;
}

bool Word::concat(const Word& x, const Word& y, Word& out) {
    if (x.source() != y.target()) return false;
    out.letters = x.letters;
    out.letters.insert(out.letters.end(), y.letters.begin(), y.letters.end());
    out.vertex = out.letters.empty() ? x.vertex : 0;
    return true;
}

Word Word::extended(Arrow a) const {
    if (arrow_target(a) != source()) throw kg_error("extended: vertex mismatch");
    Word w = *this;
    w.letters.push_back(a);
    w.vertex = 0;
    return w;
}

std::string Word::to_string() const {
    if (letters.empty()) return "e" + std::to_string(vertex);
    std::string s;
    for (auto a : letters) {
        if (!s.empty()) s += '.';
        s += arrow_name(a);
    }
    return s;
}

Word idem_word(int vertex) {
    Word w;
    w.vertex = vertex;
    return w;
}

Word arrow_word(Arrow a) {
    Word w;
    w.letters = {a};
    return w;
}

LinComb lincomb_add(const LinComb& a, const LinComb& b) {
    LinComb r = a;
    for (const auto& [w, c] : b) {
        r[w] += c;
        if (r[w] == 0) r.erase(w);
    }
    return r;
}

LinComb lincomb_scale(const LinComb& a, const Int& c) {
    if (c == 0) return {};
    LinComb r;
    for (const auto& [w, x] : a) r[w] = x * c;
    return r;
}

namespace {

// Raw (unreduced) bilinear product; vertex-incompatible pairs vanish.
LinComb lincomb_mul_raw(const LinComb& a, const LinComb& b) {
    LinComb r;
    for (const auto& [wa, ca] : a)
        for (const auto& [wb, cb] : b) {
            Word w;
            if (!Word::concat(wa, wb, w)) continue;
            if (w.letters.empty()) w.vertex = wa.target();
            r[w] += ca * cb;
            if (r[w] == 0) r.erase(w);
        }
    return r;
}

LinComb single(const Word& w, const Int& c = 1) { return LinComb{{w, c}}; }

Word repeat_pair(Arrow x, Arrow y, unsigned long n, int vertex_if_empty) {
    Word w;
    w.vertex = (n == 0) ? vertex_if_empty : 0;
    for (unsigned long i = 0; i < n; ++i) {
        w.letters.push_back(x);
        w.letters.push_back(y);
    }
    return w;
}

// Loops in normal-form letters: l0 = a02.a20 at vertex 0, l1 = a12.a21 at
// vertex 1, u = a20.a02 and w = a21.a12 at vertex 2.
Word loop0(unsigned long r) { return repeat_pair(Arrow::a02, Arrow::a20, r, 0); }
Word loop1(unsigned long r) { return repeat_pair(Arrow::a12, Arrow::a21, r, 1); }
Word loop_u(unsigned long r) { return repeat_pair(Arrow::a20, Arrow::a02, r, 2); }
Word loop_w(unsigned long r) { return repeat_pair(Arrow::a21, Arrow::a12, r, 2); }

// N(1 - x) = p + sum_{r>=1} (-1)^r C(p, r+1) x^r as coefficients c[0..p-1].
std::vector<Int> norm_poly_coeffs(unsigned long p) {
    std::vector<Int> c(p);
    for (unsigned long r = 0; r < p; ++r) {
        c[r] = binomial(p, r + 1);
        if (r % 2 == 1) c[r] = -c[r];
    }
    return c;
}

// x^p in lower powers, from (1 - x)^p = 1: coefficients e[1..p-1].
std::vector<Int> loop_power_coeffs(unsigned long p) {
    std::vector<Int> e(p);
    for (unsigned long r = 1; r < p; ++r) {
        e[r] = binomial(p, r);
        if ((p + r + 1) % 2 == 1) e[r] = -e[r];
    }
    return e;
}

int arrow_weight(Arrow a, unsigned long p) {
    return (a == Arrow::a01 || a == Arrow::a10) ? static_cast<int>(p) : 1;
}

int arrow_precedence(Arrow a) {
    static const int prec[6] = {0, 1, 2, 3, 4, 5};  // a01 a10 a02 a20 a12 a21
    return prec[static_cast<int>(a)];
}

}  // namespace

int RewriteSystem::compare(const Word& a, const Word& b) const {
    unsigned long p = p_.convert_to<unsigned long>();
    long wa = 0, wb = 0;
    for (auto x : a.letters) wa += arrow_weight(x, p);
    for (auto x : b.letters) wb += arrow_weight(x, p);
    if (wa != wb) return wa < wb ? -1 : 1;
    // Equal weight: fewer letters is greater.
    if (a.letters.size() != b.letters.size()) return a.letters.size() > b.letters.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.letters.size(); ++i) {
        int pa = arrow_precedence(a.letters[i]), pb = arrow_precedence(b.letters[i]);
        if (pa != pb) return pa < pb ? -1 : 1;
    }
    return 0;
}

void RewriteSystem::build_rules() {
    unsigned long p = p_.convert_to<unsigned long>();
    auto c = norm_poly_coeffs(p);
    auto e = loop_power_coeffs(p);
    const Int sign = (p % 2 == 0) ? 1 : -1;  // (-1)^p

    auto zero_rule = [&](Arrow x, Arrow y) {
        Word l;
        l.letters = {x, y};
        rules_.push_back({l, {}, arrow_name(x) + "." + arrow_name(y) + " -> 0"});
    };
    zero_rule(Arrow::a01, Arrow::a12);
    zero_rule(Arrow::a02, Arrow::a21);
    zero_rule(Arrow::a10, Arrow::a02);
    zero_rule(Arrow::a12, Arrow::a20);
    zero_rule(Arrow::a20, Arrow::a01);
    zero_rule(Arrow::a21, Arrow::a10);

    // a01.a10 -> N(t0), a10.a01 -> N(s1), both expanded in loop powers.
    {
        LinComb rhs;
        for (unsigned long r = 0; r < p; ++r) rhs[loop0(r)] = c[r];
        Word l;
        l.letters = {Arrow::a01, Arrow::a10};
        rules_.push_back({l, rhs, "a01.a10 -> N(t0)"});
    }
    {
        LinComb rhs;
        for (unsigned long r = 0; r < p; ++r) rhs[loop1(r)] = c[r];
        Word l;
        l.letters = {Arrow::a10, Arrow::a01};
        rules_.push_back({l, rhs, "a10.a01 -> N(s1)"});
    }

    // Loop power truncations from t0^p = 1, s1^p = 1, t2^p = 1.
    auto power_rule = [&](Word (*mk)(unsigned long), const char* name) {
        LinComb rhs;
        for (unsigned long r = 1; r < p; ++r) rhs[mk(r)] = e[r];
        rules_.push_back({mk(p), rhs, name});
    };
    power_rule(&loop0, "l0^p");
    power_rule(&loop1, "l1^p");
    power_rule(&loop_u, "u^p");

    // w^(p-1) from p*1_2 = N(t2) + N(s2).
    {
        LinComb rhs;
        rhs[idem_word(2)] = sign * Int(p);
        for (unsigned long r = 1; r < p; ++r) rhs[loop_u(r)] = sign * c[r];
        for (unsigned long r = 1; r + 1 < p; ++r) rhs[loop_w(r)] = sign * c[r];
        rules_.push_back({loop_w(p - 1), rhs, "w^(p-1)"});
    }

    // N(t0).a02 = 0, a20.N(t0) = 0, N(s1).a12 = 0, a21.N(s1) = 0, oriented on
    // the top loop power.
    auto edge_rule = [&](const Word& lead, auto mkterm, const char* name) {
        LinComb rhs;
        rhs[mkterm(0)] = sign * Int(p);
        for (unsigned long r = 1; r + 1 < p; ++r) rhs[mkterm(r)] = sign * c[r];
        rules_.push_back({lead, rhs, name});
    };
    auto cat = [](const Word& a, const Word& b) {
        Word r;
        if (!Word::concat(a, b, r)) throw kg_error("schema concat mismatch");
        return r;
    };
    edge_rule(cat(loop0(p - 1), arrow_word(Arrow::a02)),
              [&](unsigned long r) { return cat(loop0(r), arrow_word(Arrow::a02)); },
              "l0^(p-1).a02");
    edge_rule(cat(arrow_word(Arrow::a20), loop0(p - 1)),
              [&](unsigned long r) { return cat(arrow_word(Arrow::a20), loop0(r)); },
              "a20.l0^(p-1)");
    edge_rule(cat(loop1(p - 1), arrow_word(Arrow::a12)),
              [&](unsigned long r) { return cat(loop1(r), arrow_word(Arrow::a12)); },
              "l1^(p-1).a12");
    edge_rule(cat(arrow_word(Arrow::a21), loop1(p - 1)),
              [&](unsigned long r) { return cat(arrow_word(Arrow::a21), loop1(r)); },
              "a21.l1^(p-1)");
}

void RewriteSystem::verify_orientation() const {
    for (const auto& r : rules_) {
        int stgt = r.lhs.target(), ssrc = r.lhs.source(), deg = r.lhs.degree();
        for (const auto& [w, cf] : r.rhs) {
            if (cf == 0) throw kg_error("zero coefficient in rule " + r.name);
            if (w.target() != stgt || w.source() != ssrc)
                throw kg_error("rule not vertex-typed: " + r.name);
            if (w.degree() != deg) throw kg_error("rule not degree-homogeneous: " + r.name);
            if (compare(r.lhs, w) <= 0) throw kg_error("rule does not decrease: " + r.name);
        }
    }
}

bool RewriteSystem::is_irreducible(const Word& w) const {
    const auto& ls = w.letters;
    for (std::size_t pos = 0; pos < ls.size(); ++pos)
        for (const auto& r : rules_) {
            const auto& pat = r.lhs.letters;
            if (pos + pat.size() > ls.size()) continue;
            if (std::equal(pat.begin(), pat.end(), ls.begin() + pos)) return false;
        }
    return true;
}

namespace {

// Leftmost match, first rule wins; returns replacement or nothing.
std::optional<LinComb> reduce_once(const std::vector<Rule>& rules, const Word& w) {
    const auto& ls = w.letters;
    for (std::size_t pos = 0; pos < ls.size(); ++pos)
        for (const auto& r : rules) {
            const auto& pat = r.lhs.letters;
            if (pos + pat.size() > ls.size()) continue;
            if (!std::equal(pat.begin(), pat.end(), ls.begin() + pos)) continue;
            LinComb out;
            for (const auto& [rw, rc] : r.rhs) {
                Word nw;
                nw.letters.assign(ls.begin(), ls.begin() + pos);
                nw.letters.insert(nw.letters.end(), rw.letters.begin(), rw.letters.end());
                nw.letters.insert(nw.letters.end(), ls.begin() + pos + pat.size(), ls.end());
                nw.vertex = nw.letters.empty() ? w.source() : 0;
                out[nw] += rc;
                if (out[nw] == 0) out.erase(nw);
            }
            return out;
        }
    return std::nullopt;
}

}  // namespace

LinComb RewriteSystem::reduce_word(const Word& w) const {
    return reduce(single(w));
}

LinComb RewriteSystem::reduce(const LinComb& x) const {
    LinComb out;
    std::vector<std::pair<Word, Int>> stack(x.begin(), x.end());
    while (!stack.empty()) {
        auto [cur, coef] = std::move(stack.back());
        stack.pop_back();
        if (coef == 0) continue;
        auto red = reduce_once(rules_, cur);
        if (!red) {
            out[cur] += coef;
            if (out[cur] == 0) out.erase(cur);
            continue;
        }
        for (auto& [rw, rc] : *red) stack.emplace_back(rw, rc * coef);
    }
    return out;
}

void RewriteSystem::verify_confluence() {
    auto check = [&](const Word& super, const LinComb& red1, const LinComb& red2,
                     const Rule& r1, const Rule& r2) {
        if (reduce(red1) != reduce(red2)) {
            failure_ = "critical pair fails on " + super.to_string() + " between [" + r1.name +
                       "] and [" + r2.name + "]";
            return false;
        }
        return true;
    };

    for (const auto& r1 : rules_)
        for (const auto& r2 : rules_) {
            const auto& l1 = r1.lhs.letters;
            const auto& l2 = r2.lhs.letters;
            // Proper overlaps: nonempty suffix of l1 equals prefix of l2.
            for (std::size_t o = 1; o < std::min(l1.size(), l2.size()); ++o) {
                if (!std::equal(l2.begin(), l2.begin() + o, l1.end() - o)) continue;
                Word super;
                super.letters = l1;
                super.letters.insert(super.letters.end(), l2.begin() + o, l2.end());
                // Via r1 at position 0:
                LinComb via1;
                for (const auto& [rw, rc] : r1.rhs) {
                    Word t = rw;
                    t.letters.insert(t.letters.end(), l2.begin() + o, l2.end());
                    t.vertex = t.letters.empty() ? super.source() : 0;
                    via1[t] += rc;
                }
                // Via r2 at position |l1| - o:
                LinComb via2;
                for (const auto& [rw, rc] : r2.rhs) {
                    Word t;
                    t.letters.assign(l1.begin(), l1.end() - o);
                    t.letters.insert(t.letters.end(), rw.letters.begin(), rw.letters.end());
                    t.vertex = t.letters.empty() ? super.source() : 0;
                    via2[t] += rc;
                }
                if (!check(super, via1, via2, r1, r2)) return;
            }
            // Containment: l1 occurs strictly inside l2.
            if (&r1 != &r2 && l1.size() < l2.size()) {
                for (std::size_t pos = 0; pos + l1.size() <= l2.size(); ++pos) {
                    if (!std::equal(l1.begin(), l1.end(), l2.begin() + pos)) continue;
                    LinComb via1;
                    for (const auto& [rw, rc] : r1.rhs) {
                        Word t;
                        t.letters.assign(l2.begin(), l2.begin() + pos);
                        t.letters.insert(t.letters.end(), rw.letters.begin(), rw.letters.end());
                        t.letters.insert(t.letters.end(), l2.begin() + pos + l1.size(), l2.end());
                        t.vertex = t.letters.empty() ? r2.lhs.source() : 0;
                        via1[t] += rc;
                    }
                    if (!check(r2.lhs, via1, r2.rhs, r1, r2)) return;
                }
            }
        }
    confluent_ = true;
}

RewriteSystem::RewriteSystem(const Int& p) : p_(p) {
    if (!is_prime(p)) throw kg_error("not a prime: " + p.str());
    build_rules();
    verify_orientation();
    verify_confluence();
}

std::map<std::pair<int, int>, std::vector<Word>> RewriteSystem::basis() const {
    const unsigned long cap = 2 * p_.convert_to<unsigned long>();
    std::map<std::pair<int, int>, std::vector<Word>> out;
    std::deque<Word> queue;
    for (int v = 0; v < 3; ++v) queue.push_back(idem_word(v));
    while (!queue.empty()) {
        Word w = std::move(queue.front());
        queue.pop_front();
        out[{w.target(), w.source()}].push_back(w);
        for (int ai = 0; ai < 6; ++ai) {
            Arrow a = static_cast<Arrow>(ai);
            if (arrow_target(a) != w.source()) continue;
            Word nw = w.extended(a);
            if (!is_irreducible(nw)) continue;
            if (nw.letters.size() > cap)
                throw kg_error("irreducible word beyond the length cap; basis incomplete");
            queue.push_back(nw);
        }
    }
    return out;
}

// --- presentation -----------------------------------------------------------

namespace {

LinComb idem_lc(int v) { return single(idem_word(v)); }
LinComb arrow_lc(Arrow a) { return single(arrow_word(a)); }

LinComb lincomb_pow_raw(const LinComb& x, unsigned long n, int vertex) {
    LinComb r = idem_lc(vertex);
    for (unsigned long i = 0; i < n; ++i) r = lincomb_mul_raw(r, x);
    return r;
}

LinComb norm_raw(const LinComb& x, unsigned long p, int vertex) {
    LinComb r;
    for (unsigned long i = 0; i < p; ++i) r = lincomb_add(r, lincomb_pow_raw(x, i, vertex));
    return r;
}

struct Abbrev {
    LinComb t0, s1, t2, s2;
};

Abbrev abbreviations() {
    Abbrev ab;
    ab.t0 = lincomb_add(idem_lc(0),
                        lincomb_scale(lincomb_mul_raw(arrow_lc(Arrow::a02), arrow_lc(Arrow::a20)), -1));
    ab.s1 = lincomb_add(idem_lc(1),
                        lincomb_scale(lincomb_mul_raw(arrow_lc(Arrow::a12), arrow_lc(Arrow::a21)), -1));
    ab.t2 = lincomb_add(idem_lc(2),
                        lincomb_scale(lincomb_mul_raw(arrow_lc(Arrow::a20), arrow_lc(Arrow::a02)), -1));
    ab.s2 = lincomb_add(idem_lc(2),
                        lincomb_scale(lincomb_mul_raw(arrow_lc(Arrow::a21), arrow_lc(Arrow::a12)), -1));
    return ab;
}

}  // namespace

RingPresentation build_presentation(const Int& p) {
    if (!is_prime(p)) throw kg_error("not a prime: " + p.str());
    unsigned long pl = p.convert_to<unsigned long>();
    RingPresentation pres;
    pres.p = p;
    auto ab = abbreviations();

    auto rel = [&](std::string name, LinComb lhs, LinComb rhs) {
        pres.relations.push_back({std::move(name), std::move(lhs), std::move(rhs)});
    };
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            rel("1_" + std::to_string(j) + "*1_" + std::to_string(k),
                lincomb_mul_raw(idem_lc(j), idem_lc(k)), j == k ? idem_lc(j) : LinComb{});
    {
        LinComb unit = lincomb_add(lincomb_add(idem_lc(0), idem_lc(1)), idem_lc(2));
        rel("1_0+1_1+1_2 = 1", unit, unit);
    }
    static const Arrow all[6] = {Arrow::a01, Arrow::a10, Arrow::a02,
                                 Arrow::a20, Arrow::a12, Arrow::a21};
    for (Arrow a : all)
        rel("1_j*" + arrow_name(a) + "*1_k",
            lincomb_mul_raw(lincomb_mul_raw(idem_lc(arrow_target(a)), arrow_lc(a)),
                            idem_lc(arrow_source(a))),
            arrow_lc(a));
    for (Arrow a : all)
        for (Arrow b : all) {
            if (arrow_source(a) != arrow_target(b)) continue;
            if (arrow_target(a) == arrow_source(b)) continue;  // backtracking products
            rel(arrow_name(a) + "*" + arrow_name(b) + " = 0",
                lincomb_mul_raw(arrow_lc(a), arrow_lc(b)), LinComb{});
        }
    rel("a01*a10 = N(t0)", lincomb_mul_raw(arrow_lc(Arrow::a01), arrow_lc(Arrow::a10)),
        norm_raw(ab.t0, pl, 0));
    rel("a10*a01 = N(s1)", lincomb_mul_raw(arrow_lc(Arrow::a10), arrow_lc(Arrow::a01)),
        norm_raw(ab.s1, pl, 1));
    rel("p*1_2 = N(t2)+N(s2)", lincomb_scale(idem_lc(2), p),
        lincomb_add(norm_raw(ab.t2, pl, 2), norm_raw(ab.s2, pl, 2)));

    auto der = [&](std::string name, LinComb lhs, LinComb rhs) {
        pres.derived.push_back({std::move(name), std::move(lhs), std::move(rhs)});
    };
    der("t0^p = 1_0", lincomb_pow_raw(ab.t0, pl, 0), idem_lc(0));
    der("t2^p = 1_2", lincomb_pow_raw(ab.t2, pl, 2), idem_lc(2));
    der("s1^p = 1_1", lincomb_pow_raw(ab.s1, pl, 1), idem_lc(1));
    der("s2^p = 1_2", lincomb_pow_raw(ab.s2, pl, 2), idem_lc(2));
    der("t0*a01 = a01", lincomb_mul_raw(ab.t0, arrow_lc(Arrow::a01)), arrow_lc(Arrow::a01));
    der("t2*a20 = a20*t0", lincomb_mul_raw(ab.t2, arrow_lc(Arrow::a20)),
        lincomb_mul_raw(arrow_lc(Arrow::a20), ab.t0));
    der("a10*t0 = a10", lincomb_mul_raw(arrow_lc(Arrow::a10), ab.t0), arrow_lc(Arrow::a10));
    der("s1*a10 = a10", lincomb_mul_raw(ab.s1, arrow_lc(Arrow::a10)), arrow_lc(Arrow::a10));
    der("s2*a21 = a21*s1", lincomb_mul_raw(ab.s2, arrow_lc(Arrow::a21)),
        lincomb_mul_raw(arrow_lc(Arrow::a21), ab.s1));
    der("a01*s1 = a01", lincomb_mul_raw(arrow_lc(Arrow::a01), ab.s1), arrow_lc(Arrow::a01));
    der("N(t0)*a02 = 0", lincomb_mul_raw(norm_raw(ab.t0, pl, 0), arrow_lc(Arrow::a02)), {});
    der("a20*N(t0) = 0", lincomb_mul_raw(arrow_lc(Arrow::a20), norm_raw(ab.t0, pl, 0)), {});
    der("N(s1)*a12 = 0", lincomb_mul_raw(norm_raw(ab.s1, pl, 1), arrow_lc(Arrow::a12)), {});
    der("a21*N(s1) = 0", lincomb_mul_raw(arrow_lc(Arrow::a21), norm_raw(ab.s1, pl, 1)), {});
    return pres;
}

RewriteSystem complete_rewrite_system(const RingPresentation& pres) {
    RewriteSystem sys(pres.p);
    if (!sys.confluence_verified())
        throw kg_error("rewrite completion failed: " + sys.failure());
    return sys;
}

bool RelationReport::all_ok() const {
    return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.ok; });
}

namespace {

RelationReport check_relations(const RewriteSystem& sys, const std::vector<Relation>& rels) {
    RelationReport rep;
    for (const auto& r : rels)
        rep.entries.push_back({r.name, sys.reduce(r.lhs) == sys.reduce(r.rhs)});
    return rep;
}

}  // namespace

RelationReport verify_derived_relations(const Int& p) {
    auto pres = build_presentation(p);
    RewriteSystem sys = complete_rewrite_system(pres);
    return check_relations(sys, pres.derived);
}

RelationReport verify_presentation(const Int& p) {
    auto pres = build_presentation(p);
    RewriteSystem sys = complete_rewrite_system(pres);
    return check_relations(sys, pres.relations);
}

// --- tensor product ring -----------------------------------------------------

int TensorWord::degree() const {
    int d = 0;
    for (const auto& w : factor) d ^= w.degree();
    return d;
}

std::vector<int> TensorWord::source() const {
    std::vector<int> v;
    v.reserve(factor.size());
    for (const auto& w : factor) v.push_back(w.source());
    return v;
}

std::vector<int> TensorWord::target() const {
    std::vector<int> v;
    v.reserve(factor.size());
    for (const auto& w : factor) v.push_back(w.target());
    return v;
}

std::string TensorWord::to_string() const {
    std::string s;
    for (const auto& w : factor) {
        if (!s.empty()) s += " (x) ";
        s += w.to_string();
    }
    return s;
}

KgRing::KgRing(std::vector<Int> primes) : primes_(std::move(primes)) {
    if (primes_.empty()) throw kg_error("empty prime list");
    std::sort(primes_.begin(), primes_.end());
    for (std::size_t i = 0; i + 1 < primes_.size(); ++i)
        if (primes_[i] == primes_[i + 1]) throw kg_error("repeated prime in list");
    systems_.reserve(primes_.size());
    for (const auto& p : primes_) {
        RewriteSystem sys(p);
        if (!sys.confluence_verified())
            throw kg_error("rewrite completion failed: " + sys.failure());
        systems_.push_back(std::move(sys));
    }
}

KgRingPtr KgRing::make(std::vector<Int> primes) {
    // Contexts are immutable; cache them per prime list.
    static std::mutex mu;
    static std::map<std::vector<Int>, KgRingPtr> cache;
    std::sort(primes.begin(), primes.end());
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(primes);
    if (it != cache.end()) return it->second;
    KgRingPtr r(new KgRing(primes));
    cache.emplace(std::move(primes), r);
    return r;
}

RingElement::RingElement(KgRingPtr ring, std::map<TensorWord, Int> terms)
    : ring_(std::move(ring)), terms_(std::move(terms)) {
    for (const auto& [w, c] : terms_)
        if (w.factor.size() != ring_->nfactors()) throw kg_error("tensor arity mismatch");
}

RingElement KgRing::zero() const {
    return RingElement(shared_from_this(), {});
}

RingElement KgRing::monomial(const TensorWord& w) const {
    return normal_form(RingElement(shared_from_this(), {{w, 1}}));
}

RingElement KgRing::idem(const std::vector<int>& vertex) const {
    if (vertex.size() != nfactors()) throw kg_error("vertex arity mismatch");
    TensorWord w;
    for (int v : vertex) w.factor.push_back(idem_word(v));
    return RingElement(shared_from_this(), {{w, 1}});
}

RingElement KgRing::unit() const {
    std::map<TensorWord, Int> terms;
    std::vector<int> v(nfactors(), 0);
    while (true) {
        TensorWord w;
        for (int i : v) w.factor.push_back(idem_word(i));
        terms[w] = 1;
        std::size_t j = 0;
        for (; j < v.size(); ++j) {
            if (++v[j] < 3) break;
            v[j] = 0;
        }
        if (j == v.size()) break;
    }
    return RingElement(shared_from_this(), std::move(terms));
}

RingElement KgRing::gen_idem(std::size_t j, int i) const {
    if (j >= nfactors()) throw kg_error("factor index out of range");
    const RingElement one = unit();
    std::map<TensorWord, Int> terms;
    for (const auto& [w, c] : one.terms()) {
        if (w.factor[j].vertex != i) continue;
        terms[w] = c;
    }
    return RingElement(shared_from_this(), std::move(terms));
}

RingElement KgRing::gen_arrow(std::size_t j, Arrow a) const {
    if (j >= nfactors()) throw kg_error("factor index out of range");
    const RingElement one = unit();
    std::map<TensorWord, Int> terms;
    for (const auto& [w, c] : one.terms()) {
        if (w.factor[j].vertex != arrow_source(a)) continue;
        TensorWord nw = w;
        nw.factor[j] = arrow_word(a);
        terms[nw] = c;
    }
    return RingElement(shared_from_this(), std::move(terms));
}

RingElement KgRing::normal_form(const RingElement& x) const {
    std::map<TensorWord, Int> out;
    for (const auto& [tw, c] : x.terms()) {
        // Reduce factorwise, then expand the product of combinations.
        std::vector<LinComb> parts(nfactors());
        for (std::size_t j = 0; j < nfactors(); ++j) parts[j] = systems_[j].reduce_word(tw.factor[j]);
        std::vector<std::pair<TensorWord, Int>> acc{{TensorWord{}, c}};
        bool dead = false;
        for (std::size_t j = 0; j < nfactors() && !dead; ++j) {
            if (parts[j].empty()) {
                dead = true;
                break;
            }
            std::vector<std::pair<TensorWord, Int>> next;
            for (const auto& [prefix, pc] : acc)
                for (const auto& [w, wc] : parts[j]) {
                    TensorWord nw = prefix;
                    nw.factor.push_back(w);
                    next.emplace_back(std::move(nw), pc * wc);
                }
            acc = std::move(next);
        }
        if (dead) continue;
        for (auto& [w, cc] : acc) {
            out[w] += cc;
            if (out[w] == 0) out.erase(w);
        }
    }
    return RingElement(shared_from_this(), std::move(out));
}

bool RingElement::is_homogeneous() const {
    if (terms_.empty()) return true;
    auto it = terms_.begin();
    auto src = it->first.source();
    auto tgt = it->first.target();
    int deg = it->first.degree();
    for (const auto& [w, c] : terms_)
        if (w.source() != src || w.target() != tgt || w.degree() != deg) return false;
    return true;
}

int RingElement::degree() const {
    if (terms_.empty()) return 0;
    int d = terms_.begin()->first.degree();
    for (const auto& [w, c] : terms_)
        if (w.degree() != d) throw kg_error("degree of inhomogeneous element");
    return d;
}

std::vector<int> RingElement::source() const {
    if (terms_.empty()) throw kg_error("source of zero element");
    auto s = terms_.begin()->first.source();
    for (const auto& [w, c] : terms_)
        if (w.source() != s) throw kg_error("source of vertex-mixed element");
    return s;
}

std::vector<int> RingElement::target() const {
    if (terms_.empty()) throw kg_error("target of zero element");
    auto t = terms_.begin()->first.target();
    for (const auto& [w, c] : terms_)
        if (w.target() != t) throw kg_error("target of vertex-mixed element");
    return t;
}

RingElement RingElement::operator+(const RingElement& o) const {
    if (ring_->primes() != o.ring_->primes()) throw kg_error("mismatched prime lists");
    auto terms = terms_;
    for (const auto& [w, c] : o.terms_) {
        terms[w] += c;
        if (terms[w] == 0) terms.erase(w);
    }
    return RingElement(ring_, std::move(terms));
}

RingElement RingElement::operator-(const RingElement& o) const {
    return *this + o * Int(-1);
}

RingElement RingElement::operator*(const Int& c) const {
    if (c == 0) return RingElement(ring_, {});
    auto terms = terms_;
    for (auto& [w, x] : terms) x *= c;
    return RingElement(ring_, std::move(terms));
}

RingElement RingElement::operator*(const RingElement& o) const {
    if (ring_->primes() != o.ring_->primes()) throw kg_error("mismatched prime lists");
    std::map<TensorWord, Int> raw;
    for (const auto& [wa, ca] : terms_)
        for (const auto& [wb, cb] : o.terms_) {
            TensorWord w;
            bool ok = true;
            w.factor.reserve(wa.factor.size());
            for (std::size_t j = 0; j < wa.factor.size(); ++j) {
                Word f;
                if (!Word::concat(wa.factor[j], wb.factor[j], f)) {
                    ok = false;
                    break;
                }
                if (f.letters.empty()) f.vertex = wa.factor[j].target();
                w.factor.push_back(std::move(f));
            }
            if (!ok) continue;
            raw[w] += ca * cb;
            if (raw[w] == 0) raw.erase(w);
        }
    return ring_->normal_form(RingElement(ring_, std::move(raw)));
}

bool RingElement::operator==(const RingElement& o) const {
    return ring_->primes() == o.ring_->primes() && terms_ == o.terms_;
}

std::string RingElement::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (c != 1) os << c.str() << "*";
        os << w.to_string();
    }
    return os.str();
}

}  // namespace kgring
