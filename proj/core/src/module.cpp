#include "kgring/module.hpp"

#include <algorithm>
#include <sstream>

namespace kgring {

std::size_t vertex_index(const Vertex& v) {
    std::size_t idx = 0;
    for (int d : v) {
        if (d < 0 || d > 2) throw kg_error("vertex digit out of range");
        idx = idx * 3 + static_cast<std::size_t>(d);
    }
    return idx;
}

Vertex vertex_of_index(std::size_t idx, std::size_t k) {
    Vertex v(k, 0);
    for (std::size_t i = k; i-- > 0;) {
        v[i] = static_cast<int>(idx % 3);
        idx /= 3;
    }
    return v;
}

std::string vertex_string(const Vertex& v) {
    std::string s;
    for (int d : v) s += static_cast<char>('0' + d);
    return s;
}

Vertex vertex_from_string(const std::string& s) {
    Vertex v;
    for (char c : s) {
        if (c < '0' || c > '2') throw kg_error("bad vertex string: " + s);
        v.push_back(c - '0');
    }
    return v;
}

namespace {

std::size_t npow3(std::size_t k) {
    std::size_t n = 1;
    while (k--) n *= 3;
    return n;
}

std::size_t replace_digit(std::size_t vidx, std::size_t k, std::size_t j, int digit) {
    Vertex v = vertex_of_index(vidx, k);
    v[j] = digit;
    return vertex_index(v);
}

int digit_of(std::size_t vidx, std::size_t k, std::size_t j) {
    return vertex_of_index(vidx, k)[j];
}

}  // namespace

MapPair zero_pair(const GradedGroup& src, const GradedGroup& tgt, int parity) {
    if (parity == 0)
        return {QMat(tgt.even.ngens(), src.even.ngens()), QMat(tgt.odd.ngens(), src.odd.ngens())};
    return {QMat(tgt.odd.ngens(), src.even.ngens()), QMat(tgt.even.ngens(), src.odd.ngens())};
}

MapPair identity_pair(const GradedGroup& g) {
    return {QMat::identity(g.even.ngens()), QMat::identity(g.odd.ngens())};
}

MapPair pair_add(const MapPair& a, const MapPair& b) {
    return {a.plus + b.plus, a.minus + b.minus};
}

MapPair pair_scale(const MapPair& a, const Rat& c) { return {a.plus * c, a.minus * c}; }

MapPair pair_compose(const MapPair& g, int gp, const MapPair& f, int fp) {
    (void)gp;
    // The component of g that receives f's output parity.
    if (fp == 0) return {g.plus * f.plus, g.minus * f.minus};
    return {g.minus * f.plus, g.plus * f.minus};
}

// --- KGModule ----------------------------------------------------------------

KGModulePtr KGModule::create(KgRingPtr ring, Int m, std::vector<GradedGroup> comps,
                             const ActionMap& actions) {
    if (!ring) throw kg_error("module needs a ring context");
    if (m < 1) throw kg_error("modulus must be >= 1");
    auto mod = std::shared_ptr<KGModule>(new KGModule());
    const std::size_t k = ring->nfactors();
    if (comps.size() != npow3(k)) throw kg_error("component count must be 3^k");
    for (auto& c : comps) {
        if (c.even.m != m || c.odd.m != m) throw kg_error("component modulus mismatch");
        c.even.check_invariants();
        c.odd.check_invariants();
    }
    mod->ring_ = std::move(ring);
    mod->m_ = std::move(m);
    mod->comps_ = std::move(comps);
    mod->actions_.assign(k, {});
    for (std::size_t j = 0; j < k; ++j)
        for (int ai = 0; ai < 6; ++ai)
            mod->actions_[j][ai].resize(mod->comps_.size());

    // Fill defaults, then overlay the provided actions.
    for (std::size_t j = 0; j < k; ++j)
        for (int ai = 0; ai < 6; ++ai) {
            Arrow a = static_cast<Arrow>(ai);
            for (std::size_t v = 0; v < mod->comps_.size(); ++v) {
                if (digit_of(v, k, j) != arrow_source(a)) continue;
                std::size_t w = replace_digit(v, k, j, arrow_target(a));
                mod->actions_[j][ai][v] =
                    zero_pair(mod->comps_[v], mod->comps_[w], arrow_degree(a));
            }
        }
    for (const auto& [key, mp] : actions) {
        auto [j, a, v] = key;
        if (j >= k) throw kg_error("action factor index out of range");
        if (v >= mod->comps_.size()) throw kg_error("action vertex out of range");
        if (digit_of(v, k, j) != arrow_source(a))
            throw kg_error("action at vertex with wrong digit");
        std::size_t w = replace_digit(v, k, j, arrow_target(a));
        const GradedGroup& S = mod->comps_[v];
        const GradedGroup& T = mod->comps_[w];
        const AbGroup& tp = arrow_degree(a) == 0 ? T.even : T.odd;
        const AbGroup& tm = arrow_degree(a) == 0 ? T.odd : T.even;
        if (!map_is_valid(mp.plus, S.even, tp) || !map_is_valid(mp.minus, S.odd, tm))
            throw kg_error("action block is not a well-defined map (factor " + std::to_string(j) +
                           ", " + arrow_name(a) + ", vertex " +
                           vertex_string(vertex_of_index(v, k)) + ")");
        mod->actions_[j][ai][v] = {normalize_map(mp.plus, S.even, tp),
                                   normalize_map(mp.minus, S.odd, tm)};
    }
    return mod;
}

const MapPair& KGModule::action(std::size_t j, Arrow a, std::size_t src_vidx) const {
    if (j >= nfactors() || src_vidx >= nvertices()) throw kg_error("action index out of range");
    if (digit_of(src_vidx, nfactors(), j) != arrow_source(a))
        throw kg_error("no action: vertex digit does not match arrow source");
    return actions_[j][static_cast<int>(a)][src_vidx];
}

std::size_t KGModule::arrow_target_vertex(std::size_t j, Arrow a, std::size_t src_vidx) const {
    return replace_digit(src_vidx, nfactors(), j, arrow_target(a));
}

bool KGModule::is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(),
                       [](const GradedGroup& g) { return g.is_zero(); });
}

bool KGModule::operator==(const KGModule& o) const {
    if (primes() != o.primes() || m_ != o.m_ || comps_ != o.comps_) return false;
    for (std::size_t j = 0; j < nfactors(); ++j)
        for (int ai = 0; ai < 6; ++ai)
            if (actions_[j][ai] != o.actions_[j][ai]) return false;
    return true;
}

// --- module maps --------------------------------------------------------------

MapPair ModuleMap::block_or_zero(std::size_t t, std::size_t s) const {
    auto it = blocks.find({t, s});
    if (it != blocks.end()) return it->second;
    return zero_pair(src->comp(s), tgt->comp(t), parity);
}

bool ModuleMap::is_vertex_diagonal() const {
    for (const auto& [key, mp] : blocks) {
        if (key.first == key.second) continue;
        if (!mp.plus.is_zero() || !mp.minus.is_zero()) return false;
    }
    return true;
}

ModuleMap identity_map(const KGModulePtr& m) {
    ModuleMap f{m, m, 0, {}};
    for (std::size_t v = 0; v < m->nvertices(); ++v) f.blocks[{v, v}] = identity_pair(m->comp(v));
    return f;
}

ModuleMap zero_module_map(const KGModulePtr& src, const KGModulePtr& tgt, int parity) {
    return ModuleMap{src, tgt, parity, {}};
}

ModuleMap map_compose(const ModuleMap& g, const ModuleMap& f) {
    if (g.src.get() != f.tgt.get()) throw kg_error("map_compose: middle modules differ");
    ModuleMap out{f.src, g.tgt, (f.parity + g.parity) % 2, {}};
    for (const auto& [kg_, bg] : g.blocks)
        for (const auto& [kf, bf] : f.blocks) {
            if (kg_.second != kf.first) continue;
            MapPair prod = pair_compose(bg, g.parity, bf, f.parity);
            auto key = std::make_pair(kg_.first, kf.second);
            auto it = out.blocks.find(key);
            if (it == out.blocks.end())
                out.blocks[key] = prod;
            else
                it->second = pair_add(it->second, prod);
        }
    return out;
}

ModuleMap map_add(const ModuleMap& a, const ModuleMap& b) {
    if (a.parity != b.parity) throw kg_error("map_add: parity mismatch");
    ModuleMap out = a;
    for (const auto& [key, mp] : b.blocks) {
        auto it = out.blocks.find(key);
        if (it == out.blocks.end())
            out.blocks[key] = mp;
        else
            it->second = pair_add(it->second, mp);
    }
    return out;
}

ModuleMap map_scale(const ModuleMap& a, const Rat& c) {
    ModuleMap out = a;
    for (auto& [key, mp] : out.blocks) mp = pair_scale(mp, c);
    return out;
}

namespace {

// Normalized comparison of one block against a reference.
bool block_equal(const MapPair& a, const MapPair& b, const GradedGroup& src,
                 const GradedGroup& tgt, int parity) {
    const AbGroup& tp = parity == 0 ? tgt.even : tgt.odd;
    const AbGroup& tm = parity == 0 ? tgt.odd : tgt.even;
    return maps_equal(a.plus, b.plus, src.even, tp) && maps_equal(a.minus, b.minus, src.odd, tm);
}

}  // namespace

bool module_maps_equal(const ModuleMap& a, const ModuleMap& b) {
    if (a.src->primes() != b.src->primes() || a.tgt->primes() != b.tgt->primes()) return false;
    if (a.parity != b.parity) return false;
    for (std::size_t t = 0; t < a.tgt->nvertices(); ++t)
        for (std::size_t s = 0; s < a.src->nvertices(); ++s) {
            if (a.blocks.count({t, s}) == 0 && b.blocks.count({t, s}) == 0) continue;
            if (!block_equal(a.block_or_zero(t, s), b.block_or_zero(t, s), a.src->comp(s),
                             a.tgt->comp(t), a.parity))
                return false;
        }
    return true;
}

bool map_blocks_valid(const ModuleMap& f) {
    for (const auto& [key, mp] : f.blocks) {
        const GradedGroup& S = f.src->comp(key.second);
        const GradedGroup& T = f.tgt->comp(key.first);
        const AbGroup& tp = f.parity == 0 ? T.even : T.odd;
        const AbGroup& tm = f.parity == 0 ? T.odd : T.even;
        if (!map_is_valid(mp.plus, S.even, tp) || !map_is_valid(mp.minus, S.odd, tm)) return false;
    }
    return true;
}

ModuleMap arrow_action_map(const KGModulePtr& m, std::size_t j, Arrow a) {
    ModuleMap f{m, m, arrow_degree(a), {}};
    for (std::size_t v = 0; v < m->nvertices(); ++v) {
        if (digit_of(v, m->nfactors(), j) != arrow_source(a)) continue;
        f.blocks[{m->arrow_target_vertex(j, a, v), v}] = m->action(j, a, v);
    }
    return f;
}

ModuleMap idem_action_map(const KGModulePtr& m, std::size_t j, int digit) {
    ModuleMap f{m, m, 0, {}};
    for (std::size_t v = 0; v < m->nvertices(); ++v)
        if (digit_of(v, m->nfactors(), j) == digit) f.blocks[{v, v}] = identity_pair(m->comp(v));
    return f;
}

MapPair word_action(const KGModule& m, std::size_t j, const Word& w, std::size_t src_vidx) {
    MapPair cur = identity_pair(m.comp(src_vidx));
    int parity = 0;
    std::size_t vid = src_vidx;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        const MapPair& a = m.action(j, *it, vid);
        cur = pair_compose(a, arrow_degree(*it), cur, parity);
        parity ^= arrow_degree(*it);
        vid = m.arrow_target_vertex(j, *it, vid);
    }
    return cur;
}

ModuleMap element_action(const KGModulePtr& m, const RingElement& x) {
    if (!x.is_homogeneous()) throw kg_error("element_action needs a homogeneous element");
    ModuleMap out{m, m, x.is_zero() ? 0 : x.degree(), {}};
    for (const auto& [tw, c] : x.terms()) {
        std::size_t vid = vertex_index(tw.source());
        MapPair acc = identity_pair(m->comp(vid));
        int parity = 0;
        for (std::size_t j = 0; j < m->nfactors(); ++j) {
            MapPair wa = word_action(*m, j, tw.factor[j], vid);
            acc = pair_compose(wa, tw.factor[j].degree(), acc, parity);
            parity ^= tw.factor[j].degree();
            vid = vertex_index([&] {
                Vertex v = vertex_of_index(vid, m->nfactors());
                v[j] = tw.factor[j].target();
                return v;
            }());
        }
        auto key = std::make_pair(vid, vertex_index(tw.source()));
        MapPair scaled = pair_scale(acc, Rat(c));
        auto it = out.blocks.find(key);
        if (it == out.blocks.end())
            out.blocks[key] = scaled;
        else
            it->second = pair_add(it->second, scaled);
    }
    return out;
}

bool commutes_with_factor(const ModuleMap& f, std::size_t j) {
    // Idempotents first: blocks must preserve the j-th digit.
    for (const auto& [key, mp] : f.blocks) {
        if (mp.plus.is_zero() && mp.minus.is_zero()) continue;
        if (digit_of(key.first, f.tgt->nfactors(), j) !=
            digit_of(key.second, f.src->nfactors(), j))
            return false;
    }
    for (int ai = 0; ai < 6; ++ai) {
        Arrow a = static_cast<Arrow>(ai);
        ModuleMap left = map_compose(f, arrow_action_map(f.src, j, a));
        ModuleMap right = map_compose(arrow_action_map(f.tgt, j, a), f);
        if (!module_maps_equal(left, right)) return false;
    }
    return true;
}

bool is_module_map(const ModuleMap& f) {
    if (!map_blocks_valid(f)) return false;
    for (std::size_t j = 0; j < f.src->nfactors(); ++j)
        if (!commutes_with_factor(f, j)) return false;
    return true;
}

bool commutes_outside(const ModuleMap& f, const std::set<std::size_t>& excluded) {
    for (std::size_t j = 0; j < f.src->nfactors(); ++j) {
        if (excluded.count(j)) continue;
        if (!commutes_with_factor(f, j)) return false;
    }
    return true;
}

bool map_is_injective(const ModuleMap& f) {
    auto piece_injective = [](const QMat& mat, const AbGroup& s, const AbGroup& t) {
        QMat ker = kernel_subgroup(mat, s, t);
        for (std::size_t c = 0; c < ker.cols(); ++c)
            if (!element_is_zero(s, ker.col(c))) return false;
        return true;
    };
    for (std::size_t v = 0; v < f.src->nvertices(); ++v) {
        const GradedGroup& S = f.src->comp(v);
        const GradedGroup& T = f.tgt->comp(v);
        MapPair b = f.block_or_zero(v, v);
        const AbGroup& tp = f.parity == 0 ? T.even : T.odd;
        const AbGroup& tm = f.parity == 0 ? T.odd : T.even;
        if (!piece_injective(b.plus, S.even, tp)) return false;
        if (!piece_injective(b.minus, S.odd, tm)) return false;
    }
    return true;
}

bool map_is_surjective(const ModuleMap& f) {
    for (std::size_t v = 0; v < f.src->nvertices(); ++v) {
        const GradedGroup& T = f.tgt->comp(v);
        MapPair b = f.block_or_zero(v, v);
        const AbGroup& tp = f.parity == 0 ? T.even : T.odd;
        const AbGroup& tm = f.parity == 0 ? T.odd : T.even;
        if (!subgroup_contains(tp, b.plus, QMat::identity(tp.ngens()))) return false;
        if (!subgroup_contains(tm, b.minus, QMat::identity(tm.ngens()))) return false;
    }
    return true;
}

bool map_is_isomorphism(const ModuleMap& f) {
    if (!f.is_vertex_diagonal()) return false;
    return map_is_injective(f) && map_is_surjective(f);
}

bool extension_is_exact(const Extension& e) {
    const ModuleMap& i = e.iota;
    const ModuleMap& b = e.beta;
    if (i.parity != 0 || b.parity != 0) return false;
    if (i.tgt.get() != b.src.get()) return false;
    if (!is_module_map(i) || !is_module_map(b)) return false;
    if (!map_is_injective(i) || !map_is_surjective(b)) return false;
    for (std::size_t v = 0; v < i.tgt->nvertices(); ++v) {
        const GradedGroup& mid = i.tgt->comp(v);
        MapPair bi = i.block_or_zero(v, v);
        MapPair bb = b.block_or_zero(v, v);
        if (!image_equals_kernel(bi.plus, bb.plus, i.src->comp(v).even, mid.even,
                                 b.tgt->comp(v).even))
            return false;
        if (!image_equals_kernel(bi.minus, bb.minus, i.src->comp(v).odd, mid.odd,
                                 b.tgt->comp(v).odd))
            return false;
    }
    return true;
}

// --- validate -----------------------------------------------------------------

namespace {

MapPair pair_sub(const MapPair& a, const MapPair& b) { return {a.plus - b.plus, a.minus - b.minus}; }

bool pair_is_zero_mod(const MapPair& mp, const GradedGroup& src, const GradedGroup& tgt,
                      int parity) {
    const AbGroup& tp = parity == 0 ? tgt.even : tgt.odd;
    const AbGroup& tm = parity == 0 ? tgt.odd : tgt.even;
    return map_is_zero(mp.plus, src.even, tp) && map_is_zero(mp.minus, src.odd, tm);
}

MapPair pair_pow(const MapPair& a, const GradedGroup& comp, unsigned long n) {
    MapPair r = identity_pair(comp);
    for (unsigned long i = 0; i < n; ++i) r = pair_compose(a, 0, r, 0);
    return r;
}

MapPair norm_of(const MapPair& t, const GradedGroup& comp, unsigned long p) {
    MapPair r = zero_pair(comp, comp, 0);
    for (unsigned long i = 0; i < p; ++i) r = pair_add(r, pair_pow(t, comp, i));
    return r;
}

}  // namespace

ValidationReport validate(const KGModule& m) {
    ValidationReport rep;
    const std::size_t k = m.nfactors();
    auto where = [&](std::size_t j, std::size_t v) {
        return "p=" + m.primes()[j].str() + " @ v=" + vertex_string(vertex_of_index(v, k));
    };
    auto check_zero = [&](const MapPair& mp, std::size_t sv, std::size_t tv,
                          int parity, const std::string& rel, const std::string& loc) {
        if (!pair_is_zero_mod(mp, m.comp(sv), m.comp(tv), parity))
            rep.issues.push_back({rel, loc});
    };

    for (std::size_t j = 0; j < k; ++j) {
        unsigned long p = m.primes()[j].convert_to<unsigned long>();
        static const Arrow all[6] = {Arrow::a01, Arrow::a10, Arrow::a02,
                                     Arrow::a20, Arrow::a12, Arrow::a21};
        // Vanishing products a_jk a_km for {j,k,m} = {0,1,2}.
        for (Arrow a : all)
            for (Arrow b : all) {
                if (arrow_source(a) != arrow_target(b)) continue;
                if (arrow_target(a) == arrow_source(b)) continue;
                for (std::size_t v = 0; v < m.nvertices(); ++v) {
                    if (digit_of(v, k, j) != arrow_source(b)) continue;
                    std::size_t mid = m.arrow_target_vertex(j, b, v);
                    std::size_t tv = m.arrow_target_vertex(j, a, mid);
                    MapPair prod = pair_compose(m.action(j, a, mid), arrow_degree(a),
                                                m.action(j, b, v), arrow_degree(b));
                    check_zero(prod, v, tv, (arrow_degree(a) + arrow_degree(b)) % 2,
                               arrow_name(a) + "*" + arrow_name(b) + " = 0", where(j, v));
                }
            }
        for (std::size_t v = 0; v < m.nvertices(); ++v) {
            int d = digit_of(v, k, j);
            const GradedGroup& comp = m.comp(v);
            if (d == 0) {
                // a01 a10 = N(t0) with t0 = 1 - a02 a20.
                std::size_t v1 = replace_digit(v, k, j, 1), v2 = replace_digit(v, k, j, 2);
                MapPair a0110 = pair_compose(m.action(j, Arrow::a01, v1), 0,
                                             m.action(j, Arrow::a10, v), 0);
                MapPair loop = pair_compose(m.action(j, Arrow::a02, v2), 0,
                                            m.action(j, Arrow::a20, v), 0);
                MapPair t0 = pair_sub(identity_pair(comp), loop);
                check_zero(pair_sub(a0110, norm_of(t0, comp, p)), v, v, 0, "a01*a10 = N(t0)",
                           where(j, v));
            } else if (d == 1) {
                std::size_t v0 = replace_digit(v, k, j, 0), v2 = replace_digit(v, k, j, 2);
                MapPair a1001 = pair_compose(m.action(j, Arrow::a10, v0), 0,
                                             m.action(j, Arrow::a01, v), 0);
                MapPair loop = pair_compose(m.action(j, Arrow::a12, v2), 1,
                                            m.action(j, Arrow::a21, v), 1);
                MapPair s1 = pair_sub(identity_pair(comp), loop);
                check_zero(pair_sub(a1001, norm_of(s1, comp, p)), v, v, 0, "a10*a01 = N(s1)",
                           where(j, v));
            } else {
                std::size_t v0 = replace_digit(v, k, j, 0), v1 = replace_digit(v, k, j, 1);
                MapPair lu = pair_compose(m.action(j, Arrow::a20, v0), 0,
                                          m.action(j, Arrow::a02, v), 0);
                MapPair lw = pair_compose(m.action(j, Arrow::a21, v1), 1,
                                          m.action(j, Arrow::a12, v), 1);
                MapPair t2 = pair_sub(identity_pair(comp), lu);
                MapPair s2 = pair_sub(identity_pair(comp), lw);
                MapPair lhs = pair_scale(identity_pair(comp), Rat(Int(p)));
                MapPair rhs = pair_add(norm_of(t2, comp, p), norm_of(s2, comp, p));
                check_zero(pair_sub(lhs, rhs), v, v, 0, "p*1_2 = N(t2)+N(s2)", where(j, v));
            }
        }
    }

    // Actions of distinct factors commute.
    static const Arrow all[6] = {Arrow::a01, Arrow::a10, Arrow::a02,
                                 Arrow::a20, Arrow::a12, Arrow::a21};
    for (std::size_t j1 = 0; j1 < k; ++j1)
        for (std::size_t j2 = j1 + 1; j2 < k; ++j2)
            for (Arrow a : all)
                for (Arrow b : all)
                    for (std::size_t v = 0; v < m.nvertices(); ++v) {
                        if (digit_of(v, k, j1) != arrow_source(a)) continue;
                        if (digit_of(v, k, j2) != arrow_source(b)) continue;
                        std::size_t u1 = m.arrow_target_vertex(j2, b, v);
                        std::size_t u2 = m.arrow_target_vertex(j1, a, v);
                        std::size_t w = m.arrow_target_vertex(j1, a, u1);
                        MapPair path1 = pair_compose(m.action(j1, a, u1), arrow_degree(a),
                                                     m.action(j2, b, v), arrow_degree(b));
                        MapPair path2 = pair_compose(m.action(j2, b, u2), arrow_degree(b),
                                                     m.action(j1, a, v), arrow_degree(a));
                        check_zero(pair_sub(path1, path2), v, w,
                                   (arrow_degree(a) + arrow_degree(b)) % 2,
                                   "commute p=" + m.primes()[j1].str() + ":" + arrow_name(a) +
                                       " with p=" + m.primes()[j2].str() + ":" + arrow_name(b),
                                   where(j1, v));
                    }
    return rep;
}

// --- suspension ----------------------------------------------------------------

KGModulePtr suspend(const KGModulePtr& m) {
    std::vector<GradedGroup> comps;
    comps.reserve(m->nvertices());
    for (std::size_t v = 0; v < m->nvertices(); ++v) comps.push_back(m->comp(v).suspended());
    KGModule::ActionMap actions;
    for (std::size_t j = 0; j < m->nfactors(); ++j)
        for (int ai = 0; ai < 6; ++ai) {
            Arrow a = static_cast<Arrow>(ai);
            for (std::size_t v = 0; v < m->nvertices(); ++v) {
                if (digit_of(v, m->nfactors(), j) != arrow_source(a)) continue;
                const MapPair& mp = m->action(j, a, v);
                actions[{j, a, v}] = MapPair{mp.minus, mp.plus};
            }
        }
    return KGModule::create(m->ring(), m->modulus(), std::move(comps), actions);
}

// --- direct sums -----------------------------------------------------------------

namespace {

struct SumLayout {
    AbGroup total;
    QMat to_canon, from_canon;        // between concat coordinates and canonical ones
    std::vector<std::size_t> offset;  // summand offsets in concat coordinates
    std::size_t concat_dim = 0;
};

SumLayout layout_of(const Int& m, const std::vector<const AbGroup*>& parts) {
    SumLayout out;
    std::vector<Int> orders;
    for (const auto* p : parts) {
        out.offset.push_back(orders.size());
        for (std::size_t i = 0; i < p->ngens(); ++i) orders.push_back(p->gen_order(i));
    }
    out.concat_dim = orders.size();
    CanonGroup cg = canonicalize_diagonal(m, orders);
    out.total = cg.group;
    out.to_canon = cg.to_canon;
    out.from_canon = cg.from_canon;
    return out;
}

QMat inject_block(const SumLayout& l, std::size_t part, std::size_t ngens) {
    QMat e(l.concat_dim, ngens);
    for (std::size_t i = 0; i < ngens; ++i) e(l.offset[part] + i, i) = 1;
    return l.to_canon * e;
}

QMat project_block(const SumLayout& l, std::size_t part, std::size_t ngens) {
    QMat e(ngens, l.concat_dim);
    for (std::size_t i = 0; i < ngens; ++i) e(i, l.offset[part] + i) = 1;
    return e * l.from_canon;
}

}  // namespace

KGModulePtr zero_module(const KgRingPtr& ring, const Int& m) {
    std::vector<GradedGroup> comps(npow3(ring->nfactors()),
                                   GradedGroup{AbGroup{m, 0, {}}, AbGroup{m, 0, {}}});
    return KGModule::create(ring, m, std::move(comps), {});
}

MultiSumResult direct_sum_many(const KgRingPtr& ring, const Int& m,
                               const std::vector<KGModulePtr>& parts) {
    for (const auto& p : parts)
        if (p->primes() != ring->primes() || p->modulus() != m)
            throw kg_error("direct_sum: prime list or modulus mismatch");
    MultiSumResult res;
    if (parts.empty()) {
        res.sum = zero_module(ring, m);
        return res;
    }
    const std::size_t k = ring->nfactors(), nv = npow3(k), s = parts.size();
    std::vector<SumLayout> le(nv), lo(nv);
    std::vector<GradedGroup> comps(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        std::vector<const AbGroup*> pe, po;
        for (const auto& p : parts) {
            pe.push_back(&p->comp(v).even);
            po.push_back(&p->comp(v).odd);
        }
        le[v] = layout_of(m, pe);
        lo[v] = layout_of(m, po);
        comps[v] = GradedGroup{le[v].total, lo[v].total};
    }
    KGModule::ActionMap actions;
    for (std::size_t j = 0; j < k; ++j)
        for (int ai = 0; ai < 6; ++ai) {
            Arrow ar = static_cast<Arrow>(ai);
            for (std::size_t v = 0; v < nv; ++v) {
                if (digit_of(v, k, j) != arrow_source(ar)) continue;
                std::size_t w = replace_digit(v, k, j, arrow_target(ar));
                const SumLayout& sp = le[v];
                const SumLayout& sm = lo[v];
                const SumLayout& tp = arrow_degree(ar) == 0 ? le[w] : lo[w];
                const SumLayout& tm = arrow_degree(ar) == 0 ? lo[w] : le[w];
                QMat plus(tp.total.ngens(), sp.total.ngens());
                QMat minus(tm.total.ngens(), sm.total.ngens());
                for (std::size_t i = 0; i < s; ++i) {
                    const MapPair& mp = parts[i]->action(j, ar, v);
                    plus = plus + inject_block(tp, i, mp.plus.rows()) * mp.plus *
                                      project_block(sp, i, mp.plus.cols());
                    minus = minus + inject_block(tm, i, mp.minus.rows()) * mp.minus *
                                        project_block(sm, i, mp.minus.cols());
                }
                actions[{j, ar, v}] = MapPair{std::move(plus), std::move(minus)};
            }
        }
    res.sum = KGModule::create(ring, m, std::move(comps), actions);
    for (std::size_t i = 0; i < s; ++i) {
        ModuleMap in{parts[i], res.sum, 0, {}};
        ModuleMap out{res.sum, parts[i], 0, {}};
        for (std::size_t v = 0; v < nv; ++v) {
            in.blocks[{v, v}] = MapPair{inject_block(le[v], i, parts[i]->comp(v).even.ngens()),
                                        inject_block(lo[v], i, parts[i]->comp(v).odd.ngens())};
            out.blocks[{v, v}] = MapPair{project_block(le[v], i, parts[i]->comp(v).even.ngens()),
                                         project_block(lo[v], i, parts[i]->comp(v).odd.ngens())};
        }
        res.into.push_back(std::move(in));
        res.onto.push_back(std::move(out));
    }
    return res;
}

DirectSumResult direct_sum(const KGModulePtr& a, const KGModulePtr& b) {
    auto multi = direct_sum_many(a->ring(), a->modulus(), {a, b});
    return DirectSumResult{multi.sum, multi.into[0], multi.into[1], multi.onto[0], multi.onto[1]};
}

// --- restriction ------------------------------------------------------------------

KGModulePtr restrict_to_prime(const KGModulePtr& m, std::size_t j) {
    if (j >= m->nfactors()) throw kg_error("restrict_to_prime: index out of range");
    const std::size_t k = m->nfactors();
    auto ring1 = KgRing::make({m->primes()[j]});

    // Component i gathers the vertices with j-th digit i, in vertex order.
    std::vector<std::vector<std::size_t>> parts(3);
    for (std::size_t v = 0; v < m->nvertices(); ++v) parts[digit_of(v, k, j)].push_back(v);

    std::vector<SumLayout> le(3), lo(3);
    std::vector<GradedGroup> comps(3);
    for (int i = 0; i < 3; ++i) {
        std::vector<const AbGroup*> pe, po;
        for (auto v : parts[i]) {
            pe.push_back(&m->comp(v).even);
            po.push_back(&m->comp(v).odd);
        }
        le[i] = layout_of(m->modulus(), pe);
        lo[i] = layout_of(m->modulus(), po);
        comps[i] = GradedGroup{le[i].total, lo[i].total};
    }

    KGModule::ActionMap actions;
    for (int ai = 0; ai < 6; ++ai) {
        Arrow a = static_cast<Arrow>(ai);
        int s = arrow_source(a), t = arrow_target(a);
        const SumLayout& sp = le[s];
        const SumLayout& sm = lo[s];
        const SumLayout& tp = arrow_degree(a) == 0 ? le[t] : lo[t];
        const SumLayout& tm = arrow_degree(a) == 0 ? lo[t] : le[t];
        QMat plus(tp.total.ngens(), sp.total.ngens());
        QMat minus(tm.total.ngens(), sm.total.ngens());
        for (std::size_t pi = 0; pi < parts[s].size(); ++pi) {
            std::size_t v = parts[s][pi];
            std::size_t w = m->arrow_target_vertex(j, a, v);
            std::size_t wi = std::find(parts[t].begin(), parts[t].end(), w) - parts[t].begin();
            const MapPair& mp = m->action(j, a, v);
            plus = plus + inject_block(tp, wi, mp.plus.rows()) * mp.plus *
                              project_block(sp, pi, mp.plus.cols());
            minus = minus + inject_block(tm, wi, mp.minus.rows()) * mp.minus *
                                project_block(sm, pi, mp.minus.cols());
        }
        actions[{0, a, static_cast<std::size_t>(s)}] = MapPair{std::move(plus), std::move(minus)};
    }
    return KGModule::create(ring1, m->modulus(), std::move(comps), actions);
}

// --- free modules -----------------------------------------------------------------

FreeBasis free_basis(const KgRingPtr& ring, const Vertex& v, int parity) {
    if (v.size() != ring->nfactors()) throw kg_error("free_basis: vertex arity mismatch");
    const std::size_t k = ring->nfactors();
    FreeBasis fb;
    fb.source = v;
    fb.parity = parity;
    std::size_t nv = npow3(k);
    fb.even.resize(nv);
    fb.odd.resize(nv);
    std::vector<std::map<std::pair<int, int>, std::vector<Word>>> bases;
    for (std::size_t j = 0; j < k; ++j) bases.push_back(ring->system(j).basis());
    for (std::size_t w = 0; w < nv; ++w) {
        Vertex wv = vertex_of_index(w, k);
        std::vector<std::vector<Word>> pools;
        bool empty = false;
        for (std::size_t j = 0; j < k; ++j) {
            auto it = bases[j].find({wv[j], v[j]});
            if (it == bases[j].end() || it->second.empty()) {
                empty = true;
                break;
            }
            pools.push_back(it->second);
        }
        if (empty) continue;
        std::vector<TensorWord> monos{TensorWord{}};
        for (std::size_t j = 0; j < k; ++j) {
            std::vector<TensorWord> next;
            for (const auto& prefix : monos)
                for (const auto& word : pools[j]) {
                    TensorWord nw = prefix;
                    nw.factor.push_back(word);
                    next.push_back(std::move(nw));
                }
            monos = std::move(next);
        }
        std::sort(monos.begin(), monos.end());
        for (auto& mono : monos)
            ((mono.degree() ^ parity) == 0 ? fb.even[w] : fb.odd[w]).push_back(std::move(mono));
    }
    return fb;
}

KGModulePtr free_module(const KgRingPtr& ring, const Int& m, const Vertex& v, int parity) {
    FreeBasis fb = free_basis(ring, v, parity);
    const std::size_t k = ring->nfactors();
    std::size_t nv = npow3(k);
    std::vector<GradedGroup> comps(nv);
    std::vector<std::map<TensorWord, std::size_t>> idx_even(nv), idx_odd(nv);
    for (std::size_t w = 0; w < nv; ++w) {
        comps[w] = GradedGroup{AbGroup{m, fb.even[w].size(), {}}, AbGroup{m, fb.odd[w].size(), {}}};
        for (std::size_t i = 0; i < fb.even[w].size(); ++i) idx_even[w][fb.even[w][i]] = i;
        for (std::size_t i = 0; i < fb.odd[w].size(); ++i) idx_odd[w][fb.odd[w][i]] = i;
    }
    KGModule::ActionMap actions;
    for (std::size_t j = 0; j < k; ++j)
        for (int ai = 0; ai < 6; ++ai) {
            Arrow a = static_cast<Arrow>(ai);
            for (std::size_t w = 0; w < nv; ++w) {
                if (digit_of(w, k, j) != arrow_source(a)) continue;
                std::size_t w2 = replace_digit(w, k, j, arrow_target(a));
                MapPair mp = zero_pair(comps[w], comps[w2], arrow_degree(a));
                auto fill = [&](const std::vector<TensorWord>& monos, QMat& mat, bool tgt_even) {
                    for (std::size_t col = 0; col < monos.size(); ++col) {
                        Word prod;
                        if (!Word::concat(arrow_word(a), monos[col].factor[j], prod)) continue;
                        LinComb red = ring->system(j).reduce_word(prod);
                        for (const auto& [word, coeff] : red) {
                            TensorWord tgt = monos[col];
                            tgt.factor[j] = word;
                            std::size_t row = tgt_even ? idx_even[w2].at(tgt) : idx_odd[w2].at(tgt);
                            mat(row, col) += Rat(coeff);
                        }
                    }
                };
                // Columns over even then odd monomials; target parity flips
                // for the odd arrows.
                bool tgt_even_for_plus = (arrow_degree(a) == 0);
                fill(fb.even[w], mp.plus, tgt_even_for_plus);
                fill(fb.odd[w], mp.minus, !tgt_even_for_plus);
                actions[{j, a, w}] = std::move(mp);
            }
        }
    return KGModule::create(ring, m, std::move(comps), actions);
}

}  // namespace kgring
