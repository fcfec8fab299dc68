#include "kgring/homext.hpp"

#include "kgring/exactness.hpp"

#include <algorithm>

namespace kgring {

namespace {

// Sparse accumulation of one constraint system; aux unknowns absorb the
// congruences modulo target relations.
struct SystemBuilder {
    std::size_t dim;
    std::size_t naux = 0;
    std::vector<std::map<std::size_t, Rat>> rows;

    explicit SystemBuilder(std::size_t d) : dim(d) {}

    void add_congruence(std::map<std::size_t, Rat> coeffs, const Int& mod) {
        bool nonzero = std::any_of(coeffs.begin(), coeffs.end(),
                                   [](const auto& kv) { return kv.second != 0; });
        if (!nonzero) return;
        if (mod != 0) coeffs[dim + naux++] = Rat(-mod);
        rows.push_back(std::move(coeffs));
    }

    QMat materialize() const {
        QMat a(rows.size(), dim + naux);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (const auto& [c, x] : rows[i]) a(i, c) = x;
        return a;
    }
};

const AbGroup& lane_of(const GradedGroup& g, int eps) { return eps == 0 ? g.even : g.odd; }

}  // namespace

HomSpace HomSpace::compute(const KGModulePtr& m, const KGModulePtr& n, int parity) {
    if (m->primes() != n->primes() || m->modulus() != n->modulus())
        throw kg_error("hom: prime list or modulus mismatch");
    HomSpace hs;
    hs.m_ = m;
    hs.n_ = n;
    hs.parity_ = parity;
    hs.neff_ = parity == 0 ? n : suspend(n);
    const KGModulePtr& ne = hs.neff_;
    const std::size_t nv = m->nvertices();

    hs.plus_loc_.resize(nv);
    hs.minus_loc_.resize(nv);
    std::size_t off = 0;
    for (std::size_t v = 0; v < nv; ++v) {
        hs.plus_loc_[v] = {off, ne->comp(v).even.ngens(), m->comp(v).even.ngens()};
        off += hs.plus_loc_[v].rows * hs.plus_loc_[v].cols;
        hs.minus_loc_[v] = {off, ne->comp(v).odd.ngens(), m->comp(v).odd.ngens()};
        off += hs.minus_loc_[v].rows * hs.minus_loc_[v].cols;
    }
    hs.dim_ = off;

    auto pos = [&](const LaneLoc& loc, std::size_t r, std::size_t c) {
        return loc.offset + r * loc.cols + c;
    };

    SystemBuilder sys(hs.dim_);

    // Well-definedness of every diagonal block.
    for (std::size_t v = 0; v < nv; ++v)
        for (int eps = 0; eps < 2; ++eps) {
            const AbGroup& src = lane_of(m->comp(v), eps);
            const AbGroup& tgt = lane_of(ne->comp(v), eps);
            const LaneLoc& loc = eps == 0 ? hs.plus_loc_[v] : hs.minus_loc_[v];
            for (std::size_t i = 0; i < src.ngens(); ++i) {
                Int d = src.gen_order(i);
                if (d == 0) continue;
                for (std::size_t r = 0; r < tgt.ngens(); ++r)
                    sys.add_congruence({{pos(loc, r, i), Rat(d)}}, tgt.gen_order(r));
            }
        }

    // Commutation with every generator action.
    for (std::size_t j = 0; j < m->nfactors(); ++j)
        for (int ai = 0; ai < 6; ++ai) {
            Arrow a = static_cast<Arrow>(ai);
            int delta = arrow_degree(a);
            for (std::size_t v = 0; v < nv; ++v) {
                Vertex vd = vertex_of_index(v, m->nfactors());
                if (vd[j] != arrow_source(a)) continue;
                std::size_t w = m->arrow_target_vertex(j, a, v);
                const MapPair& am = m->action(j, a, v);
                const MapPair& an = ne->action(j, a, v);
                for (int eps = 0; eps < 2; ++eps) {
                    const QMat& amat = eps == 0 ? am.plus : am.minus;
                    const QMat& nmat = eps == 0 ? an.plus : an.minus;
                    const LaneLoc& hv = eps == 0 ? hs.plus_loc_[v] : hs.minus_loc_[v];
                    int wlane = eps ^ delta;
                    const LaneLoc& hw = wlane == 0 ? hs.plus_loc_[w] : hs.minus_loc_[w];
                    const AbGroup& tgt = lane_of(ne->comp(w), wlane);
                    // rows: target generators; cols: source generators of M_v.
                    for (std::size_t r = 0; r < hw.rows; ++r)
                        for (std::size_t c = 0; c < hv.cols; ++c) {
                            std::map<std::size_t, Rat> coeffs;
                            for (std::size_t s = 0; s < hw.cols; ++s)
                                if (amat(s, c) != 0) coeffs[pos(hw, r, s)] += amat(s, c);
                            for (std::size_t t = 0; t < hv.rows; ++t)
                                if (nmat(r, t) != 0) coeffs[pos(hv, t, c)] -= nmat(r, t);
                            sys.add_congruence(std::move(coeffs), tgt.gen_order(r));
                        }
                }
            }
        }

    QMat a = sys.materialize();
    QMat full = kernel(a, m->modulus());
    hs.gens_ = full.row_range(0, hs.dim_);

    // Trivial maps: relation columns of the target.
    std::vector<std::vector<Rat>> trivial_cols;
    for (std::size_t v = 0; v < nv; ++v)
        for (int eps = 0; eps < 2; ++eps) {
            const AbGroup& src = lane_of(m->comp(v), eps);
            const AbGroup& tgt = lane_of(ne->comp(v), eps);
            const LaneLoc& loc = eps == 0 ? hs.plus_loc_[v] : hs.minus_loc_[v];
            for (std::size_t r = 0; r < tgt.ngens(); ++r) {
                Int e = tgt.gen_order(r);
                if (e == 0) continue;
                for (std::size_t i = 0; i < src.ngens(); ++i) {
                    std::vector<Rat> col(hs.dim_);
                    col[pos(loc, r, i)] = Rat(e);
                    trivial_cols.push_back(std::move(col));
                }
            }
        }
    QMat t(hs.dim_, trivial_cols.size());
    for (std::size_t c = 0; c < trivial_cols.size(); ++c) t.set_col(c, trivial_cols[c]);

    AbGroup ambient{m->modulus(), hs.dim_, {}};
    hs.canon_ = quotient_group(ambient, hs.gens_, t);
    return hs;
}

ModuleMap HomSpace::unflatten(const std::vector<Rat>& v) const {
    ModuleMap f{m_, n_, parity_, {}};
    for (std::size_t vx = 0; vx < m_->nvertices(); ++vx) {
        MapPair mp = zero_pair(m_->comp(vx), n_->comp(vx), parity_);
        const LaneLoc& lp = plus_loc_[vx];
        for (std::size_t r = 0; r < lp.rows; ++r)
            for (std::size_t c = 0; c < lp.cols; ++c) mp.plus(r, c) = v[lp.offset + r * lp.cols + c];
        const LaneLoc& lm = minus_loc_[vx];
        for (std::size_t r = 0; r < lm.rows; ++r)
            for (std::size_t c = 0; c < lm.cols; ++c)
                mp.minus(r, c) = v[lm.offset + r * lm.cols + c];
        f.blocks[{vx, vx}] = std::move(mp);
    }
    return f;
}

std::vector<Rat> HomSpace::flatten(const ModuleMap& f) const {
    if (f.parity != parity_) throw kg_error("hom flatten: parity mismatch");
    if (!f.is_vertex_diagonal()) throw kg_error("hom flatten: map is not vertex-diagonal");
    std::vector<Rat> v(dim_);
    for (std::size_t vx = 0; vx < m_->nvertices(); ++vx) {
        MapPair mp = f.block_or_zero(vx, vx);
        const LaneLoc& lp = plus_loc_[vx];
        for (std::size_t r = 0; r < lp.rows; ++r)
            for (std::size_t c = 0; c < lp.cols; ++c) v[lp.offset + r * lp.cols + c] = mp.plus(r, c);
        const LaneLoc& lm = minus_loc_[vx];
        for (std::size_t r = 0; r < lm.rows; ++r)
            for (std::size_t c = 0; c < lm.cols; ++c)
                v[lm.offset + r * lm.cols + c] = mp.minus(r, c);
    }
    return v;
}

ModuleMap HomSpace::generator(std::size_t c) const {
    if (c >= ngens()) throw kg_error("hom generator index out of range");
    std::vector<Rat> v = mat_vec(gens_, canon_.from_canon.col(c));
    return unflatten(v);
}

std::vector<Rat> HomSpace::class_of(const ModuleMap& f) const {
    std::vector<Rat> vec = flatten(f);
    AbGroup ambient{m_->modulus(), dim_, {}};
    auto x = express_in_span(ambient, gens_, QMat::column(vec));
    if (!x) throw kg_error("class_of: map does not satisfy the commutation system");
    std::vector<Rat> coords = mat_vec(canon_.to_canon, x->col(0));
    return normalize_element(canon_.group, coords);
}

GradedGroup hom(const KGModulePtr& m, const KGModulePtr& n) {
    return GradedGroup{HomSpace::compute(m, n, 0).group(), HomSpace::compute(m, n, 1).group()};
}

// --- free covers and ext1 -----------------------------------------------------

namespace {

// Action of one tensor monomial on a module as a MapPair from its source
// component.
std::pair<MapPair, std::size_t> monomial_action(const KGModule& m, const TensorWord& x) {
    std::size_t vid = vertex_index(x.source());
    MapPair acc = identity_pair(m.comp(vid));
    int parity = 0;
    for (std::size_t j = 0; j < m.nfactors(); ++j) {
        MapPair wa = word_action(m, j, x.factor[j], vid);
        acc = pair_compose(wa, x.factor[j].degree(), acc, parity);
        parity ^= x.factor[j].degree();
        Vertex v = vertex_of_index(vid, m.nfactors());
        v[j] = x.factor[j].target();
        vid = vertex_index(v);
    }
    return {acc, vid};
}

}  // namespace

FreeCover free_cover(const KGModulePtr& m) {
    struct GenInfo {
        std::size_t vertex;
        int parity;
        std::size_t index;
    };
    std::vector<GenInfo> gens;
    std::vector<KGModulePtr> summands;
    for (std::size_t v = 0; v < m->nvertices(); ++v)
        for (int eps = 0; eps < 2; ++eps) {
            const AbGroup& g = lane_of(m->comp(v), eps);
            for (std::size_t i = 0; i < g.ngens(); ++i) {
                gens.push_back({v, eps, i});
                summands.push_back(free_module(m->ring(), m->modulus(),
                                               vertex_of_index(v, m->nfactors()), eps));
            }
        }
    auto multi = direct_sum_many(m->ring(), m->modulus(), summands);

    FreeCover out;
    out.f = multi.sum;
    out.pi = zero_module_map(out.f, m, 0);
    for (std::size_t s = 0; s < summands.size(); ++s) {
        const GenInfo& gi = gens[s];
        FreeBasis fb = free_basis(m->ring(), vertex_of_index(gi.vertex, m->nfactors()), gi.parity);
        ModuleMap part{summands[s], m, 0, {}};
        for (std::size_t w = 0; w < m->nvertices(); ++w) {
            MapPair blk = zero_pair(summands[s]->comp(w), m->comp(w), 0);
            auto fill = [&](const std::vector<TensorWord>& monos, QMat& mat) {
                for (std::size_t q = 0; q < monos.size(); ++q) {
                    auto [act, tv] = monomial_action(*m, monos[q]);
                    if (tv != w) throw kg_error("free cover: basis target mismatch");
                    const QMat& lanemat = gi.parity == 0 ? act.plus : act.minus;
                    for (std::size_t r = 0; r < mat.rows(); ++r) mat(r, q) = lanemat(r, gi.index);
                }
            };
            fill(fb.even[w], blk.plus);
            fill(fb.odd[w], blk.minus);
            part.blocks[{w, w}] = std::move(blk);
        }
        out.pi = map_add(out.pi, map_compose(part, multi.onto[s]));
    }

    // Kernel components and the induced action.
    const std::size_t nv = m->nvertices();
    std::vector<MapPair> bases(nv);
    std::vector<GradedGroup> kcomps(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        MapPair pb = out.pi.block_or_zero(v, v);
        QMat ke = kernel_subgroup(pb.plus, out.f->comp(v).even, m->comp(v).even);
        QMat ko = kernel_subgroup(pb.minus, out.f->comp(v).odd, m->comp(v).odd);
        kcomps[v] = GradedGroup{AbGroup{m->modulus(), ke.cols(), {}},
                                AbGroup{m->modulus(), ko.cols(), {}}};
        bases[v] = MapPair{std::move(ke), std::move(ko)};
    }
    KGModule::ActionMap kactions;
    for (std::size_t j = 0; j < m->nfactors(); ++j)
        for (int ai = 0; ai < 6; ++ai) {
            Arrow a = static_cast<Arrow>(ai);
            for (std::size_t v = 0; v < nv; ++v) {
                if (vertex_of_index(v, m->nfactors())[j] != arrow_source(a)) continue;
                std::size_t w = out.f->arrow_target_vertex(j, a, v);
                const MapPair& fa = out.f->action(j, a, v);
                const QMat& tgt_plus = arrow_degree(a) == 0 ? bases[w].plus : bases[w].minus;
                const QMat& tgt_minus = arrow_degree(a) == 0 ? bases[w].minus : bases[w].plus;
                auto xp = solve_matrix(tgt_plus, fa.plus * bases[v].plus, m->modulus());
                auto xm = solve_matrix(tgt_minus, fa.minus * bases[v].minus, m->modulus());
                if (!xp || !xm) throw kg_error("free cover: kernel is not action-invariant");
                kactions[{j, a, v}] = MapPair{std::move(*xp), std::move(*xm)};
            }
        }
    out.k = KGModule::create(m->ring(), m->modulus(), std::move(kcomps), kactions);
    out.inclusion = zero_module_map(out.k, out.f, 0);
    for (std::size_t v = 0; v < nv; ++v) out.inclusion.blocks[{v, v}] = bases[v];
    return out;
}

GradedGroup ext1(const KGModulePtr& m, const KGModulePtr& n) {
    FreeCover cover = free_cover(m);
    auto vr = validate(*cover.k);
    if (!vr.ok()) throw kg_error("ext1: cover kernel fails validation");
    if (!is_exact(cover.k).exact())
        throw kg_error("ext1: kernel of the free cover is not exact or Z[1/m]-free; "
                       "the input module cannot be exact");

    GradedGroup out;
    for (int parity = 0; parity < 2; ++parity) {
        HomSpace hf = HomSpace::compute(cover.f, n, parity);
        HomSpace hk = HomSpace::compute(cover.k, n, parity);
        QMat image(hk.ngens(), hf.ngens());
        for (std::size_t c = 0; c < hf.ngens(); ++c) {
            ModuleMap restricted = map_compose(hf.generator(c), cover.inclusion);
            auto coords = hk.class_of(restricted);
            for (std::size_t r = 0; r < hk.ngens(); ++r) image(r, c) = coords[r];
        }
        Pres p{m->modulus(), hk.ngens(), QMat::hstack(hk.relation_matrix(), image)};
        (parity == 0 ? out.even : out.odd) = canonicalize(p).group;
    }
    return out;
}

}  // namespace kgring
