#include "kgring/exactness.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace kgring {

bool ExactnessReport::exact() const {
    return std::all_of(nodes.begin(), nodes.end(), [](const NodeCheck& n) { return n.ok; });
}

namespace {

struct NodeSpec {
    int node;
    Arrow in, out;
};

// Incoming and outgoing arrow at each node of one orientation.
const NodeSpec kClockwise[3] = {{0, Arrow::a02, Arrow::a10},
                                {1, Arrow::a10, Arrow::a21},
                                {2, Arrow::a21, Arrow::a02}};
const NodeSpec kCounter[3] = {{0, Arrow::a01, Arrow::a20},
                              {1, Arrow::a12, Arrow::a01},
                              {2, Arrow::a20, Arrow::a12}};

const AbGroup& lane(const GradedGroup& g, int eps) { return eps == 0 ? g.even : g.odd; }

// The matrix of an arrow action landing in the given parity lane of the
// target, together with the source lane it comes from.
const QMat& into_lane(const MapPair& mp, Arrow a, int eps, int& src_eps) {
    src_eps = eps ^ arrow_degree(a);
    if (arrow_degree(a) == 0) return eps == 0 ? mp.plus : mp.minus;
    return eps == 0 ? mp.minus : mp.plus;
}

std::string render_witness(const std::vector<Rat>& v) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << fraction_to_string(v[i]);
    }
    os << ')';
    return os.str();
}

}  // namespace

ExactnessReport is_exact(const KGModulePtr& m) {
    auto vr = validate(*m);
    if (!vr.ok())
        throw kg_error("is_exact: module fails validation (" + vr.issues.front().relation + " at " +
                       vr.issues.front().where + ")");
    ExactnessReport rep;
    for (std::size_t j = 0; j < m->nfactors(); ++j) {
        KGModulePtr r = m->nfactors() == 1 ? m : restrict_to_prime(m, j);
        for (bool cw : {true, false}) {
            const NodeSpec* specs = cw ? kClockwise : kCounter;
            for (int t = 0; t < 3; ++t) {
                const NodeSpec& ns = specs[t];
                std::size_t node = static_cast<std::size_t>(ns.node);
                std::size_t src = static_cast<std::size_t>(arrow_source(ns.in));
                const MapPair& fin = r->action(0, ns.in, src);
                const MapPair& fout = r->action(0, ns.out, node);
                NodeCheck nc{m->primes()[j], cw, ns.node, true, ""};
                for (int eps = 0; eps < 2 && nc.ok; ++eps) {
                    int in_src_eps = 0;
                    const QMat& fmat = into_lane(fin, ns.in, eps, in_src_eps);
                    const QMat& gmat =
                        eps == 0 ? fout.plus : fout.minus;  // lane eps is g's source lane
                    int out_tgt_eps = eps ^ arrow_degree(ns.out);
                    const AbGroup& mid = lane(r->comp(node), eps);
                    const AbGroup& cod =
                        lane(r->comp(static_cast<std::size_t>(arrow_target(ns.out))), out_tgt_eps);
                    QMat ker = kernel_subgroup(gmat, mid, cod);
                    auto witness = containment_witness(mid, fmat, ker);
                    if (witness) {
                        nc.ok = false;
                        nc.witness = render_witness(*witness) +
                                     (eps == 0 ? " (even part)" : " (odd part)");
                    } else if (!subgroup_contains(mid, ker, fmat)) {
                        // im not inside ker: relation violation caught here too
                        nc.ok = false;
                        nc.witness = "image not contained in kernel";
                    }
                }
                rep.nodes.push_back(std::move(nc));
            }
        }
    }
    return rep;
}

namespace {

// Enumerates the elements of a finite group as integer coordinate tuples.
bool next_tuple(std::vector<Int>& x, const AbGroup& g) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (++x[i] < g.factors[i]) return true;
        x[i] = 0;
    }
    return false;
}

std::vector<Int> apply_finite(const QMat& f, const std::vector<Int>& x, const AbGroup& tgt) {
    std::vector<Int> y(tgt.ngens(), 0);
    for (std::size_t i = 0; i < f.rows(); ++i) {
        Rat acc;
        for (std::size_t jj = 0; jj < f.cols(); ++jj) acc += f(i, jj) * Rat(x[jj]);
        // Coordinates of finite groups normalize to integers mod the order.
        Int d = tgt.factors[i];
        auto inv = inverse_mod(denominator(acc), d);
        if (!inv) throw kg_error("brute force: non-invertible denominator");
        y[i] = mod_floor(numerator(acc) * *inv, d);
    }
    return y;
}

}  // namespace

bool brute_force_exactness(const KGModulePtr& m, const Int& order_bound) {
    for (std::size_t v = 0; v < m->nvertices(); ++v) {
        const GradedGroup& g = m->comp(v);
        if (!g.even.is_finite() || !g.odd.is_finite())
            throw kg_error("brute_force_exactness needs finite components");
        if (g.even.order() > order_bound || g.odd.order() > order_bound)
            throw kg_error("brute_force_exactness: order bound exceeded");
    }
    for (std::size_t j = 0; j < m->nfactors(); ++j) {
        KGModulePtr r = m->nfactors() == 1 ? m : restrict_to_prime(m, j);
        for (bool cw : {true, false}) {
            const NodeSpec* specs = cw ? kClockwise : kCounter;
            for (int t = 0; t < 3; ++t) {
                const NodeSpec& ns = specs[t];
                std::size_t node = static_cast<std::size_t>(ns.node);
                std::size_t src = static_cast<std::size_t>(arrow_source(ns.in));
                const MapPair& fin = r->action(0, ns.in, src);
                const MapPair& fout = r->action(0, ns.out, node);
                for (int eps = 0; eps < 2; ++eps) {
                    int in_src_eps = 0;
                    const QMat& fmat = into_lane(fin, ns.in, eps, in_src_eps);
                    const QMat& gmat = eps == 0 ? fout.plus : fout.minus;
                    int out_tgt_eps = eps ^ arrow_degree(ns.out);
                    const AbGroup& dom = lane(r->comp(src), in_src_eps);
                    const AbGroup& mid = lane(r->comp(node), eps);
                    const AbGroup& cod =
                        lane(r->comp(static_cast<std::size_t>(arrow_target(ns.out))), out_tgt_eps);
                    std::set<std::vector<Int>> image, kernel_set;
                    std::vector<Int> x(dom.ngens(), 0);
                    if (dom.ngens() == 0)
                        image.insert(std::vector<Int>(mid.ngens(), 0));
                    else
                        do {
                            image.insert(apply_finite(fmat, x, mid));
                        } while (next_tuple(x, dom));
                    std::vector<Int> y(mid.ngens(), 0);
                    auto is_zero_vec = [](const std::vector<Int>& v) {
                        return std::all_of(v.begin(), v.end(),
                                           [](const Int& c) { return c == 0; });
                    };
                    if (mid.ngens() == 0) {
                        kernel_set.insert(y);
                    } else
                        do {
                            if (is_zero_vec(apply_finite(gmat, y, cod))) kernel_set.insert(y);
                        } while (next_tuple(y, mid));
                    if (image != kernel_set) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace kgring
