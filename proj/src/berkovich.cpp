#include "berkmc/berkovich.hpp"

#include "berkmc/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace berkmc {

Pt Pt::make(KElem c, Rat q) {
    q.canonicalize();
    KElem canon = c.truncate_below(q);
    return Pt{Chart::affine, std::move(canon), std::move(q)};
}

bool pt_eq(const Pt& x, const Pt& y) {
    if (x.radius_exp != y.radius_exp) return false;
    Val v = (x.center - y.center).val();
    return !(v < Val::of(x.radius_exp));
}

bool pt_leq(const Pt& x, const Pt& y) {
    if (x.radius_exp < y.radius_exp) return false;
    Val v = (x.center - y.center).val();
    return !(v < Val::of(y.radius_exp));
}

Pt pt_meet(const Pt& x, const Pt& y) {
    Val d = (x.center - y.center).val();
    Rat q = std::min(x.radius_exp, y.radius_exp);
    if (d < Val::of(q)) q = d.q;
    return Pt::make(x.center, q);
}

bool pt_strictly_between(const Pt& z, const Pt& x, const Pt& y) {
    if (pt_eq(z, x) || pt_eq(z, y)) return false;
    Pt m = pt_meet(x, y);
    bool on_xm = pt_leq(x, z) && pt_leq(z, m);
    bool on_ym = pt_leq(y, z) && pt_leq(z, m);
    return on_xm || on_ym;
}

std::string pt_string(const Pt& x) {
    return "V(" + x.center.to_string() + ";" + rat_string(x.radius_exp) + ")";
}

std::string witness_string(const NumberField& F, const Witness& w) {
    switch (w.kind) {
        case Witness::Kind::fin: return F.to_string(w.res);
        case Witness::Kind::cls: return "cls[" + F.p_to_string(w.h, "w") + "]";
        case Witness::Kind::inf: return "inf";
    }
    return "?";
}

Witness direction_at(const Pt& x, const Target& target) {
    if (std::holds_alternative<TypeIInf>(target)) return Witness::infinity();
    if (const auto* fin = std::get_if<TypeIFin>(&target)) {
        KElem d = fin->value - x.center;
        Val v = d.val();
        if (v < Val::of(x.radius_exp)) return Witness::infinity();
        return Witness::finite(d.residue_at(x.radius_exp));
    }
    const Pt& y = std::get<Pt>(target);
    if (pt_eq(x, y)) throw internal_error("direction_at: target equals the base point");
    if (!pt_leq(y, x)) return Witness::infinity();
    KElem d = y.center - x.center;
    return Witness::finite(d.residue_at(x.radius_exp));
}

bool disk_contains_pt(const Disk& D, const Pt& x) {
    switch (D.dir.kind) {
        case Witness::Kind::inf:
            return !pt_leq(x, D.boundary);
        case Witness::Kind::fin: {
            if (!(x.radius_exp > D.boundary.radius_exp)) return false;
            const FieldPtr& F = x.center.field();
            KElem lift = D.boundary.center +
                         KElem::from_f(F, D.dir.res) * KElem::t_power(F, D.boundary.radius_exp);
            Val v = (x.center - lift).val();
            Val qb = Val::of(D.boundary.radius_exp);
            return !(v < qb) && !(v == qb);
        }
        case Witness::Kind::cls:
            return false; // F-rational points never lie in a proper conjugacy-class direction
    }
    return false;
}

bool disk_contains_t1(const Disk& D, const KElem& c) {
    switch (D.dir.kind) {
        case Witness::Kind::inf: {
            Val v = (c - D.boundary.center).val();
            return v < Val::of(D.boundary.radius_exp);
        }
        case Witness::Kind::fin: {
            const FieldPtr& F = c.field();
            KElem lift = D.boundary.center +
                         KElem::from_f(F, D.dir.res) * KElem::t_power(F, D.boundary.radius_exp);
            Val v = (c - lift).val();
            return Val::of(D.boundary.radius_exp) < v;
        }
        case Witness::Kind::cls:
            return false;
    }
    return false;
}

bool disk_contains_inf(const Disk& D) { return D.dir.kind == Witness::Kind::inf; }

bool domain_contains_pt(const SimpleDomain& V, const Pt& x) {
    for (const auto& D : V)
        if (!disk_contains_pt(D, x)) return false;
    return !V.empty();
}

bool disk_eq(const Disk& A, const Disk& B) { return pt_eq(A.boundary, B.boundary) && A.dir == B.dir; }

bool disk_inside_disk(const Disk& A, const Disk& B) {
    if (pt_eq(A.boundary, B.boundary)) return A.dir == B.dir;
    if (A.dir.kind == Witness::Kind::cls || B.dir.kind == Witness::Kind::cls) {
        // distinct boundaries: a copy of A inside a copy of B would put the
        // F-rational boundary of A inside a class direction; never happens
        return false;
    }
    return disk_contains_pt(B, A.boundary) && !disk_contains_pt(A, B.boundary);
}

Pt push_into(const Disk& D, const Rat& delta) {
    const FieldPtr& F = D.boundary.center.field();
    switch (D.dir.kind) {
        case Witness::Kind::inf:
            return Pt::make(D.boundary.center, D.boundary.radius_exp - delta);
        case Witness::Kind::fin: {
            KElem lift = D.boundary.center +
                         KElem::from_f(F, D.dir.res) * KElem::t_power(F, D.boundary.radius_exp);
            return Pt::make(lift, D.boundary.radius_exp + delta);
        }
        case Witness::Kind::cls:
            throw internal_error("push_into: class directions have no F-rational representative");
    }
    throw internal_error("push_into: bad witness");
}

// ---- VertexSet ----

VertexSet::VertexSet(FieldPtr F, std::vector<Pt> vertices)
    : F_(std::move(F)), verts_(std::move(vertices)) {
    if (verts_.empty()) throw parse_error("vertex set must be nonempty");
    for (std::size_t i = 0; i < verts_.size(); ++i)
        for (std::size_t j = i + 1; j < verts_.size(); ++j)
            if (pt_eq(verts_[i], verts_[j])) throw parse_error("duplicate vertices");

    auto push_node = [&](const Pt& p, int vidx) {
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            if (pt_eq(nodes_[k], p)) {
                if (vidx >= 0) {
                    node_is_vertex_[k] = true;
                    node_vertex_idx_[k] = vidx;
                }
                return;
            }
        }
        nodes_.push_back(p);
        node_is_vertex_.push_back(vidx >= 0);
        node_vertex_idx_.push_back(vidx);
    };
    for (std::size_t i = 0; i < verts_.size(); ++i) push_node(verts_[i], static_cast<int>(i));
    for (std::size_t i = 0; i < verts_.size(); ++i)
        for (std::size_t j = i + 1; j < verts_.size(); ++j)
            push_node(pt_meet(verts_[i], verts_[j]), -1);

    int n = static_cast<int>(nodes_.size());
    parent_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        int best = -1;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (pt_leq(nodes_[i], nodes_[j]) && !pt_eq(nodes_[i], nodes_[j])) {
                if (best < 0 || pt_leq(nodes_[j], nodes_[best])) best = j;
            }
        }
        parent_[i] = best;
    }
    for (int i = 0; i < n; ++i)
        if (parent_[i] >= 0) edges_pts_.emplace_back(nodes_[i], nodes_[parent_[i]]);

    // probe depth: half the smallest positive radius gap along hull edges
    probe_depth_ = Rat(1, 2);
    for (int i = 0; i < n; ++i) {
        if (parent_[i] < 0) continue;
        Rat gap = nodes_[i].radius_exp - nodes_[parent_[i]].radius_exp;
        if (gap > 0 && gap / 2 < probe_depth_) probe_depth_ = gap / 2;
    }
    probe_depth_.canonicalize();

    // connected pieces of (hull minus vertices); edges keyed by child node,
    // glued through shared non-vertex endpoints
    std::vector<int> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int a) { return uf[a] == a ? a : uf[a] = find(uf[a]); };
    auto unite = [&](int a, int b) { uf[find(a)] = find(b); };
    for (int i = 0; i < n; ++i) {
        if (parent_[i] < 0) continue;
        int p = parent_[i];
        if (!node_is_vertex_[p]) {
            if (parent_[p] >= 0) unite(i, p);
            for (int j = 0; j < n; ++j)
                if (j != i && parent_[j] == p) unite(i, j);
        }
        if (!node_is_vertex_[i]) {
            for (int j = 0; j < n; ++j)
                if (parent_[j] == i) unite(i, j);
        }
    }
    std::map<int, std::vector<int>> comps;
    for (int i = 0; i < n; ++i)
        if (parent_[i] >= 0) comps[find(i)].push_back(i);

    for (auto& [root, edge_children] : comps) {
        (void)root;
        InnerDomain dom;
        std::set<std::string> seen_pairs;
        bool has_rep = false;
        for (int c : edge_children) {
            int p = parent_[c];
            if (!has_rep) {
                Rat mid = (nodes_[c].radius_exp + nodes_[p].radius_exp) / 2;
                mid.canonicalize();
                dom.representative = Pt::make(nodes_[c].center, mid);
                has_rep = true;
            }
            if (node_is_vertex_[c]) {
                Witness w = Witness::infinity();
                std::string key = std::to_string(node_vertex_idx_[c]) + "|" + witness_string(*F_, w);
                if (seen_pairs.insert(key).second) dom.boundary.emplace_back(node_vertex_idx_[c], w);
            }
            if (node_is_vertex_[p]) {
                Witness w = direction_at(nodes_[p], Target{nodes_[c]});
                std::string key = std::to_string(node_vertex_idx_[p]) + "|" + witness_string(*F_, w);
                if (seen_pairs.insert(key).second) dom.boundary.emplace_back(node_vertex_idx_[p], w);
            }
        }
        if (dom.boundary.size() < 2) continue;
        std::sort(dom.boundary.begin(), dom.boundary.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return witness_string(*F_, a.second) < witness_string(*F_, b.second);
        });
        int idx = static_cast<int>(inner_.size());
        inner_.push_back(dom);
        for (auto& [v, w] : inner_.back().boundary)
            inner_by_pair_[std::to_string(v) + "|" + witness_string(*F_, w)] = idx;
    }
}

int VertexSet::find_vertex(const Pt& x) const {
    for (int i = 0; i < size(); ++i)
        if (pt_eq(verts_[i], x)) return i;
    return -1;
}

std::vector<int> VertexSet::boundary_vertices_of_(const Pt& x) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i) {
        bool blocked = false;
        for (int j = 0; j < size() && !blocked; ++j) {
            if (j == i) continue;
            if (pt_strictly_between(verts_[j], verts_[i], x)) blocked = true;
        }
        if (!blocked) out.push_back(i);
    }
    return out;
}

DomainRef VertexSet::locate(const Pt& x) const {
    int v = find_vertex(x);
    if (v >= 0) return {DomainRef::Kind::vertex, v, Witness::infinity(), -1};
    std::vector<int> b = boundary_vertices_of_(x);
    if (b.empty()) throw internal_error("locate: no boundary vertex");
    Witness w = direction_at(verts_[b[0]], Target{x});
    if (b.size() == 1) return component_from(b[0], w);
    auto it = inner_by_pair_.find(std::to_string(b[0]) + "|" + witness_string(*F_, w));
    if (it == inner_by_pair_.end()) throw internal_error("locate: missing inner domain");
    return {DomainRef::Kind::inner, -1, Witness::infinity(), it->second};
}

DomainRef VertexSet::locate_t1(const KElem& c) const {
    Rat deep = verts_[0].radius_exp;
    for (const auto& vert : verts_) deep = std::max(deep, vert.radius_exp);
    deep += 1;
    for (int i = 0; i < size(); ++i) {
        Val v = (c - verts_[i].center).val();
        if (!(v < Val::of(verts_[i].radius_exp))) return locate(Pt::make(c, deep));
    }
    // the point lies outside every vertex disk
    return locate_inf_side_(c);
}

DomainRef VertexSet::locate_inf_side_(const KElem& c) const {
    Rat q = verts_[0].radius_exp;
    for (const auto& vert : verts_) {
        q = std::min(q, vert.radius_exp);
        Val dv = (c - vert.center).val();
        if (!dv.inf) q = std::min(q, dv.q);
    }
    q -= 1;
    return locate(Pt::make(c, q));
}

DomainRef VertexSet::locate_inf() const {
    Rat q = verts_[0].radius_exp;
    for (const auto& vert : verts_) {
        q = std::min(q, vert.radius_exp);
        Val cv = vert.center.val();
        if (!cv.inf) q = std::min(q, cv.q);
    }
    q -= 1;
    return locate(Pt::make(KElem::zero(F_), q));
}

DomainRef VertexSet::component_from(int v, const Witness& w) const {
    auto it = inner_by_pair_.find(std::to_string(v) + "|" + witness_string(*F_, w));
    if (it != inner_by_pair_.end()) return {DomainRef::Kind::inner, -1, Witness::infinity(), it->second};
    return {DomainRef::Kind::disk, v, w, -1};
}

SimpleDomain VertexSet::boundary_disks(const DomainRef& d) const {
    SimpleDomain out;
    switch (d.kind) {
        case DomainRef::Kind::vertex:
            throw internal_error("boundary_disks of a vertex");
        case DomainRef::Kind::disk:
            out.push_back({verts_[d.vertex], d.dir});
            return out;
        case DomainRef::Kind::inner:
            for (auto& [v, w] : inner_[d.inner].boundary) out.push_back({verts_[v], w});
            return out;
    }
    return out;
}

std::string VertexSet::key_of(const DomainRef& d) const {
    switch (d.kind) {
        case DomainRef::Kind::vertex:
            return pt_string(verts_[d.vertex]);
        case DomainRef::Kind::disk: {
            const Pt& b = verts_[d.vertex];
            return "D(" + b.center.to_string() + ";" + rat_string(b.radius_exp) + ";" +
                   witness_string(*F_, d.dir) + ")";
        }
        case DomainRef::Kind::inner: {
            std::string s = "I{";
            bool first = true;
            for (auto& [v, w] : inner_[d.inner].boundary) {
                if (!first) s += ";";
                s += pt_string(verts_[v]) + ":" + witness_string(*F_, w);
                first = false;
            }
            return s + "}";
        }
    }
    return "?";
}

} // namespace berkmc
