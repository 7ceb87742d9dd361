#pragma once

#include "berkmc/series.hpp"

#include <map>
#include <variant>

namespace berkmc {

// Type II point zeta_{a, q}: the sup norm over the closed disk with center a
// and radius |t|^q.  All library points carry affine-chart centers; points of
// infinity-chart disks normalize to an affine center on construction.
enum class Chart { affine, infinity };

struct Pt {
    Chart chart = Chart::affine;
    KElem center;
    Rat radius_exp; // q

    // Canonicalizes: the stored center is the series truncation of c below q,
    // so equal points carry identical data and direction residues are
    // computed in one shared local coordinate.
    static Pt make(KElem c, Rat q);
    static Pt gauss(const FieldPtr& F) { return make(KElem::zero(F), Rat(0)); }
};

bool pt_eq(const Pt& x, const Pt& y);
// disk containment: the closed disk of x lies inside the closed disk of y
bool pt_leq(const Pt& x, const Pt& y);
Pt pt_meet(const Pt& x, const Pt& y);
bool pt_strictly_between(const Pt& z, const Pt& x, const Pt& y);
std::string pt_string(const Pt& x);

// Tangent direction witness at a type II point, in the local coordinate
// w = (z - a)/t^q: a residue point of P^1 over F, a Galois conjugacy class of
// such (monic irreducible over F, degree >= 2), or the direction toward infinity.
struct Witness {
    enum class Kind { fin, cls, inf } kind = Kind::inf;
    FElem res; // fin
    FPoly h;   // cls

    static Witness finite(FElem r) { return {Kind::fin, std::move(r), {}}; }
    static Witness cls_of(FPoly hh) { return {Kind::cls, {}, std::move(hh)}; }
    static Witness infinity() { return {Kind::inf, {}, {}}; }
    int size() const { return kind == Kind::cls ? static_cast<int>(h.size()) - 1 : 1; }
    bool operator==(const Witness& o) const { return kind == o.kind && res == o.res && h == o.h; }
};

std::string witness_string(const NumberField& F, const Witness& w);

// Open disk D(v) with its unique boundary point; doubles as the direction.
struct Disk {
    Pt boundary;
    Witness dir;
};

using TangentDirection = Disk;

// Finite intersection of open disks with pairwise distinct boundary points.
using SimpleDomain = std::vector<Disk>;

// target of a direction query
struct TypeIFin {
    KElem value;
};
struct TypeIInf {};
using Target = std::variant<Pt, TypeIFin, TypeIInf>;

Witness direction_at(const Pt& x, const Target& target);

bool disk_contains_pt(const Disk& D, const Pt& x);
bool disk_contains_t1(const Disk& D, const KElem& c);
bool disk_contains_inf(const Disk& D);
bool domain_contains_pt(const SimpleDomain& V, const Pt& x);
// A contained in B, as plain disks (class witnesses: copy-wise)
bool disk_inside_disk(const Disk& A, const Disk& B);
bool disk_eq(const Disk& A, const Disk& B);

// boundary point pushed into the disk by depth delta (fin/inf witnesses only)
Pt push_into(const Disk& D, const Rat& delta);

// ---- vertex sets and Gamma-domains ----

struct InnerDomain {
    std::vector<std::pair<int, Witness>> boundary; // (vertex index, inward direction)
    Pt representative;                              // a skeleton point of the domain
};

// Where a point lives relative to Gamma.
struct DomainRef {
    enum class Kind { vertex, disk, inner } kind = Kind::vertex;
    int vertex = -1;  // vertex / disk base
    Witness dir;      // disk
    int inner = -1;   // index into inner domain table
    bool operator==(const DomainRef& o) const {
        return kind == o.kind && vertex == o.vertex && dir == o.dir && inner == o.inner;
    }
};

class VertexSet {
public:
    VertexSet(FieldPtr F, std::vector<Pt> vertices);

    const FieldPtr& field() const { return F_; }
    const std::vector<Pt>& vertices() const { return verts_; }
    int size() const { return static_cast<int>(verts_.size()); }
    const std::vector<InnerDomain>& inner_domains() const { return inner_; }

    // index of an equal vertex, or -1
    int find_vertex(const Pt& x) const;

    // the unique element of S(Gamma) containing x
    DomainRef locate(const Pt& x) const;
    DomainRef locate_t1(const KElem& c) const;
    DomainRef locate_inf() const;

    // the Gamma-domain adjacent to vertex v in direction w
    DomainRef component_from(int v, const Witness& w) const;

    // boundary disks of a Gamma-domain, oriented into the domain
    SimpleDomain boundary_disks(const DomainRef& d) const;

    // smallest gap to the structure below/above, used to pick probe depths
    Rat probe_depth() const { return probe_depth_; }

    std::string key_of(const DomainRef& d) const;

    // hull structure for DOT output: (child point, parent point) edges
    const std::vector<std::pair<Pt, Pt>>& hull_edges() const { return edges_pts_; }

private:
    std::vector<int> boundary_vertices_of_(const Pt& x) const;
    DomainRef locate_inf_side_(const KElem& c) const;
    FieldPtr F_;
    std::vector<Pt> verts_;
    std::vector<Pt> nodes_;              // vertices + meets
    std::vector<int> parent_;            // node tree, -1 at the root
    std::vector<bool> node_is_vertex_;
    std::vector<int> node_vertex_idx_;
    std::vector<InnerDomain> inner_;
    std::map<std::string, int> inner_by_pair_; // "(vertex,witness)" -> inner idx
    std::vector<std::pair<Pt, Pt>> edges_pts_;
    Rat probe_depth_;
};

} // namespace berkmc
