#pragma once

#include "berkmc/dynamics.hpp"

#include <map>
#include <set>

namespace berkmc {

// classification of a Gamma-domain as in the F/J dichotomy
struct Classification {
    enum class Kind { J, F, inconclusive } kind = Kind::inconclusive;
    int first_hit = 0; // J: minimal n >= 1 with f^n(U) meeting Gamma
    enum class FCert {
        none,
        periodic_disks,      // the image-disk chain repeats exactly
        nested_disks,        // strict containment d_{k+p} inside d_k
        absorbed,            // chain entered a verified f-invariant disk avoiding Gamma
        wandering_translate, // periodic boundary, affine direction orbit avoiding the bad set
        routed               // forward image confined to a certified F-domain
    } fcert = FCert::none;
    int cert_period = 0;
    std::string diagnostics;
};

Classification classify_domain(const BerkMap& f, const VertexSet& G, const DomainRef& U,
                               int orbit_bound);

struct VertexVerdict {
    enum class Kind { in_gamma, lands_in_F, lands_in_J, inconclusive } kind;
    int vertex;
    DomainRef landing;     // valid unless in_gamma
    Classification detail; // valid unless in_gamma
};

struct StabilityReport {
    enum class Verdict { stable, unstable, inconclusive } verdict;
    std::vector<VertexVerdict> verdicts;
    bool is_stable() const { return verdict == Verdict::stable; }
};

StabilityReport check_stability(const BerkMap& f, const VertexSet& G, int orbit_bound);

// vertex index of a totally invariant vertex (f(v) = v with full local degree)
std::optional<int> totally_invariant_vertex(const BerkMap& f, const VertexSet& G);

// ---- state space ----

struct State {
    DomainRef ref;
    std::string key;
    int level = 0;
    int conjugacy_size = 1;
    bool row_complete = false;
};

class StateSpace {
public:
    StateSpace(BerkMap f, VertexSet G, int depth);

    const BerkMap& map() const { return f_; }
    const VertexSet& gamma() const { return G_; }
    int depth() const { return depth_; }
    int size() const { return static_cast<int>(states_.size()); }
    const std::vector<State>& states() const { return states_; }
    const State& state(int i) const { return states_[i]; }
    int index_of(const std::string& key) const;
    int index_of_ref(const DomainRef& ref) const;

    // m_{U,V} as total counts over conjugate copies of V, per single copy of U;
    // defined for complete rows only
    const std::map<int, long>& row(int u) const;
    Rep representative(int u) const;

    bool has_j_domain() const;

private:
    void expand_(int u);
    int intern_(const DomainRef& ref, int level);
    BerkMap f_;
    VertexSet G_;
    int depth_;
    std::vector<State> states_;
    std::map<std::string, int> index_;
    std::vector<std::map<int, long>> rows_;
    // caches
    std::map<std::string, PointImage> point_images_;
    std::map<std::string, DiskImage> disk_images_;
    std::vector<std::pair<int, Witness>> surplus_dirs_;
    const PointImage& point_image_(const Pt& x);
    const DiskImage& disk_image_(const Disk& D);
};

// enumerate the state space (vertices plus J-domains) by breadth-first row
// expansion; rows are complete for states discovered at level < depth
StateSpace enumerate_states(const BerkMap& f, const VertexSet& G, int depth);

// ---- boundary classification (the I(d) locus) ----

struct BoundaryClass {
    FPoly H_affine;       // affine part of the homogeneous gcd H
    int H_inf_mult = 0;   // multiplicity of the root at infinity (power of Y)
    FPoly phi_num, phi_den;
    bool phi_constant = false;
    Witness phi_value;    // when constant: fin value or infinity
    bool in_indeterminacy = false;
};

BoundaryClass classify_boundary(const BerkMap& f);

} // namespace berkmc
