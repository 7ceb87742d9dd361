#pragma once

#include "berkmc/berkovich.hpp"

namespace berkmc {

// Rational map f = P/Q of degree max(deg P, deg Q), P and Q coprime over K.
class BerkMap {
public:
    BerkMap(KPoly num, KPoly den);

    const KPoly& num() const { return num_; }
    const KPoly& den() const { return den_; }
    int degree() const { return degree_; }
    const FieldPtr& field() const { return F_; }

    // value at an affine type I point; nullopt = infinity
    std::optional<KElem> eval_t1(const KElem& c) const;
    std::optional<KElem> eval_inf() const;  // f(infinity)
    bool fixes_inf() const;

    // numerator of f(z) - z (fixed point polynomial)
    KPoly fixed_point_numerator() const;
    // derivative f' as a (num, den) pair, not reduced
    std::pair<KPoly, KPoly> derivative_pair() const;

    std::size_t bits() const { return kp_bits(num_) + kp_bits(den_); }

private:
    FieldPtr F_;
    KPoly num_, den_;
    int degree_;
};

// Reduced map at a point, in source/target local coordinates: a coprime pair
// over F of degree m_f(x).
struct TangentMap {
    FPoly num, den;
    Pt source, target;
    int local_degree = 1;
};

struct PointImage {
    Pt image;
    TangentMap tf;
};

PointImage image_with_tangent(const BerkMap& f, const Pt& x);
Pt image_of_point(const BerkMap& f, const Pt& x);
int local_degree(const BerkMap& f, const Pt& x);

// action of the tangent map on direction witnesses
Witness tangent_apply(const NumberField& F, const TangentMap& T, const Witness& w);
// multiplicity of the direction w in the fiber over its own image
int directional_degree(const NumberField& F, const TangentMap& T, const Witness& w);
// full fiber over a target witness: (direction, multiplicity) pairs; the
// infinity direction appears explicitly when it maps to the target
std::vector<std::pair<Witness, int>> tangent_fiber(const NumberField& F, const TangentMap& T,
                                                   const Witness& target);

struct DiskImage {
    Disk image;          // f-bar(D) = D(Tf(v))
    int degree_on_disk;  // m_f(D)
    int surplus;         // s_f(D), per conjugate copy
};

DiskImage image_disk(const BerkMap& f, const Disk& D);
// same, reusing an already computed image of the boundary point
DiskImage image_disk_from(const BerkMap& f, const PointImage& pi, const Disk& D);

// number of roots of R inside the open disk D (summed over conjugate copies
// for class witnesses); roots at the lifted center count as inside
int count_roots_in_open_disk(const KPoly& R, const Disk& D);

// preimages of a type I value (nullopt = infinity) inside D, with multiplicity,
// the preimage at infinity included
int count_preimages_t1_in_disk(const BerkMap& f, const Disk& D, const std::optional<KElem>& y);

// The representative forms a Prop-2.1 style count accepts for y.
struct Rep {
    enum class Kind { pt, t1fin, t1inf, family } kind = Kind::pt;
    Pt pt;      // pt: a type II point; family: the base vertex
    KElem c;    // t1fin
    FPoly cls;  // family: conjugacy class of directions at the base (deg >= 2)
    Rat push;   // family: push depth into the class copies

    static Rep point(Pt p) { return {Kind::pt, std::move(p), {}, {}, Rat(0)}; }
    static Rep t1(KElem v) { return {Kind::t1fin, {}, std::move(v), {}, Rat(0)}; }
    static Rep t1inf() { return {Kind::t1inf, {}, {}, {}, Rat(0)}; }
    static Rep family(Pt base, FPoly h, Rat d) {
        return {Kind::family, std::move(base), {}, std::move(h), std::move(d)};
    }
    int size() const { return kind == Kind::family ? static_cast<int>(cls.size()) - 1 : 1; }
};

// containment pairs (y-copy, disk-copy) between a representative family and a
// disk family; plain objects behave as singleton families
int pairs_in_disk(const NumberField& F, const Rep& y, const Disk& D);

// #(f^{-1}(y) ∩ V) with multiplicity, via local degrees and surpluses of the
// boundary disks; for a class-state V the count sums over conjugate copies
int count_preimages_in_simple_domain(const BerkMap& f, const SimpleDomain& V, const Rep& y);

} // namespace berkmc
