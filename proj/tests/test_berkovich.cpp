#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "berkmc/berkovich.hpp"

#include <memory>
#include <random>

using namespace berkmc;

namespace {

FieldPtr Q() { return std::make_shared<NumberField>(); }
KElem t(const FieldPtr& F) { return KElem::t_power(F, Rat(1)); }
KElem kc(const FieldPtr& F, long n, long d = 1) { return KElem::from_rat(F, Rat(n, d)); }

} // namespace

TEST_CASE("point equality with center perturbations") {
    auto F = Q();
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> val(0, 3), coeff(1, 5);
    Pt x = Pt::make(kc(F, 2) + t(F), Rat(1));
    for (int i = 0; i < 50; ++i) {
        int v = val(rng);
        KElem h = kc(F, coeff(rng)) * t(F).pow(v);
        Pt y = Pt::make(x.center + h, Rat(1));
        CHECK(pt_eq(x, y) == (v >= 1));
    }
    CHECK(!pt_eq(x, Pt::make(x.center, Rat(2))));
}

TEST_CASE("meet and order") {
    auto F = Q();
    Pt g = Pt::gauss(F);
    Pt deep = Pt::make(kc(F, 0), Rat(2));
    CHECK(pt_leq(deep, g));
    CHECK(!pt_leq(g, deep));
    Pt other = Pt::make(kc(F, 1), Rat(2));
    Pt m = pt_meet(deep, other);
    CHECK(pt_eq(m, g)); // centers differ by a unit
    CHECK(pt_strictly_between(Pt::make(kc(F, 0), Rat(1)), deep, g));
    CHECK(pt_strictly_between(Pt::make(kc(F, 0), Rat(1)), deep, other));
    CHECK(!pt_strictly_between(Pt::make(kc(F, 3), Rat(1)), deep, other));
}

TEST_CASE("disk membership: annuli of the 1/z^2 example") {
    auto F = Q();
    Pt g = Pt::gauss(F);
    Pt low = Pt::make(kc(F, 0), Rat(1));   // zeta_{0,|t|}
    Pt high = Pt::make(kc(F, 0), Rat(-1)); // zeta_{0,|t|^-1}
    // A+ = annulus between g and low: inward disks
    SimpleDomain a_plus = {{g, Witness::finite(F->zero())}, {low, Witness::infinity()}};
    CHECK(domain_contains_pt(a_plus, Pt::make(kc(F, 0), Rat(1, 2))));
    CHECK(!domain_contains_pt(a_plus, Pt::make(kc(F, 0), Rat(-1, 2))));
    CHECK(!domain_contains_pt(a_plus, g));
    CHECK(!domain_contains_pt(a_plus, low));
    // disk toward 0 at the Gauss point contains zeta_{0,1}
    Disk d0 = {g, Witness::finite(F->zero())};
    CHECK(disk_contains_pt(d0, low));
    CHECK(!disk_contains_pt(d0, Pt::make(kc(F, 1) / t(F), Rat(0))));
    CHECK(!disk_contains_pt(d0, high));
    Disk dinf = {g, Witness::infinity()};
    CHECK(disk_contains_pt(dinf, high));
    CHECK(disk_contains_inf(dinf));
    CHECK(disk_contains_t1(d0, t(F)));
    CHECK(!disk_contains_t1(d0, kc(F, 1)));
}

TEST_CASE("direction_at") {
    auto F = Q();
    Pt g = Pt::gauss(F);
    CHECK(direction_at(g, Target{TypeIInf{}}) == Witness::infinity());
    CHECK(direction_at(g, Target{Pt::make(kc(F, 1), Rat(1))}) == Witness::finite(F->one()));
    CHECK(direction_at(g, Target{Pt::make(kc(F, 1) / t(F), Rat(0))}) == Witness::infinity());
    // directions agree for any two targets inside one component
    Pt a = Pt::make(kc(F, 5) + t(F), Rat(3));
    Pt b = Pt::make(kc(F, 5) - t(F).pow(2), Rat(7));
    CHECK(direction_at(g, Target{a}) == direction_at(g, Target{b}));
    CHECK(direction_at(g, Target{TypeIFin{kc(F, 5)}}) == direction_at(g, Target{a}));
}

TEST_CASE("vertex set with one vertex: all domains are disks") {
    auto F = Q();
    VertexSet G(F, {Pt::gauss(F)});
    CHECK(G.inner_domains().empty());
    DomainRef d = G.locate(Pt::make(kc(F, 1) / t(F), Rat(0)));
    CHECK(d.kind == DomainRef::Kind::disk);
    CHECK(d.dir == Witness::infinity());
    DomainRef v = G.locate(Pt::gauss(F));
    CHECK(v.kind == DomainRef::Kind::vertex);
    DomainRef dd = G.locate(Pt::make(kc(F, 0), Rat(1)));
    CHECK(dd.kind == DomainRef::Kind::disk);
    CHECK(dd.dir == Witness::finite(F->zero()));
}

TEST_CASE("vertex set of the 1/z^2 example: two annuli") {
    auto F = Q();
    Pt g = Pt::gauss(F);
    Pt low = Pt::make(kc(F, 0), Rat(1));
    Pt high = Pt::make(kc(F, 0), Rat(-1));
    VertexSet G(F, {g, low, high});
    CHECK(G.inner_domains().size() == 2);
    DomainRef aplus = G.locate(Pt::make(kc(F, 0), Rat(1, 2)));
    CHECK(aplus.kind == DomainRef::Kind::inner);
    DomainRef aminus = G.locate(Pt::make(kc(F, 0), Rat(-1, 2)));
    CHECK(aminus.kind == DomainRef::Kind::inner);
    CHECK(aplus.inner != aminus.inner);
    SimpleDomain bd = G.boundary_disks(aplus);
    CHECK(bd.size() == 2);
    // key strings are canonical and distinct
    CHECK(G.key_of(aplus) != G.key_of(aminus));
    // locate is consistent with membership on the boundary disks
    CHECK(domain_contains_pt(bd, Pt::make(kc(F, 0), Rat(1, 2))));
    CHECK(!domain_contains_pt(bd, Pt::make(kc(F, 0), Rat(-1, 2))));
}

TEST_CASE("locate partitions a probe set") {
    auto F = Q();
    Pt g = Pt::gauss(F);
    VertexSet G(F, {g, Pt::make(kc(F, 0), Rat(1)), Pt::make(kc(F, 2) + t(F), Rat(3))});
    std::vector<Pt> probes = {
        Pt::make(kc(F, 0), Rat(1, 2)),  Pt::make(kc(F, 0), Rat(5)),
        Pt::make(kc(F, 2), Rat(2)),     Pt::make(kc(F, 2) + t(F), Rat(9)),
        Pt::make(kc(F, 7) / t(F), Rat(-4)), Pt::make(kc(F, 3), Rat(1)),
        Pt::make(kc(F, 0), Rat(1)),     Pt::make(kc(F, 2), Rat(1, 3)),
    };
    for (const auto& p : probes) {
        DomainRef d = G.locate(p);
        if (d.kind == DomainRef::Kind::vertex) {
            CHECK(pt_eq(G.vertices()[d.vertex], p));
            continue;
        }
        SimpleDomain bd = G.boundary_disks(d);
        CHECK(domain_contains_pt(bd, p));
        // and p is in no other located component among the probes
        for (const auto& q : probes) {
            DomainRef dq = G.locate(q);
            if (dq.kind == DomainRef::Kind::vertex) continue;
            bool same = G.key_of(dq) == G.key_of(d);
            CHECK(domain_contains_pt(G.boundary_disks(dq), p) == same);
        }
    }
}

TEST_CASE("component_from distinguishes disks from inner domains") {
    auto F = Q();
    Pt g = Pt::gauss(F);
    Pt low = Pt::make(kc(F, 0), Rat(1));
    VertexSet G(F, {g, low});
    DomainRef inner = G.component_from(0, Witness::finite(F->zero()));
    CHECK(inner.kind == DomainRef::Kind::inner);
    DomainRef disk = G.component_from(0, Witness::finite(F->one()));
    CHECK(disk.kind == DomainRef::Kind::disk);
    DomainRef up = G.component_from(1, Witness::infinity());
    CHECK(up.kind == DomainRef::Kind::inner);
    CHECK(up.inner == inner.inner);
    DomainRef down = G.component_from(1, Witness::finite(F->zero()));
    CHECK(down.kind == DomainRef::Kind::disk);
}

TEST_CASE("disk nesting predicate") {
    auto F = Q();
    Disk big = {Pt::make(kc(F, 0), Rat(-1)), Witness::infinity()};
    Disk small = {Pt::make(kc(F, 0), Rat(-2)), Witness::infinity()};
    CHECK(disk_inside_disk(small, big));
    CHECK(!disk_inside_disk(big, small));
    Disk inner0 = {Pt::gauss(F), Witness::finite(F->zero())};
    CHECK(!disk_inside_disk(inner0, big));
    CHECK(disk_inside_disk(inner0, {Pt::make(kc(F, 0), Rat(-1)), Witness::finite(F->zero())}));
}

TEST_CASE("push_into lands inside") {
    auto F = Q();
    Disk d0 = {Pt::gauss(F), Witness::finite(F->from_rat(Rat(3)))};
    Pt p = push_into(d0, Rat(1, 2));
    CHECK(disk_contains_pt(d0, p));
    Disk dinf = {Pt::gauss(F), Witness::infinity()};
    Pt q = push_into(dinf, Rat(1, 2));
    CHECK(disk_contains_pt(dinf, q));
}

TEST_CASE("infinity and type I locate") {
    auto F = Q();
    Pt g = Pt::gauss(F);
    VertexSet G(F, {g, Pt::make(kc(F, 0), Rat(-1))});
    DomainRef dinf = G.locate_inf();
    CHECK(dinf.kind == DomainRef::Kind::disk);
    CHECK(dinf.dir == Witness::infinity());
    CHECK(dinf.vertex == 1);
    DomainRef dz = G.locate_t1(kc(F, 0));
    CHECK(dz.kind == DomainRef::Kind::disk);
    CHECK(dz.vertex == 0);
    CHECK(dz.dir == Witness::finite(F->zero()));
    DomainRef dmid = G.locate_t1(kc(F, 1) / t(F)); // |1/t| sits between the vertices
    CHECK(dmid.kind == DomainRef::Kind::disk);
    CHECK(dmid.vertex == 1);
}

TEST_CASE("directions toward algebraic type I targets over Q(i)") {
    auto Fi = std::make_shared<NumberField>(std::vector<Rat>{Rat(1), Rat(0), Rat(1)}, "i");
    // the fixed point with leading term i * t^{-1/2}, seen from zeta_{0,-1/2}
    KElem lead = KElem::from_f(Fi, Fi->gen()) * KElem::t_power(Fi, Rat(-1, 2));
    Pt base = Pt::make(KElem::zero(Fi), Rat(-1, 2));
    Witness w = direction_at(base, Target{TypeIFin{lead}});
    CHECK(w == Witness::finite(Fi->gen()));
    // a perturbation below the radius scale lands in the same direction
    Witness w2 = direction_at(base, Target{TypeIFin{lead + KElem::one(Fi)}});
    CHECK(w2 == w);
}
