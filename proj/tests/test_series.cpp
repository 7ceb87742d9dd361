#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "berkmc/errors.hpp"
#include "berkmc/series.hpp"

#include <map>
#include <memory>
#include <random>

using namespace berkmc;

namespace {

FieldPtr Q() { return std::make_shared<NumberField>(); }

KElem t(const FieldPtr& F) { return KElem::t_power(F, Rat(1)); }
KElem kc(const FieldPtr& F, long n, long d = 1) { return KElem::from_rat(F, Rat(n, d)); }

KElem random_kelem(const FieldPtr& F, std::mt19937& rng) {
    std::uniform_int_distribution<int> deg(0, 3), coeff(-4, 4);
    auto rand_poly = [&]() {
        KElem acc = KElem::zero(F);
        int d = deg(rng);
        for (int i = 0; i <= d; ++i) acc = acc + kc(F, coeff(rng)) * t(F).pow(i);
        return acc;
    };
    KElem num = rand_poly();
    while (num.is_zero()) num = rand_poly();
    KElem den = rand_poly();
    while (den.is_zero()) den = rand_poly();
    return num / den;
}

} // namespace

TEST_CASE("valuation examples") {
    auto F = Q();
    KElem x = t(F).pow(2) + kc(F, 3) * t(F).pow(3);
    CHECK(x.val() == Val::of(Rat(2)));
    CHECK((kc(F, 1) / t(F)).val() == Val::of(Rat(-1)));
    KElem y = (t(F) + t(F).pow(2)) / (kc(F, 1) - t(F));
    CHECK(y.val() == Val::of(Rat(1)));
    CHECK(KElem::zero(F).val() == Val::infinite());
}

TEST_CASE("valuation is multiplicative and ultrametric") {
    auto F = Q();
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 200; ++trial) {
        KElem x = random_kelem(F, rng);
        KElem y = random_kelem(F, rng);
        CHECK((x * y).val() == x.val() + y.val());
        Val vs = (x + y).val();
        Val lo = x.val() < y.val() ? x.val() : y.val();
        CHECK((lo <= vs));
        if (!(x.val() == y.val())) CHECK(vs == lo);
    }
}

TEST_CASE("newton polygon golden cases") {
    auto F = Q();
    // z^2 - z + 1/t: one segment of slope 1/2, two roots of valuation -1/2
    KPoly p = {kc(F, 1) / t(F), kc(F, -1), kc(F, 1)};
    NewtonPolygon np = newton_polygon(p);
    REQUIRE(np.segments.size() == 1);
    CHECK(np.segments[0].slope == Rat(1, 2));
    CHECK(np.segments[0].length == 2);
    // z^2 - t: two roots of valuation 1/2
    KPoly q = {-t(F), KElem::zero(F), kc(F, 1)};
    NewtonPolygon nq = newton_polygon(q);
    REQUIRE(nq.segments.size() == 1);
    CHECK(nq.segments[0].slope == Rat(-1, 2));
    CHECK(nq.segments[0].length == 2);
    // t z^2 + 1: two roots of valuation -1/2
    KPoly r = {kc(F, 1), KElem::zero(F), t(F)};
    NewtonPolygon nr = newton_polygon(r);
    REQUIRE(nr.segments.size() == 1);
    CHECK(nr.segments[0].slope == Rat(1, 2));
    CHECK(nr.segments[0].length == 2);
}

TEST_CASE("newton polygon of a product merges slope multisets") {
    auto F = Q();
    std::mt19937 rng(777);
    std::uniform_int_distribution<int> coeff(-3, 3), tv(-2, 2), dg(1, 3);
    auto random_poly = [&]() {
        int d = dg(rng);
        KPoly p(d + 1, KElem::zero(F));
        for (int i = 0; i <= d; ++i) {
            int c = coeff(rng);
            if (c == 0 && i == d) c = 1;
            if (c != 0) p[i] = kc(F, c) * KElem::t_power(F, Rat(tv(rng)));
        }
        return kp_trim(std::move(p));
    };
    for (int trial = 0; trial < 60; ++trial) {
        KPoly a = random_poly(), b = random_poly();
        if (kp_is_zero(a) || kp_is_zero(b)) continue;
        auto slope_multiset = [](const NewtonPolygon& n) {
            std::map<Rat, int> out;
            for (auto& s : n.segments) out[s.slope] += s.length;
            return out;
        };
        NewtonPolygon na = newton_polygon(a), nb = newton_polygon(b);
        NewtonPolygon nab = newton_polygon(kp_mul(a, b));
        std::map<Rat, int> merged = slope_multiset(na);
        for (auto& [s, l] : slope_multiset(nb)) merged[s] += l;
        CHECK(merged == slope_multiset(nab));
        CHECK(nab.ord0 == na.ord0 + nb.ord0);
    }
}

TEST_CASE("count_roots_in_valuation_range") {
    auto F = Q();
    KPoly p = {kc(F, 1) / t(F), kc(F, -1), kc(F, 1)};
    CHECK(count_roots_in_valuation_range(p, {Rat(-1), Rat(0), true, true}) == 2);
    KPoly q = {-t(F), KElem::zero(F), kc(F, 1)};
    CHECK(count_roots_in_valuation_range(q, {Rat(1, 2), Rat(1, 2), false, false}) == 2);
    KPoly r = {kc(F, -1), kc(F, 1)};
    CHECK(count_roots_in_valuation_range(r, {Rat(0), std::nullopt, true, false}) == 0);
}

TEST_CASE("range counts partition the roots") {
    auto F = Q();
    std::mt19937 rng(4242);
    std::uniform_int_distribution<int> coeff(-3, 3), tv(-2, 2);
    for (int trial = 0; trial < 40; ++trial) {
        KPoly p(5, KElem::zero(F));
        for (int i = 0; i < 5; ++i) {
            int c = coeff(rng);
            if (i == 4 && c == 0) c = 2;
            if (c != 0) p[i] = kc(F, c) * KElem::t_power(F, Rat(tv(rng)));
        }
        p = kp_trim(std::move(p));
        if (kp_deg(p) < 1) continue;
        int a = count_roots_in_valuation_range(p, {std::nullopt, Rat(-1), false, false});
        int b = count_roots_in_valuation_range(p, {Rat(-1), Rat(1), true, true});
        int c = count_roots_in_valuation_range(p, {Rat(1), std::nullopt, false, false});
        CHECK(a + b + c == kp_deg(p));
    }
}

TEST_CASE("puiseux: z^2 - t splits with ramification 2") {
    auto F = Q();
    KPoly p = {-t(F), KElem::zero(F), kc(F, 1)};
    auto res = puiseux_roots(p, Rat(2), ExtendPolicy::deny);
    REQUIRE(res.branches.size() == 2);
    CHECK(res.ram == 2);
    CHECK(!res.extended);
    KElem half = KElem::t_power(F, Rat(1, 2));
    bool plus = false, minus = false;
    for (auto& b : res.branches) {
        CHECK(b.exact);
        CHECK(b.multiplicity == 1);
        if (b.center == half) plus = true;
        if (b.center == -half) minus = true;
    }
    CHECK(plus);
    CHECK(minus);
}

TEST_CASE("puiseux: exact rational root") {
    auto F = Q();
    KPoly p = {-(kc(F, 1) + t(F)), kc(F, 1)};
    auto res = puiseux_roots(p, Rat(5), ExtendPolicy::deny);
    REQUIRE(res.branches.size() == 1);
    CHECK(res.branches[0].exact);
    CHECK(res.branches[0].center == kc(F, 1) + t(F));
}

TEST_CASE("puiseux: z^2 - z + 1/t needs Q(i)") {
    auto F = Q();
    KPoly p = {kc(F, 1) / t(F), kc(F, -1), kc(F, 1)};
    CHECK_THROWS_AS(puiseux_roots(p, Rat(1), ExtendPolicy::deny), extension_required);
    auto res = puiseux_roots(p, Rat(1), ExtendPolicy::auto_single);
    CHECK(res.extended);
    CHECK(res.field->degree() == 2);
    REQUIRE(res.branches.size() == 2);
    for (auto& b : res.branches) {
        CHECK(b.multiplicity == 1);
        CHECK(b.center.val() == Val::of(Rat(-1, 2)));
        FElem lead = b.center.leading_coeff();
        CHECK(res.field->eq(res.field->mul(lead, lead), res.field->from_rat(Rat(-1))));
    }
}

TEST_CASE("puiseux residual valuation exceeds the attained precision") {
    auto F = Q();
    KElem r1 = kc(F, 1) + t(F);
    KElem r2 = kc(F, 1) - t(F).pow(2);
    KPoly p = kp_mul(KPoly{-r1, kc(F, 1)}, KPoly{-r2, kc(F, 1)});
    auto res = puiseux_roots(p, Rat(3), ExtendPolicy::deny);
    REQUIRE(res.branches.size() == 2);
    for (auto& b : res.branches) {
        CHECK(b.resolved);
        Val v = kp_eval(p, b.center).val();
        CHECK((v.inf || v.q > b.attained));
    }
}
