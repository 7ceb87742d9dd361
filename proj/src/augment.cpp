#include "berkmc/augment.hpp"

#include "berkmc/errors.hpp"

#include <algorithm>

namespace berkmc {

namespace {

constexpr std::size_t kOrbitBitsGuard = 1u << 14;

bool pt_size_ok(const Pt& x) {
    return x.center.bits() <= kOrbitBitsGuard && rat_bits(x.radius_exp) <= 14;
}

} // namespace

OrbitResult orbit_with_preperiodicity(const BerkMap& f, const Pt& x, int bound) {
    OrbitResult out;
    out.points.push_back(x);
    for (int n = 0; n < bound; ++n) {
        if (!pt_size_ok(out.points.back())) {
            out.size_guarded = true;
            return out;
        }
        Pt next = image_of_point(f, out.points.back());
        for (std::size_t k = 0; k < out.points.size(); ++k) {
            if (pt_eq(out.points[k], next)) {
                out.preperiodic = true;
                out.tail = static_cast<int>(k);
                out.period = static_cast<int>(out.points.size()) - static_cast<int>(k);
                return out;
            }
        }
        out.points.push_back(next);
    }
    return out;
}

namespace {

// f as seen from infinity: 1/f(1/w)
BerkMap conjugate_at_infinity(const BerkMap& f) {
    int d = f.degree();
    const FieldPtr& F = f.field();
    auto reverse_pad = [&](const KPoly& p) {
        KPoly r(d + 1, KElem::zero(F));
        for (int i = 0; i <= kp_deg(p); ++i) r[d - i] = p[i];
        return kp_trim(std::move(r));
    };
    return BerkMap(reverse_pad(f.den()), reverse_pad(f.num()));
}

// valuation of g = A/B at an exact-or-truncated point, certified against the
// truncation error (the true argument differs by valuation >= prec)
std::optional<Val> certified_value_val(const KPoly& A, const KPoly& B, const KElem& x,
                                       const std::optional<Rat>& prec) {
    auto value_val = [&](const KPoly& p) -> std::optional<Val> {
        KElem v = kp_eval(p, x);
        if (!prec) return v.val();
        KPoly S = kp_compose_affine(p, x, KElem::one(x.field()));
        Val err = Val::infinite();
        for (int i = 1; i <= kp_deg(S); ++i) {
            if (S[i].is_zero()) continue;
            Val e = S[i].val() + Val::of(*prec * i);
            if (e < err) err = e;
        }
        Val vv = v.val();
        if (vv < err) return vv;
        return std::nullopt; // truncation could flip the valuation
    };
    auto va = value_val(A), vb = value_val(B);
    if (!va || !vb) return std::nullopt;
    if (vb->inf) return std::nullopt;
    if (va->inf) return Val::infinite();
    return Val::of(va->q - vb->q);
}

// poles of f in the closed disk centered at c with radius exponent q
int poles_in_closed_disk(const BerkMap& f, const KElem& c, const Rat& q) {
    if (kp_deg(f.den()) < 1) return 0;
    KPoly S = kp_compose_affine(f.den(), c, KElem::one(c.field()));
    return count_roots_in_valuation_range(S, {q, std::nullopt, false, false});
}

// largest grid-radius closed disk about the center that f maps strictly into
// itself; boundary reported as a point
std::optional<Rat> certify_invariant_radius(const BerkMap& f, const KElem& center, int ram_grid,
                                            const std::vector<Pt>* avoid) {
    const Rat step(1, ram_grid);
    Rat q = Rat(-4);
    for (int tries = 0; tries < 8 * ram_grid + 16; ++tries, q += step) {
        Rat qq = q;
        qq.canonicalize();
        Pt bdry = Pt::make(center, qq);
        if (avoid) {
            bool hit = false;
            for (const auto& g : *avoid)
                if (pt_leq(g, bdry)) hit = true; // vertex inside the closed disk
            if (hit) continue;
        }
        if (poles_in_closed_disk(f, center, qq) > 0) continue;
        Pt img = image_of_point(f, bdry);
        if (pt_leq(img, bdry) && !pt_eq(img, bdry)) return qq;
    }
    return std::nullopt;
}

} // namespace

std::vector<AttractingCycle> find_attracting_cycles(const BerkMap& f, int max_period,
                                                    const Rat& precision, ExtendPolicy policy,
                                                    int ram_grid) {
    (void)max_period; // fixed points only; longer cycles are certified on orbits
    std::vector<AttractingCycle> out;
    const FieldPtr& F = f.field();
    auto [dern, derd] = f.derivative_pair();
    KPoly fixp = f.fixed_point_numerator();
    if (kp_deg(fixp) >= 1) {
        PuiseuxResult roots;
        bool have_roots = true;
        try {
            roots = puiseux_roots(fixp, precision, policy);
        } catch (const extension_required&) {
            have_roots = false; // fixed points outside K are not l-split candidates
        } catch (const unresolved_factorization&) {
            have_roots = false;
        }
        // centers in a proper extension are not l-split; only K-rational ones qualify
        if (roots.extended) have_roots = false;
        for (const auto& br : have_roots ? roots.branches : std::vector<PuiseuxBranch>{}) {
            if (!br.resolved) continue;
            const KElem& c = br.center;
            std::optional<Rat> prec = br.exact ? std::nullopt : std::optional<Rat>(br.attained);
            auto mv = certified_value_val(dern, derd, c, prec);
            if (!mv || !(Val::of(Rat(0)) < *mv)) continue;
            auto q = certify_invariant_radius(f, c, ram_grid, nullptr);
            if (!q) continue;
            AttractingCycle cyc;
            cyc.period = 1;
            cyc.center = c;
            cyc.center_precision = br.exact ? precision : br.attained;
            cyc.certified = Disk{Pt::make(c, *q), Witness::finite(F->zero())};
            cyc.multiplier_val = *mv;
            out.push_back(std::move(cyc));
        }
    }
    if (f.fixes_inf()) {
        BerkMap finf = conjugate_at_infinity(f);
        auto [dn, dd] = finf.derivative_pair();
        auto mv = certified_value_val(dn, dd, KElem::zero(F), std::nullopt);
        if (mv && Val::of(Rat(0)) < *mv) {
            auto q = certify_invariant_radius(finf, KElem::zero(F), ram_grid, nullptr);
            if (q) {
                AttractingCycle cyc;
                cyc.period = 1;
                cyc.at_infinity = true;
                cyc.center = KElem::zero(F);
                cyc.center_precision = precision;
                // the w-chart disk |w| <= |t|^q is the z-chart complement side
                cyc.certified = Disk{Pt::make(KElem::zero(F), -*q), Witness::infinity()};
                cyc.multiplier_val = *mv;
                out.push_back(std::move(cyc));
            }
        }
    }
    return out;
}

namespace {

// re-derive the invariant radius so the disk avoids the current vertex set
std::optional<Disk> gamma_avoiding_cycle_disk(const BerkMap& f, const AttractingCycle& cyc,
                                              const std::vector<Pt>& verts, int ram_grid) {
    const FieldPtr& F = f.field();
    if (!cyc.at_infinity) {
        auto q = certify_invariant_radius(f, cyc.center, ram_grid, &verts);
        if (!q) return std::nullopt;
        return Disk{Pt::make(cyc.center, *q), Witness::finite(F->zero())};
    }
    BerkMap finf = conjugate_at_infinity(f);
    // vertices transform to the w-chart only for the avoidance test; a vertex
    // zeta_{a,r} meets the closed w-disk |w| <= |t|^q iff it fails pt_leq
    // against the z-chart boundary zeta_{0,-q}
    const Rat step(1, ram_grid);
    Rat q = Rat(-4);
    for (int tries = 0; tries < 8 * ram_grid + 16; ++tries, q += step) {
        Rat qq = q;
        qq.canonicalize();
        Pt zb = Pt::make(KElem::zero(F), -qq);
        bool hit = false;
        for (const auto& g : verts)
            if (!pt_leq(g, zb) || pt_eq(g, zb)) hit = true;
        if (hit) continue;
        if (poles_in_closed_disk(finf, KElem::zero(F), qq) > 0) continue;
        Pt img_w = image_of_point(finf, Pt::make(KElem::zero(F), qq));
        Pt bdry_w = Pt::make(KElem::zero(F), qq);
        if (pt_leq(img_w, bdry_w) && !pt_eq(img_w, bdry_w)) return Disk{zb, Witness::infinity()};
    }
    return std::nullopt;
}

bool in_closed_cycle_disk(const Disk& D, const Pt& x) {
    if (pt_eq(x, D.boundary)) return true;
    if (D.dir.kind == Witness::Kind::inf) {
        // closed complement side: not strictly inside the open z-disk
        Val v = (x.center - D.boundary.center).val();
        bool strictly_inside = x.radius_exp > D.boundary.radius_exp &&
                               Val::of(D.boundary.radius_exp) < v;
        return !strictly_inside;
    }
    return disk_contains_pt(D, x);
}

} // namespace

AugmentationResult stabilize(const BerkMap& f, const VertexSet& G, const StabilizeBounds& bounds) {
    AugmentationResult out;
    std::vector<Pt> cur = G.vertices();
    int added = 0;
    std::vector<AttractingCycle> cycles;
    bool cycles_ready = false;

    auto adjoin = [&](const Pt& p) -> bool {
        for (const auto& v : cur)
            if (pt_eq(v, p)) return true;
        if (added >= bounds.max_new_vertices) return false;
        cur.push_back(p);
        ++added;
        return true;
    };

    for (;;) {
        VertexSet Gi(G.field(), cur);
        StabilityReport rep = check_stability(f, Gi, bounds.orbit_bound);
        if (rep.is_stable()) {
            // independent re-check backs the verdict
            StabilityReport verify = check_stability(f, Gi, bounds.orbit_bound);
            if (!verify.is_stable()) throw internal_error("stabilize: verification diverged");
            out.gamma_prime = cur;
            out.stable = true;
            out.final_report = verify;
            out.added = added;
            for (const auto& vv : verify.verdicts) {
                VertexCertificate c;
                c.vertex = vv.vertex;
                if (vv.kind == VertexVerdict::Kind::in_gamma) {
                    c.kind = VertexCertificate::Kind::maps_into_gamma;
                } else {
                    bool wandering = vv.detail.fcert == Classification::FCert::periodic_disks ||
                                     vv.detail.fcert == Classification::FCert::wandering_translate;
                    c.kind = wandering ? VertexCertificate::Kind::wandering_f_disk
                                       : VertexCertificate::Kind::attracting_f_disk;
                    c.period = vv.detail.cert_period;
                }
                out.certificates.push_back(c);
            }
            return out;
        }
        // first offender drives the next move
        int offender = -1;
        for (const auto& vv : rep.verdicts) {
            if (vv.kind == VertexVerdict::Kind::lands_in_J ||
                vv.kind == VertexVerdict::Kind::inconclusive) {
                offender = vv.vertex;
                break;
            }
        }
        if (offender < 0) throw internal_error("stabilize: unstable without offender");
        const Pt& zeta = cur[static_cast<std::size_t>(offender)];
        Pt zeta_copy = zeta;

        if (!cycles_ready) {
            cycles_ready = true;
            try {
                Rat prec = Rat(4);
                for (const auto& v : cur) {
                    Rat a = abs(v.radius_exp) + 4;
                    if (a > prec) prec = a;
                }
                cycles = find_attracting_cycles(f, bounds.max_period, prec, bounds.policy,
                                                bounds.ram_grid);
            } catch (const extension_required&) {
                cycles.clear();
            } catch (const unresolved_factorization&) {
                cycles.clear();
            }
        }

        // walk the orbit: a repeat closes it; entering a certified attracting
        // disk adjoins that disk's boundary
        OrbitResult orb = orbit_with_preperiodicity(f, zeta_copy, bounds.orbit_bound);
        if (orb.preperiodic) {
            bool ok = true;
            for (std::size_t k = 1; k < orb.points.size() && ok; ++k) ok = adjoin(orb.points[k]);
            if (!ok) {
                out.blocked_bound = "max_new_vertices";
                out.blocked_vertex = pt_string(zeta_copy);
                out.final_report = rep;
                out.added = added;
                return out;
            }
            continue;
        }
        bool moved = false;
        for (const auto& cyc : cycles) {
            auto disk = gamma_avoiding_cycle_disk(f, cyc, cur, bounds.ram_grid);
            if (!disk) continue;
            bool entered = false;
            for (std::size_t k = 1; k < orb.points.size() && !entered; ++k)
                entered = in_closed_cycle_disk(*disk, orb.points[k]);
            if (!entered) continue;
            if (!adjoin(disk->boundary)) {
                out.blocked_bound = "max_new_vertices";
                out.blocked_vertex = pt_string(zeta_copy);
                out.final_report = rep;
                out.added = added;
                return out;
            }
            moved = true;
            break;
        }
        if (moved) continue;
        // fallback: one forward image at a time
        if (orb.points.size() < 2) {
            out.blocked_bound = orb.size_guarded ? "orbit-size-guard" : "orbit-bound";
            out.blocked_vertex = pt_string(zeta_copy);
            out.final_report = rep;
            out.added = added;
            return out;
        }
        if (!adjoin(orb.points[1])) {
            out.blocked_bound = "max_new_vertices";
            out.blocked_vertex = pt_string(zeta_copy);
            out.final_report = rep;
            out.added = added;
            return out;
        }
    }
}

} // namespace berkmc
