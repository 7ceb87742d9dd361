#include "berkmc/partition.hpp"

#include "berkmc/errors.hpp"

#include <algorithm>

namespace berkmc {

namespace {

constexpr std::size_t kSizeGuardBits = 1u << 21;

std::string pt_key(const Pt& x) { return pt_string(x); }

// candidate directions at x that could carry surplus: the directions toward poles
std::vector<Witness> pole_direction_candidates(const BerkMap& f, const Pt& x) {
    const FieldPtr& Fp = f.field();
    const NumberField& F = *Fp;
    std::vector<Witness> out;
    auto add = [&](const Witness& w) {
        for (const auto& o : out)
            if (o == w) return;
        out.push_back(w);
    };
    if (f.fixes_inf() || kp_deg(f.den()) > kp_deg(f.num())) {
        // a pole at infinity (deg P > deg Q) sits in the infinity direction
        if (f.fixes_inf()) add(Witness::infinity());
    }
    if (kp_deg(f.den()) >= 1) {
        KElem tau = KElem::t_power(Fp, x.radius_exp);
        KPoly S = kp_compose_affine(f.den(), x.center, tau);
        if (!kp_is_zero(S)) {
            NewtonPolygon np = newton_polygon(S);
            if (np.ord0 > 0) add(Witness::finite(F.zero()));
            int left = np.ord0;
            for (const auto& seg : np.segments) {
                Rat sigma = -seg.slope;
                if (sigma > 0) add(Witness::finite(F.zero()));
                if (sigma < 0) add(Witness::infinity());
                if (sigma == 0) {
                    FPoly S0;
                    Rat v0 = S[left].val().q;
                    for (int i = left; i <= left + seg.length; ++i) {
                        if (i >= static_cast<int>(S.size()) || S[i].is_zero()) continue;
                        Val vi = S[i].val();
                        if (vi.inf || vi.q != v0) continue;
                        if (static_cast<int>(S0.size()) <= i - left) S0.resize(i - left + 1, F.zero());
                        S0[i - left] = S[i].leading_coeff();
                    }
                    S0 = F.p_trim(std::move(S0));
                    for (const auto& fac : F.factor(S0)) {
                        if (F.p_deg(fac.factor) == 1)
                            add(Witness::finite(F.neg(fac.factor[0])));
                        else
                            add(Witness::cls_of(fac.factor));
                    }
                }
                left += seg.length;
            }
        }
    }
    return out;
}

std::vector<Witness> surplus_directions_at(const BerkMap& f, const Pt& x) {
    std::vector<Witness> out;
    for (const auto& w : pole_direction_candidates(f, x)) {
        DiskImage di = image_disk(f, {x, w});
        if (di.surplus > 0) out.push_back(w);
    }
    return out;
}

// ---- affine direction-orbit avoidance ----

struct Affine {
    FElem a, b; // w -> a w + b
};

std::optional<Affine> as_affine(const NumberField& F, const FPoly& num, const FPoly& den) {
    if (F.p_deg(den) != 0 || F.p_deg(num) > 1 || num.empty()) return std::nullopt;
    FElem dinv = F.inv(den[0]);
    FElem a = num.size() > 1 ? F.mul(num[1], dinv) : F.zero();
    FElem b = F.mul(num[0], dinv);
    if (F.is_zero(a)) return std::nullopt; // constant maps cannot occur here
    return Affine{a, b};
}

Affine compose(const NumberField& F, const Affine& f2, const Affine& f1) {
    // f2 after f1
    return {F.mul(f2.a, f1.a), F.add(F.mul(f2.a, f1.b), f2.b)};
}

FElem apply(const NumberField& F, const Affine& f, const FElem& w) {
    return F.add(F.mul(f.a, w), f.b);
}

enum class Hit { no, yes, unknown };

// does the orbit w, T(w), T^2(w), ... ever hit the target?
Hit affine_orbit_hits(const NumberField& F, const Affine& T, const FElem& w0, const FElem& target) {
    if (F.eq(w0, target)) return Hit::yes;
    if (F.eq(T.a, F.one())) {
        if (F.is_zero(T.b)) return Hit::no; // identity
        FElem k = F.div(F.sub(target, w0), T.b);
        auto kr = F.as_rat(k);
        if (!kr) return Hit::no;
        return (kr->get_den() == 1 && *kr >= 0) ? Hit::yes : Hit::no;
    }
    // root of unity up to order 6: T^r is a translation acting on r cosets
    FElem pw = T.a;
    for (int r = 1; r <= 6; ++r) {
        if (r > 1) pw = F.mul(pw, T.a);
        if (F.eq(pw, F.one())) {
            Affine Tr = T;
            for (int i = 1; i < r; ++i) Tr = compose(F, T, Tr);
            if (!F.eq(Tr.a, F.one())) return Hit::unknown;
            FElem w = w0;
            for (int i = 0; i < r; ++i) {
                Hit h = affine_orbit_hits(F, Tr, w, target);
                if (h != Hit::no) return h;
                w = apply(F, T, w);
            }
            return Hit::no;
        }
    }
    // multiplier of infinite order: solve a^k = tau exactly over Q
    FElem phi = F.div(T.b, F.sub(F.one(), T.a));
    if (F.eq(w0, phi)) return Hit::no; // fixed direction, already unequal to target
    FElem tau = F.div(F.sub(target, phi), F.sub(w0, phi));
    auto ar = F.as_rat(T.a);
    auto tr = F.as_rat(tau);
    if (ar && tr) {
        if (*tr == 0) return Hit::no;
        Rat p = 1;
        auto height = [](const Rat& q) {
            Int h = abs(q.get_num());
            if (abs(q.get_den()) > h) h = abs(q.get_den());
            return h;
        };
        Int htau = height(*tr);
        for (int k = 0; k < 4096; ++k) {
            if (p == *tr) return Hit::yes;
            if (height(p) > htau && height(p * *ar) > htau && k > 2) return Hit::no;
            p *= *ar;
        }
        return Hit::unknown;
    }
    return Hit::unknown;
}

} // namespace

// ---- classification ----

namespace {

struct ChainStep {
    Disk disk;
    PointImage pi; // image of disk.boundary with tangent
};

Classification classify_disk_chain(const BerkMap& f, const VertexSet& G, const Disk& start,
                                   int orbit_bound);

Classification classify_ref(const BerkMap& f, const VertexSet& G, const DomainRef& U,
                            int orbit_bound, int depth_guard) {
    if (U.kind == DomainRef::Kind::vertex)
        throw internal_error("classify_domain applied to a vertex");
    if (depth_guard <= 0) return {Classification::Kind::inconclusive, 0, Classification::FCert::none, 0,
                                  "forward-reduction depth exhausted"};
    SimpleDomain bd = G.boundary_disks(U);
    for (int v = 0; v < G.size(); ++v) {
        if (count_preimages_in_simple_domain(f, bd, Rep::point(G.vertices()[v])) > 0)
            return {Classification::Kind::J, 1, Classification::FCert::none, 0, ""};
    }
    if (U.kind == DomainRef::Kind::disk)
        return classify_disk_chain(f, G, bd[0], orbit_bound);
    // inner domain: f(U) misses Gamma, hence lies in one Gamma-domain
    const Pt& rep = G.inner_domains()[U.inner].representative;
    Pt img = image_of_point(f, rep);
    if (G.find_vertex(img) >= 0)
        throw internal_error("inner-domain image hits a vertex despite zero counts");
    DomainRef W = G.locate(img);
    if (W == U) // f(U) inside U: no iterate can reach Gamma
        return {Classification::Kind::F, 0, Classification::FCert::routed, 0, "self-invariant"};
    Classification inner = classify_ref(f, G, W, orbit_bound, depth_guard - 1);
    if (inner.kind == Classification::Kind::F)
        return {Classification::Kind::F, 0, Classification::FCert::routed, inner.cert_period, ""};
    return {Classification::Kind::inconclusive, 0, Classification::FCert::none, 0,
            "forward image lies in a domain not certified F"};
}

Classification classify_disk_chain(const BerkMap& f, const VertexSet& G, const Disk& start,
                                   int orbit_bound) {
    const NumberField& F = *f.field();
    std::vector<ChainStep> chain;
    std::map<std::string, PointImage> pi_cache;
    std::map<std::string, std::vector<Witness>> surplus_cache;
    auto image_of = [&](const Pt& x) -> const PointImage& {
        std::string k = pt_key(x);
        auto it = pi_cache.find(k);
        if (it == pi_cache.end()) it = pi_cache.emplace(k, image_with_tangent(f, x)).first;
        return it->second;
    };
    Disk cur = start;
    for (int n = 0; n <= orbit_bound; ++n) {
        const PointImage& pi = image_of(cur.boundary);
        chain.push_back({cur, pi});
        DiskImage di = image_disk_from(f, pi, cur);
        if (di.surplus > 0)
            return {Classification::Kind::J, n + 1, Classification::FCert::none, 0, ""};
        Disk next = di.image;
        for (int v = 0; v < G.size(); ++v)
            if (disk_contains_pt(next, G.vertices()[v]))
                return {Classification::Kind::J, n + 1, Classification::FCert::none, 0, ""};
        for (int m = n; m >= 0; --m) {
            if (disk_eq(next, chain[m].disk))
                return {Classification::Kind::F, 0, Classification::FCert::periodic_disks, n + 1 - m, ""};
            if (disk_inside_disk(next, chain[m].disk))
                return {Classification::Kind::F, 0, Classification::FCert::nested_disks, n + 1 - m, ""};
        }
        // absorption: an invariant disk spanned by an earlier boundary point
        // toward the current one, avoiding Gamma, swallows the tail
        for (int m = n; m >= 0; --m) {
            const Pt& bk = chain[m].disk.boundary;
            if (pt_eq(bk, next.boundary)) continue;
            Disk W{bk, direction_at(bk, Target{next.boundary})};
            if (!disk_inside_disk(next, W)) continue;
            bool hits_gamma = false;
            for (int v = 0; v < G.size() && !hits_gamma; ++v)
                if (disk_contains_pt(W, G.vertices()[v])) hits_gamma = true;
            if (hits_gamma) continue;
            DiskImage wi = image_disk_from(f, image_of(bk), W);
            if (wi.surplus != 0) continue;
            if (disk_eq(wi.image, W) || disk_inside_disk(wi.image, W))
                return {Classification::Kind::F, 0, Classification::FCert::absorbed, n + 1 - m, ""};
        }
        // boundary-periodic: try the affine direction-orbit certificate
        for (int m = 0; m <= n; ++m) {
            if (!pt_eq(next.boundary, chain[m].disk.boundary)) continue;
            int p = n + 1 - m;
            // step maps along the cycle must be affine
            std::vector<Affine> steps;
            bool ok = true;
            for (int j = 0; j < p; ++j) {
                auto aff = as_affine(F, chain[m + j].pi.tf.num, chain[m + j].pi.tf.den);
                if (!aff) {
                    ok = false;
                    break;
                }
                steps.push_back(*aff);
            }
            if (!ok || next.dir.kind != Witness::Kind::fin) break;
            // direction at the cycle entry after one full loop
            if (chain[m].disk.dir.kind != Witness::Kind::fin) break;
            Affine Tcyc = steps[0];
            for (int j = 1; j < p; ++j) Tcyc = compose(F, steps[j], Tcyc);
            // positions j = 0..p-1: direction orbit c_j, cycle map conjugated
            bool certified = true;
            FElem c0 = next.dir.res; // direction at b_m on the second passage
            Affine Aj{F.one(), F.zero()};
            for (int j = 0; j < p && certified; ++j) {
                if (j > 0) Aj = compose(F, steps[j - 1], Aj);
                FElem cj = apply(F, Aj, c0);
                Affine Tj{Tcyc.a, F.zero()};
                // conjugate shift: Tj = Aj o Tcyc o Aj^{-1}; for affine maps the
                // multiplier is preserved and the shift follows from one application
                FElem tj_of_cj = apply(F, Aj, apply(F, Tcyc, c0));
                Tj.b = F.sub(tj_of_cj, F.mul(Tj.a, cj));
                const Pt& bj = chain[m + j].disk.boundary;
                std::string sk = pt_key(bj);
                auto sit = surplus_cache.find(sk);
                if (sit == surplus_cache.end())
                    sit = surplus_cache.emplace(sk, surplus_directions_at(f, bj)).first;
                std::vector<FElem> bad;
                for (const auto& w : sit->second)
                    if (w.kind == Witness::Kind::fin) bad.push_back(w.res);
                for (int v = 0; v < G.size(); ++v) {
                    const Pt& gv = G.vertices()[v];
                    if (pt_eq(gv, bj)) continue;
                    Witness w = direction_at(bj, Target{gv});
                    if (w.kind == Witness::Kind::fin) bad.push_back(w.res);
                }
                for (const auto& b : bad) {
                    Hit h = affine_orbit_hits(F, Tj, cj, b);
                    if (h != Hit::no) {
                        certified = false;
                        break;
                    }
                }
            }
            if (certified)
                return {Classification::Kind::F, 0, Classification::FCert::wandering_translate, p, ""};
            break;
        }
        if (next.boundary.center.bits() > kSizeGuardBits ||
            rat_bits(next.boundary.radius_exp) > 14)
            return {Classification::Kind::inconclusive, 0, Classification::FCert::none, 0,
                    "orbit representation size guard"};
        cur = next;
    }
    return {Classification::Kind::inconclusive, 0, Classification::FCert::none, 0,
            "orbit bound exhausted without certificate"};
}

} // namespace

Classification classify_domain(const BerkMap& f, const VertexSet& G, const DomainRef& U,
                               int orbit_bound) {
    return classify_ref(f, G, U, orbit_bound, orbit_bound + 2);
}

StabilityReport check_stability(const BerkMap& f, const VertexSet& G, int orbit_bound) {
    StabilityReport rep;
    bool any_inconclusive = false, any_j = false;
    for (int v = 0; v < G.size(); ++v) {
        const Pt& x = G.vertices()[v];
        Pt img = image_of_point(f, x);
        int tv = G.find_vertex(img);
        if (tv >= 0) {
            rep.verdicts.push_back({VertexVerdict::Kind::in_gamma, v,
                                    {DomainRef::Kind::vertex, tv, Witness::infinity(), -1},
                                    {}});
            continue;
        }
        DomainRef landing = G.locate(img);
        Classification cls = classify_domain(f, G, landing, orbit_bound);
        VertexVerdict::Kind k;
        switch (cls.kind) {
            case Classification::Kind::F: k = VertexVerdict::Kind::lands_in_F; break;
            case Classification::Kind::J:
                k = VertexVerdict::Kind::lands_in_J;
                any_j = true;
                break;
            default:
                k = VertexVerdict::Kind::inconclusive;
                any_inconclusive = true;
        }
        rep.verdicts.push_back({k, v, landing, cls});
    }
    rep.verdict = any_j            ? StabilityReport::Verdict::unstable
                  : any_inconclusive ? StabilityReport::Verdict::inconclusive
                                     : StabilityReport::Verdict::stable;
    return rep;
}

std::optional<int> totally_invariant_vertex(const BerkMap& f, const VertexSet& G) {
    for (int v = 0; v < G.size(); ++v) {
        PointImage pi = image_with_tangent(f, G.vertices()[v]);
        if (pt_eq(pi.image, G.vertices()[v]) && pi.tf.local_degree == f.degree()) return v;
    }
    return std::nullopt;
}

// ---- StateSpace ----

StateSpace::StateSpace(BerkMap f, VertexSet G, int depth)
    : f_(std::move(f)), G_(std::move(G)), depth_(depth) {
    if (depth_ < 1) throw parse_error("depth must be >= 1");
    for (int v = 0; v < G_.size(); ++v)
        for (const auto& w : surplus_directions_at(f_, G_.vertices()[v]))
            surplus_dirs_.emplace_back(v, w);
    for (int v = 0; v < G_.size(); ++v)
        intern_({DomainRef::Kind::vertex, v, Witness::infinity(), -1}, 0);
    for (int i = 0; i < size(); ++i)
        if (states_[i].level < depth_) expand_(i);
}

const PointImage& StateSpace::point_image_(const Pt& x) {
    std::string k = pt_key(x);
    auto it = point_images_.find(k);
    if (it == point_images_.end()) it = point_images_.emplace(k, image_with_tangent(f_, x)).first;
    return it->second;
}

const DiskImage& StateSpace::disk_image_(const Disk& D) {
    std::string k = pt_key(D.boundary) + "|" + witness_string(*f_.field(), D.dir);
    auto it = disk_images_.find(k);
    if (it == disk_images_.end())
        it = disk_images_.emplace(k, image_disk_from(f_, point_image_(D.boundary), D)).first;
    return it->second;
}

int StateSpace::intern_(const DomainRef& ref, int level) {
    std::string key = G_.key_of(ref);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int idx = size();
    int csize = ref.kind == DomainRef::Kind::disk ? ref.dir.size() : 1;
    states_.push_back({ref, key, level, csize, false});
    rows_.emplace_back();
    index_[key] = idx;
    return idx;
}

Rep StateSpace::representative(int u) const {
    const State& s = states_[u];
    switch (s.ref.kind) {
        case DomainRef::Kind::vertex:
            return Rep::point(G_.vertices()[s.ref.vertex]);
        case DomainRef::Kind::disk: {
            Disk D{G_.vertices()[s.ref.vertex], s.ref.dir};
            if (s.ref.dir.kind == Witness::Kind::cls)
                return Rep::family(D.boundary, s.ref.dir.h, G_.probe_depth());
            return Rep::point(push_into(D, G_.probe_depth()));
        }
        case DomainRef::Kind::inner:
            return Rep::point(G_.inner_domains()[s.ref.inner].representative);
    }
    throw internal_error("representative: bad state");
}

void StateSpace::expand_(int u) {
    const NumberField& F = *f_.field();
    Rep y = representative(u);
    std::map<int, long> row;
    long total = 0;
    // preimages that are vertices: f(v) = y with the full local degree
    for (int v = 0; v < G_.size(); ++v) {
        const PointImage& pi = point_image_(G_.vertices()[v]);
        if (y.kind == Rep::Kind::pt && pt_eq(pi.image, y.pt)) {
            int col = index_of(G_.key_of({DomainRef::Kind::vertex, v, Witness::infinity(), -1}));
            row[col] += pi.tf.local_degree;
            total += pi.tf.local_degree;
        }
    }
    // candidate components: surplus directions and tangent-fiber directions
    std::vector<DomainRef> cands;
    auto add_cand = [&](const DomainRef& r) {
        for (const auto& c : cands)
            if (c == r) return;
        cands.push_back(r);
    };
    for (const auto& [v, w] : surplus_dirs_) add_cand(G_.component_from(v, w));
    for (int v = 0; v < G_.size(); ++v) {
        const PointImage& pi = point_image_(G_.vertices()[v]);
        const Pt& b = pi.image;
        Witness tau;
        bool have = true;
        switch (y.kind) {
            case Rep::Kind::pt:
                if (pt_eq(y.pt, b))
                    have = false;
                else
                    tau = direction_at(b, Target{y.pt});
                break;
            case Rep::Kind::family:
                if (pt_eq(y.pt, b))
                    tau = Witness::cls_of(y.cls);
                else
                    tau = direction_at(b, Target{y.pt});
                break;
            case Rep::Kind::t1fin:
                tau = direction_at(b, Target{TypeIFin{y.c}});
                break;
            case Rep::Kind::t1inf:
                tau = Witness::infinity();
                break;
        }
        if (!have) continue;
        for (const auto& [w, mult] : tangent_fiber(F, pi.tf, tau)) {
            (void)mult;
            add_cand(G_.component_from(v, w));
        }
    }
    int d = f_.degree();
    for (const auto& ref : cands) {
        SimpleDomain V = G_.boundary_disks(ref);
        int n = static_cast<int>(V.size());
        long cnt = -static_cast<long>(d) * (n - 1);
        for (const auto& Di : V) {
            const DiskImage& di = disk_image_(Di);
            int gi = Di.dir.size();
            int wsz = di.image.dir.size();
            long p0 = pairs_in_disk(F, y, di.image);
            long ni_num = static_cast<long>(gi) * p0;
            if (ni_num % (static_cast<long>(wsz) * y.size()) != 0)
                throw internal_error("state row: pairs not equidistributed");
            cnt += (ni_num / (static_cast<long>(wsz) * y.size())) * di.degree_on_disk +
                   static_cast<long>(gi) * di.surplus;
        }
        if (cnt < 0) throw internal_error("state row: negative count");
        if (cnt == 0) continue;
        int col = intern_(ref, states_[u].level + 1);
        row[col] += cnt;
        total += cnt;
    }
    if (total != d) throw internal_error("row sum differs from the degree: " + states_[u].key);
    rows_[u] = std::move(row);
    states_[u].row_complete = true;
}

int StateSpace::index_of(const std::string& key) const {
    auto it = index_.find(key);
    return it == index_.end() ? -1 : it->second;
}

int StateSpace::index_of_ref(const DomainRef& ref) const { return index_of(G_.key_of(ref)); }

const std::map<int, long>& StateSpace::row(int u) const {
    if (!states_[u].row_complete) throw internal_error("row of an incomplete state requested");
    return rows_[u];
}

bool StateSpace::has_j_domain() const {
    for (const auto& s : states_)
        if (s.ref.kind != DomainRef::Kind::vertex) return true;
    return false;
}

StateSpace enumerate_states(const BerkMap& f, const VertexSet& G, int depth) {
    return StateSpace(f, G, depth);
}

// ---- boundary classification ----

BoundaryClass classify_boundary(const BerkMap& f) {
    const NumberField& F = *f.field();
    const FieldPtr& Fp = f.field();
    int d = f.degree();
    // clear the minimal valuation across both coefficient lists and reduce
    Val c = Val::infinite();
    for (const auto& x : f.num())
        if (x.val() < c) c = x.val();
    for (const auto& x : f.den())
        if (x.val() < c) c = x.val();
    KElem scale = KElem::t_power(Fp, -c.q);
    auto reduce = [&](const KPoly& p) {
        FPoly r(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) r[i] = (p[i] * scale).residue_at(Rat(0));
        return F.p_trim(std::move(r));
    };
    FPoly Pr = reduce(f.num());
    FPoly Qr = reduce(f.den());
    BoundaryClass out;
    if (Pr.empty() && Qr.empty()) throw internal_error("boundary reduction vanished");
    FPoly h;
    int k;
    if (Pr.empty()) {
        h = F.p_monic(Qr);
        k = d - F.p_deg(Qr);
    } else if (Qr.empty()) {
        h = F.p_monic(Pr);
        k = d - F.p_deg(Pr);
    } else {
        h = F.p_gcd(Pr, Qr);
        k = d - std::max(F.p_deg(Pr), F.p_deg(Qr));
    }
    out.H_affine = h;
    out.H_inf_mult = k;
    out.phi_num = Pr.empty() ? FPoly{} : F.p_divrem(Pr, h).first;
    out.phi_den = Qr.empty() ? FPoly{} : F.p_divrem(Qr, h).first;
    int phi_deg = d - F.p_deg(h) - k;
    out.phi_constant = phi_deg == 0;
    if (out.phi_constant) {
        if (Qr.empty()) {
            out.phi_value = Witness::infinity();
            out.in_indeterminacy = k >= 1;
        } else if (Pr.empty()) {
            out.phi_value = Witness::finite(F.zero());
            out.in_indeterminacy = F.is_zero(F.p_eval(h, F.zero()));
        } else {
            FElem v = F.div(out.phi_num[0], out.phi_den[0]);
            out.phi_value = Witness::finite(v);
            out.in_indeterminacy = F.is_zero(F.p_eval(h, v));
        }
    }
    return out;
}

} // namespace berkmc
