#include "berkmc/dynamics.hpp"

#include "berkmc/errors.hpp"

#include <algorithm>

namespace berkmc {

BerkMap::BerkMap(KPoly num, KPoly den) : num_(kp_trim(std::move(num))), den_(kp_trim(std::move(den))) {
    if (den_.empty()) throw parse_error("map with zero denominator");
    if (num_.empty()) throw parse_error("map is constant zero");
    F_ = den_[0].field();
    KPoly g = kp_gcd(num_, den_);
    if (kp_deg(g) > 0) {
        num_ = kp_divrem(num_, g).first;
        den_ = kp_divrem(den_, g).first;
    }
    // canonical scaling: monic denominator
    KElem lead = den_.back();
    num_ = kp_scale(num_, KElem::one(F_) / lead);
    den_ = kp_scale(den_, KElem::one(F_) / lead);
    degree_ = std::max(kp_deg(num_), kp_deg(den_));
    if (degree_ < 1) throw parse_error("map is constant after cancellation");
}

std::optional<KElem> BerkMap::eval_t1(const KElem& c) const {
    KElem dv = kp_eval(den_, c);
    if (dv.is_zero()) return std::nullopt;
    return kp_eval(num_, c) / dv;
}

std::optional<KElem> BerkMap::eval_inf() const {
    int dn = kp_deg(num_), dd = kp_deg(den_);
    if (dn > dd) return std::nullopt;
    if (dn < dd) return KElem::zero(F_);
    return num_.back() / den_.back();
}

bool BerkMap::fixes_inf() const { return kp_deg(num_) > kp_deg(den_); }

KPoly BerkMap::fixed_point_numerator() const {
    // numerator of f(z) - z = (P - z Q)/Q
    KPoly zq(den_.size() + 1, KElem::zero(F_));
    for (std::size_t i = 0; i < den_.size(); ++i) zq[i + 1] = den_[i];
    return kp_sub(num_, zq);
}

std::pair<KPoly, KPoly> BerkMap::derivative_pair() const {
    KPoly dn = kp_derivative(num_), dd = kp_derivative(den_);
    return {kp_sub(kp_mul(dn, den_), kp_mul(num_, dd)), kp_mul(den_, den_)};
}

// ---- image of a point, with tangent data ----

namespace {

Val kp_min_val(const KPoly& p) {
    Val m = Val::infinite();
    for (const auto& c : p)
        if (c.val() < m) m = c.val();
    return m;
}

FPoly reduce_at_zero(const NumberField& F, const KPoly& p) {
    FPoly r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[i].residue_at(Rat(0));
    return F.p_trim(std::move(r));
}

int poly_root_multiplicity(const NumberField& F, const FPoly& p, const FElem& r) {
    FPoly lin = {F.neg(r), F.one()};
    FPoly work = p;
    int mult = 0;
    while (F.p_deg(work) >= 1) {
        auto [q, rem] = F.p_divrem(work, lin);
        if (!rem.empty()) break;
        work = q;
        ++mult;
    }
    return mult;
}

int factor_multiplicity(const NumberField& F, const FPoly& p, const FPoly& h) {
    FPoly work = p;
    int mult = 0;
    while (F.p_deg(work) >= F.p_deg(h)) {
        auto [q, rem] = F.p_divrem(work, h);
        if (!rem.empty()) break;
        work = q;
        ++mult;
    }
    return mult;
}

} // namespace

PointImage image_with_tangent(const BerkMap& f, const Pt& x) {
    const FieldPtr& Fp = f.field();
    const NumberField& F = *Fp;
    KElem tau = KElem::t_power(Fp, x.radius_exp);
    KPoly N = kp_compose_affine(f.num(), x.center, tau);
    KPoly D = kp_compose_affine(f.den(), x.center, tau);
    if (kp_is_zero(N) || kp_is_zero(D))
        throw internal_error("image_with_tangent: degenerate composition");
    KElem C = KElem::zero(Fp);
    const int max_steps = 64 * (f.degree() + 2);
    for (int step = 0; step < max_steps; ++step) {
        Val cn = kp_min_val(N), cd = kp_min_val(D);
        Rat mu = cn.q - cd.q;
        mu.canonicalize();
        KPoly Nh = kp_scale(N, KElem::t_power(Fp, -cn.q));
        KPoly Dh = kp_scale(D, KElem::t_power(Fp, -cd.q));
        FPoly Nr = reduce_at_zero(F, Nh);
        FPoly Dr = reduce_at_zero(F, Dh);
        FPoly g = F.p_gcd(Nr, Dr);
        FPoly pn = F.p_deg(g) > 0 ? F.p_divrem(Nr, g).first : Nr;
        FPoly pd = F.p_deg(g) > 0 ? F.p_divrem(Dr, g).first : Dr;
        int m = std::max(F.p_deg(pn), F.p_deg(pd));
        if (m >= 1) {
            Pt img = Pt::make(C, mu);
            TangentMap T{pn, pd, x, img, m};
            return {img, T};
        }
        // constant reduction: recenter the target and descend
        FElem kappa = F.div(pn.empty() ? F.zero() : pn[0], pd[0]);
        if (F.is_zero(kappa)) throw internal_error("image descent: zero constant");
        KElem shift = KElem::from_f(Fp, kappa) * KElem::t_power(Fp, mu);
        C = C + shift;
        N = kp_sub(N, kp_scale(D, shift));
        if (kp_is_zero(N)) throw internal_error("image descent: map is constant");
        Val cn2 = kp_min_val(N);
        if (!(cn.q < cn2.q)) throw internal_error("image descent made no progress");
    }
    throw internal_error("image descent did not terminate");
}

Pt image_of_point(const BerkMap& f, const Pt& x) { return image_with_tangent(f, x).image; }

int local_degree(const BerkMap& f, const Pt& x) { return image_with_tangent(f, x).tf.local_degree; }

// ---- tangent map action ----

namespace {

// fiber polynomial over a target witness; the infinity direction's
// multiplicity is the gap to local_degree * target-size
FPoly fiber_poly(const NumberField& F, const TangentMap& T, const Witness& target) {
    switch (target.kind) {
        case Witness::Kind::fin:
            return F.p_sub(T.num, F.p_scale(T.den, target.res));
        case Witness::Kind::inf:
            return T.den;
        case Witness::Kind::cls: {
            int g = F.p_deg(target.h);
            FPoly acc;
            for (int j = 0; j <= g; ++j) {
                if (target.h[j].empty()) continue;
                FPoly term =
                    F.p_scale(F.p_mul(F.p_pow(T.num, j), F.p_pow(T.den, g - j)), target.h[j]);
                acc = F.p_add(acc, term);
            }
            return acc;
        }
    }
    return {};
}

} // namespace

Witness tangent_apply(const NumberField& F, const TangentMap& T, const Witness& w) {
    switch (w.kind) {
        case Witness::Kind::fin: {
            FElem nv = F.p_eval(T.num, w.res);
            FElem dv = F.p_eval(T.den, w.res);
            if (F.is_zero(dv)) return Witness::infinity();
            return Witness::finite(F.div(nv, dv));
        }
        case Witness::Kind::inf: {
            int dn = F.p_deg(T.num), dd = F.p_deg(T.den);
            if (dn > dd) return Witness::infinity();
            if (dn < dd) return Witness::finite(F.zero());
            return Witness::finite(F.div(T.num.back(), T.den.back()));
        }
        case Witness::Kind::cls: {
            if (F.p_divides(w.h, T.den)) return Witness::infinity();
            FPoly mu = F.image_class_min_poly(w.h, T.num, T.den);
            if (F.p_deg(mu) == 1) return Witness::finite(F.neg(mu[0]));
            return Witness::cls_of(F.p_monic(mu));
        }
    }
    throw internal_error("tangent_apply: bad witness");
}

int directional_degree(const NumberField& F, const TangentMap& T, const Witness& w) {
    Witness img = tangent_apply(F, T, w);
    FPoly fib = fiber_poly(F, T, img);
    switch (w.kind) {
        case Witness::Kind::fin:
            return poly_root_multiplicity(F, fib, w.res);
        case Witness::Kind::inf:
            return T.local_degree * img.size() - F.p_deg(fib);
        case Witness::Kind::cls:
            return factor_multiplicity(F, fib, w.h);
    }
    throw internal_error("directional_degree: bad witness");
}

std::vector<std::pair<Witness, int>> tangent_fiber(const NumberField& F, const TangentMap& T,
                                                   const Witness& target) {
    std::vector<std::pair<Witness, int>> out;
    FPoly fib = fiber_poly(F, T, target);
    if (F.p_deg(fib) >= 1) {
        for (const auto& fac : F.factor(fib)) {
            if (F.p_deg(fac.factor) == 1)
                out.emplace_back(Witness::finite(F.neg(fac.factor[0])), fac.mult);
            else
                out.emplace_back(Witness::cls_of(fac.factor), fac.mult);
        }
    }
    int inf_mult = T.local_degree * target.size() - F.p_deg(fib);
    if (inf_mult > 0 && tangent_apply(F, T, Witness::infinity()) == target)
        out.emplace_back(Witness::infinity(), inf_mult);
    return out;
}

// ---- disks ----

int count_roots_in_open_disk(const KPoly& R, const Disk& D) {
    if (kp_deg(R) < 1) return 0;
    const FieldPtr& Fp = R[0].field();
    const NumberField& F = *Fp;
    KElem tau = KElem::t_power(Fp, D.boundary.radius_exp);
    switch (D.dir.kind) {
        case Witness::Kind::fin: {
            KElem lift = D.boundary.center + KElem::from_f(Fp, D.dir.res) * tau;
            KPoly S = kp_compose_affine(R, lift, tau);
            return count_roots_in_valuation_range(S, {Rat(0), std::nullopt, true, false});
        }
        case Witness::Kind::inf: {
            KPoly S = kp_compose_affine(R, D.boundary.center, tau);
            return count_roots_in_valuation_range(S, {std::nullopt, Rat(0), false, true});
        }
        case Witness::Kind::cls: {
            // roots of unit valuation whose residue lies in the class: the
            // zero-slope polygon segment reduces over F; count by divisibility
            KPoly S = kp_compose_affine(R, D.boundary.center, tau);
            NewtonPolygon np = newton_polygon(S);
            int left = np.ord0;
            FPoly S0;
            for (const auto& seg : np.segments) {
                if (seg.slope == 0) {
                    FPoly acc;
                    Rat v0 = S[left].val().q;
                    for (int i = left; i <= left + seg.length; ++i) {
                        if (i >= static_cast<int>(S.size()) || S[i].is_zero()) continue;
                        Val vi = S[i].val();
                        if (vi.inf || vi.q != v0) continue;
                        if (static_cast<int>(acc.size()) <= i - left) acc.resize(i - left + 1, F.zero());
                        acc[i - left] = S[i].leading_coeff();
                    }
                    S0 = F.p_trim(std::move(acc));
                    break;
                }
                left += seg.length;
            }
            if (F.p_deg(S0) < 1) return 0;
            int k = factor_multiplicity(F, S0, D.dir.h);
            return k * (static_cast<int>(D.dir.h.size()) - 1);
        }
    }
    return 0;
}

int count_preimages_t1_in_disk(const BerkMap& f, const Disk& D, const std::optional<KElem>& y) {
    KPoly R;
    if (!y)
        R = f.den();
    else
        R = kp_sub(f.num(), kp_scale(f.den(), *y));
    int inf_mult = f.degree() - kp_deg(R);
    int cnt = kp_deg(R) >= 1 ? count_roots_in_open_disk(R, D) : 0;
    if (inf_mult > 0 && disk_contains_inf(D)) cnt += inf_mult;
    return cnt;
}

DiskImage image_disk(const BerkMap& f, const Disk& D) {
    return image_disk_from(f, image_with_tangent(f, D.boundary), D);
}

DiskImage image_disk_from(const BerkMap& f, const PointImage& pi, const Disk& D) {
    const NumberField& F = *f.field();
    Witness img_dir = tangent_apply(F, pi.tf, D.dir);
    Disk img{pi.image, img_dir};
    int m = directional_degree(F, pi.tf, D.dir);
    // test value outside f-bar(D): the image center unless f-bar(D) is the
    // center direction, in which case infinity works
    std::optional<KElem> test;
    if (img_dir == Witness::finite(F.zero()))
        test = std::nullopt;
    else
        test = pi.image.center;
    int total = count_preimages_t1_in_disk(f, D, test);
    int copies = D.dir.size();
    if (total % copies != 0) throw internal_error("surplus not constant on conjugate copies");
    return {img, m, total / copies};
}

// ---- representative membership and the preimage-count formula ----

int pairs_in_disk(const NumberField& F, const Rep& y, const Disk& D) {
    switch (y.kind) {
        case Rep::Kind::pt:
            return disk_contains_pt(D, y.pt) ? 1 : 0;
        case Rep::Kind::t1fin:
            return disk_contains_t1(D, y.c) ? 1 : 0;
        case Rep::Kind::t1inf:
            return disk_contains_inf(D) ? 1 : 0;
        case Rep::Kind::family: {
            if (pt_eq(y.pt, D.boundary)) {
                if (D.dir.kind != Witness::Kind::cls) return 0;
                return F.p_eq(D.dir.h, y.cls) ? static_cast<int>(y.cls.size()) - 1 : 0;
            }
            if (D.dir.kind == Witness::Kind::cls) return 0;
            Witness tau = direction_at(D.boundary, Target{y.pt});
            return D.dir == tau ? y.size() : 0;
        }
    }
    return 0;
}

int count_preimages_in_simple_domain(const BerkMap& f, const SimpleDomain& V, const Rep& y) {
    const NumberField& F = *f.field();
    int n = static_cast<int>(V.size());
    if (n == 0) throw internal_error("empty simple domain");
    int ysz = y.size();
    long total = -static_cast<long>(f.degree()) * (n - 1);
    for (const auto& Di : V) {
        DiskImage di = image_disk(f, Di);
        int gi = Di.dir.size();
        int wsz = di.image.dir.size();
        int p0 = pairs_in_disk(F, y, di.image);
        long ni_num = static_cast<long>(gi) * p0;
        if (ni_num % (static_cast<long>(wsz) * ysz) != 0)
            throw internal_error("membership pairs not equidistributed over copies");
        long Ni = ni_num / (static_cast<long>(wsz) * ysz);
        total += Ni * di.degree_on_disk + static_cast<long>(gi) * di.surplus;
    }
    if (total < 0) throw internal_error("negative preimage count");
    return static_cast<int>(total);
}

} // namespace berkmc
