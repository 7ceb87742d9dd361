#include "berkmc/series.hpp"

#include "berkmc/errors.hpp"

#include <algorithm>
#include <numeric>

namespace berkmc {

std::string val_string(const Val& v) { return v.inf ? "inf" : rat_string(v.q); }

namespace {

int fp_ord(const FPoly& p) {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!p[i].empty()) return static_cast<int>(i);
    return -1;
}

// stretch exponents of a poly in u to u' = u^{k}
FPoly fp_stretch(const NumberField& F, const FPoly& p, int k) {
    if (k == 1 || p.empty()) return p;
    FPoly r((p.size() - 1) * k + 1, F.zero());
    for (std::size_t i = 0; i < p.size(); ++i) r[i * k] = p[i];
    return r;
}

// largest k such that only exponents divisible by k occur (0 for the zero poly)
int fp_exponent_gcd(const FPoly& p) {
    int g = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (!p[i].empty()) g = static_cast<int>(std::gcd<long long>(g, i));
    return g;
}

} // namespace

KElem::KElem(FieldPtr F, int ram, FPoly num, FPoly den)
    : F_(std::move(F)), ram_(ram), num_(std::move(num)), den_(std::move(den)) {
    normalize_();
}

KElem KElem::one(FieldPtr F) {
    FPoly c = {F->one()};
    return KElem(std::move(F), 1, c, c);
}

KElem KElem::from_f(FieldPtr F, const FElem& c) {
    FPoly n = c.empty() ? FPoly{} : FPoly{c};
    FPoly d = {F->one()};
    return KElem(std::move(F), 1, n, d);
}

KElem KElem::from_rat(FieldPtr F, const Rat& q) { return from_f(F, F->from_rat(q)); }

KElem KElem::t_power(FieldPtr F, const Rat& q) {
    Rat c = q;
    c.canonicalize();
    long num = c.get_num().get_si();
    long den = c.get_den().get_si();
    FPoly mono(static_cast<std::size_t>(std::abs(num)) + 1, F->zero());
    mono.back() = F->one();
    FPoly one_p = {F->one()};
    if (num >= 0) return KElem(std::move(F), static_cast<int>(den), mono, one_p);
    return KElem(std::move(F), static_cast<int>(den), one_p, mono);
}

void KElem::normalize_() {
    if (!F_) throw internal_error("KElem without field");
    const NumberField& F = *F_;
    num_ = F.p_trim(std::move(num_));
    den_ = F.p_trim(std::move(den_));
    if (den_.empty()) throw internal_error("KElem with zero denominator");
    if (num_.empty()) {
        den_ = {F.one()};
        ram_ = 1;
        return;
    }
    FPoly g = F.p_gcd(num_, den_);
    if (F.p_deg(g) > 0) {
        num_ = F.p_divrem(num_, g).first;
        den_ = F.p_divrem(den_, g).first;
    }
    // clear a common power of u
    int on = fp_ord(num_), od = fp_ord(den_);
    int shift = std::min(on, od);
    if (shift > 0) {
        num_.erase(num_.begin(), num_.begin() + shift);
        den_.erase(den_.begin(), den_.begin() + shift);
    }
    FElem lead_inv = F.inv(den_.back());
    num_ = F.p_scale(num_, lead_inv);
    den_ = F.p_scale(den_, lead_inv);
    // minimize the ramification index
    if (ram_ > 1) {
        int g2 = std::gcd(fp_exponent_gcd(num_), fp_exponent_gcd(den_));
        g2 = std::gcd(g2, std::max(fp_ord(num_), 0));
        g2 = std::gcd(g2, std::max(fp_ord(den_), 0));
        g2 = std::gcd(g2, ram_);
        if (g2 > 1) {
            auto compress = [&](const FPoly& p) {
                FPoly r((p.size() + g2 - 1) / g2);
                for (std::size_t i = 0; i < p.size(); i += g2) r[i / g2] = p[i];
                return F.p_trim(std::move(r));
            };
            num_ = compress(num_);
            den_ = compress(den_);
            ram_ /= g2;
        }
    }
}

KAligned k_unify(const KElem& a, const KElem& b) {
    if (a.field().get() != b.field().get()) throw internal_error("mixed ground fields");
    int l = static_cast<int>(std::lcm(a.ram(), b.ram()));
    const NumberField& F = *a.field();
    return {l,
            fp_stretch(F, a.num(), l / a.ram()), fp_stretch(F, a.den(), l / a.ram()),
            fp_stretch(F, b.num(), l / b.ram()), fp_stretch(F, b.den(), l / b.ram())};
}

Val KElem::val() const {
    if (is_zero()) return Val::infinite();
    Rat q(fp_ord(num_) - fp_ord(den_), ram_);
    q.canonicalize();
    return Val::of(q);
}

KElem KElem::operator+(const KElem& o) const {
    KAligned u = k_unify(*this, o);
    const NumberField& F = *F_;
    FPoly n = F.p_add(F.p_mul(u.na, u.db), F.p_mul(u.nb, u.da));
    return KElem(F_, u.ram, std::move(n), F.p_mul(u.da, u.db));
}

KElem KElem::operator-() const {
    if (!F_) return *this;
    return KElem(F_, ram_, F_->p_neg(num_), den_);
}

KElem KElem::operator-(const KElem& o) const { return *this + (-o); }

KElem KElem::operator*(const KElem& o) const {
    KAligned u = k_unify(*this, o);
    const NumberField& F = *F_;
    return KElem(F_, u.ram, F.p_mul(u.na, u.nb), F.p_mul(u.da, u.db));
}

KElem KElem::operator/(const KElem& o) const {
    if (o.is_zero()) throw internal_error("division by zero in K");
    KAligned u = k_unify(*this, o);
    const NumberField& F = *F_;
    return KElem(F_, u.ram, F.p_mul(u.na, u.db), F.p_mul(u.da, u.nb));
}

bool KElem::operator==(const KElem& o) const {
    if (F_.get() != o.F_.get()) return false;
    if (ram_ != o.ram_) return false;
    return num_ == o.num_ && den_ == o.den_;
}

KElem KElem::pow(int n) const {
    if (n < 0) return KElem::one(F_) / pow(-n);
    KElem r = KElem::one(F_);
    for (int i = 0; i < n; ++i) r = r * *this;
    return r;
}

FElem KElem::leading_coeff() const {
    if (is_zero()) return {};
    const NumberField& F = *F_;
    return F.div(num_[fp_ord(num_)], den_[fp_ord(den_)]);
}

FElem KElem::residue_at(const Rat& q) const {
    Val v = val();
    if (v.inf || v.q > q) return {};
    if (v.q < q) throw internal_error("residue_at below the valuation");
    return leading_coeff();
}

KElem KElem::lift_to(const FieldPtr& bigger) const {
    if (!F_->is_rational()) throw extension_required("compositum of proper extensions is unsupported");
    auto lift_poly = [&](const FPoly& p) {
        FPoly r(p.size());
        for (std::size_t i = 0; i < p.size(); ++i)
            r[i] = p[i].empty() ? bigger->zero() : bigger->from_rat(p[i][0]);
        return r;
    };
    return KElem(bigger, ram_, lift_poly(num_), lift_poly(den_));
}

KElem KElem::truncate_below(const Rat& q) const {
    if (is_zero()) return *this;
    Val v = val();
    if (!(v < Val::of(q))) return zero(F_);
    const NumberField& F = *F_;
    // num/den = u^{on-od} * N(u)/D(u) with N(0), D(0) != 0; expand to u^M
    int on = fp_ord(num_), od = fp_ord(den_);
    FPoly N(num_.begin() + on, num_.end());
    FPoly D(den_.begin() + od, den_.end());
    Rat hi = q * ram_ - (on - od); // series terms k with k < hi survive
    Int hi_i = rat_ceil(hi);
    long M = hi_i.get_si(); // number of series coefficients needed
    if (M <= 0) return zero(F_);
    // long division of N by D to M terms
    FElem d0_inv = F.inv(D[0]);
    FPoly series(static_cast<std::size_t>(M), F.zero());
    for (long k = 0; k < M; ++k) {
        FElem acc = k < static_cast<long>(N.size()) ? N[k] : F.zero();
        for (long j = 1; j <= k && j < static_cast<long>(D.size()); ++j)
            acc = F.sub(acc, F.mul(D[j], series[k - j]));
        series[k] = F.mul(acc, d0_inv);
    }
    // reassemble as a Laurent polynomial u^{on-od} * series(u)
    int shift = on - od;
    int neg = shift < 0 ? -shift : 0;
    FPoly outnum(series.size() + static_cast<std::size_t>(std::max(shift, 0)) + neg, F.zero());
    for (std::size_t k = 0; k < series.size(); ++k)
        outnum[k + static_cast<std::size_t>(shift + neg)] = series[k];
    FPoly outden(static_cast<std::size_t>(neg) + 1, F.zero());
    outden[neg] = F.one();
    return KElem(F_, ram_, F.p_trim(std::move(outnum)), std::move(outden));
}

std::string KElem::to_string() const {
    if (is_zero()) return "0";
    const NumberField& F = *F_;
    auto poly_str = [&](const FPoly& p) {
        if (F.p_deg(p) == 0) return F.to_string(p[0]);
        std::string body;
        bool first = true;
        for (std::size_t i = p.size(); i-- > 0;) {
            if (p[i].empty()) continue;
            std::string cs = F.to_string(p[i]);
            bool comp = cs.find('+') != std::string::npos || cs.find('-', 1) != std::string::npos;
            std::string term;
            if (i == 0) {
                term = comp ? "(" + cs + ")" : cs;
            } else {
                std::string pw = "t";
                if (static_cast<int>(i) != ram_) {
                    Rat e(static_cast<long>(i), ram_);
                    e.canonicalize();
                    pw += "^(" + rat_string(e) + ")";
                }
                if (cs == "1")
                    term = pw;
                else if (cs == "-1")
                    term = "-" + pw;
                else
                    term = (comp ? "(" + cs + ")" : cs) + "*" + pw;
            }
            if (!first && term[0] != '-') body += "+";
            body += term;
            first = false;
        }
        return body;
    };
    std::string ns = poly_str(num_);
    if (F.p_deg(den_) == 0 && F.eq(den_[0], F.one())) return ns;
    std::string ds = poly_str(den_);
    auto wrap = [](const std::string& s) {
        bool needs = s.find('+') != std::string::npos || s.find('-', 1) != std::string::npos ||
                     s.find('*') != std::string::npos;
        return needs ? "(" + s + ")" : s;
    };
    return wrap(ns) + "/" + wrap(ds);
}

std::size_t KElem::bits() const {
    std::size_t n = 0;
    for (const auto& c : num_) n += F_->bits(c);
    for (const auto& c : den_) n += F_->bits(c);
    return n;
}

// ---- KPoly ----

KPoly kp_trim(KPoly p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
    return p;
}

int kp_deg(const KPoly& p) { return static_cast<int>(p.size()) - 1; }
bool kp_is_zero(const KPoly& p) { return p.empty(); }

KPoly kp_add(const KPoly& a, const KPoly& b) {
    KPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i < a.size() && i < b.size())
            r[i] = a[i] + b[i];
        else if (i < a.size())
            r[i] = a[i];
        else
            r[i] = b[i];
    }
    return kp_trim(std::move(r));
}

KPoly kp_neg(KPoly a) {
    for (auto& c : a) c = -c;
    return a;
}

KPoly kp_sub(const KPoly& a, const KPoly& b) { return kp_add(a, kp_neg(b)); }

KPoly kp_mul(const KPoly& a, const KPoly& b) {
    if (a.empty() || b.empty()) return {};
    KPoly r(a.size() + b.size() - 1, KElem::zero(a[0].field() ? a[0].field() : b[0].field()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j].is_zero()) continue;
            r[i + j] = r[i + j] + a[i] * b[j];
        }
    }
    return kp_trim(std::move(r));
}

KPoly kp_scale(const KPoly& a, const KElem& c) {
    if (c.is_zero()) return {};
    KPoly r = a;
    for (auto& x : r) x = x * c;
    return kp_trim(std::move(r));
}

std::pair<KPoly, KPoly> kp_divrem(const KPoly& a, const KPoly& b) {
    if (b.empty()) throw internal_error("KPoly division by zero");
    KPoly r = a, q;
    int db = kp_deg(b);
    if (kp_deg(a) >= db) q.assign(a.size() - b.size() + 1, KElem::zero(b.back().field()));
    while (kp_deg(r) >= db) {
        KElem c = r.back() / b.back();
        int shift = kp_deg(r) - db;
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) r[shift + i] = r[shift + i] - c * b[i];
        r = kp_trim(std::move(r));
    }
    return {kp_trim(std::move(q)), r};
}

KPoly kp_gcd(const KPoly& a, const KPoly& b) {
    KPoly r0 = a, r1 = b;
    while (!r1.empty()) {
        auto [q, r2] = kp_divrem(r0, r1);
        (void)q;
        r0 = r1;
        r1 = r2;
    }
    if (r0.empty()) return r0;
    return kp_scale(r0, KElem::one(r0.back().field()) / r0.back());
}

KPoly kp_derivative(const KPoly& a) {
    if (a.size() <= 1) return {};
    KPoly r(a.size() - 1, KElem::zero(a[0].field()));
    for (std::size_t i = 1; i < a.size(); ++i)
        r[i - 1] = a[i] * KElem::from_rat(a[i].field(), Rat(static_cast<long>(i)));
    return kp_trim(std::move(r));
}

KElem kp_eval(const KPoly& a, const KElem& x) {
    KElem r = KElem::zero(x.field());
    for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
    return r;
}

KPoly kp_compose_affine(const KPoly& p, const KElem& a, const KElem& s) {
    // Horner: p(a + s w)
    FieldPtr F = a.field();
    KPoly lin = {a, s};
    KPoly r;
    for (std::size_t i = p.size(); i-- > 0;) {
        r = kp_mul(r, lin);
        if (!p[i].is_zero()) {
            if (r.empty()) r.push_back(KElem::zero(F));
            r[0] = r[0] + p[i];
        }
        r = kp_trim(std::move(r));
    }
    return r;
}

std::string kp_to_string(const KPoly& p, const std::string& var) {
    if (p.empty()) return "0";
    std::string out;
    bool first = true;
    for (std::size_t i = p.size(); i-- > 0;) {
        if (p[i].is_zero()) continue;
        std::string cs = p[i].to_string();
        bool comp = cs.find('+') != std::string::npos || cs.find('-', 1) != std::string::npos ||
                    cs.find('/') != std::string::npos;
        std::string term;
        if (i == 0) {
            term = comp ? "(" + cs + ")" : cs;
        } else {
            std::string pw = var + (i > 1 ? "^" + std::to_string(i) : "");
            if (cs == "1")
                term = pw;
            else if (cs == "-1")
                term = "-" + pw;
            else
                term = (comp ? "(" + cs + ")" : cs) + "*" + pw;
        }
        if (!first && term[0] != '-') out += "+";
        out += term;
        first = false;
    }
    return out;
}

std::size_t kp_bits(const KPoly& p) {
    std::size_t n = 0;
    for (const auto& c : p) n += c.bits();
    return n;
}

KPoly kp_lift_to(const KPoly& p, const FieldPtr& bigger) {
    KPoly r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[i].lift_to(bigger);
    return r;
}

// ---- Newton polygon ----

NewtonPolygon newton_polygon(const KPoly& p0) {
    KPoly p = kp_trim(p0);
    if (p.empty()) throw parse_error("newton polygon of the zero polynomial");
    NewtonPolygon np;
    np.degree = kp_deg(p);
    std::vector<std::pair<int, Rat>> pts; // (i, val)
    for (int i = 0; i <= kp_deg(p); ++i) {
        if (p[i].is_zero()) continue;
        pts.emplace_back(i, p[i].val().q);
    }
    np.ord0 = pts.front().first;
    // lower convex hull, left to right
    std::vector<std::pair<int, Rat>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // keep if (a,b,pt) makes a strict left turn in the lower-hull sense
            Rat lhs = (b.second - a.second) * (pt.first - b.first);
            Rat rhs = (pt.second - b.second) * (b.first - a.first);
            if (lhs >= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    // collinear middle points were dropped; consecutive hull vertices give the segments
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        Rat slope = (hull[i + 1].second - hull[i].second) / Rat(hull[i + 1].first - hull[i].first);
        np.segments.push_back({slope, hull[i + 1].first - hull[i].first});
    }
    return np;
}

int count_roots_in_valuation_range(const KPoly& p, const ValRange& range) {
    NewtonPolygon np = newton_polygon(p);
    auto in_range = [&](const Val& v) {
        if (v.inf) {
            if (range.hi) return false;   // +infinity only allowed with an unbounded top
            return true;
        }
        if (range.lo) {
            if (range.lo_open ? !(v.q > *range.lo) : !(v.q >= *range.lo)) return false;
        }
        if (range.hi) {
            if (range.hi_open ? !(v.q < *range.hi) : !(v.q <= *range.hi)) return false;
        }
        return true;
    };
    int count = 0;
    for (const auto& seg : np.segments)
        if (in_range(Val::of(-seg.slope))) count += seg.length;
    if (np.ord0 > 0 && in_range(Val::infinite())) count += np.ord0;
    return count;
}

// ---- Newton-Puiseux ----

namespace {

struct NPWork {
    KPoly p;       // recentered polynomial in the local variable y
    KElem center;  // accumulated expansion; z = center + t^{scale} * y
    Rat scale;     // cumulative valuation shift
    bool top;      // top level accepts every segment; deeper levels need slope < 0
    int depth;
};

} // namespace

PuiseuxResult puiseux_roots(const KPoly& p_in, const Rat& precision, ExtendPolicy policy) {
    if (kp_is_zero(p_in)) throw parse_error("puiseux_roots of the zero polynomial");
    FieldPtr F = p_in[0].field();
    KPoly p = p_in;
    PuiseuxResult out;
    out.extended = false;
    const int max_depth = 200 * static_cast<int>(p_in.size()) + 50;

restart:
    out.branches.clear();
    out.ram = 1;
    std::vector<NPWork> stack;
    stack.push_back({p, KElem::zero(F), Rat(0), true, 0});

    while (!stack.empty()) {
        NPWork w = std::move(stack.back());
        stack.pop_back();
        if (w.depth > max_depth) throw internal_error("puiseux_roots: recursion bound exceeded");
        KPoly cur = kp_trim(w.p);
        int ordy = 0;
        while (ordy < static_cast<int>(cur.size()) && cur[ordy].is_zero()) ++ordy;
        if (ordy > 0) {
            out.branches.push_back({w.center, ordy, precision, true, true});
            out.ram = std::max(out.ram, w.center.ram());
            cur.erase(cur.begin(), cur.begin() + ordy);
        }
        if (kp_deg(cur) < 1) continue;
        NewtonPolygon np = newton_polygon(cur);
        int left = 0; // np.ord0 == 0 after the erase above
        for (const auto& seg : np.segments) {
            int seg_left = left;
            left += seg.length;
            Rat sigma = -seg.slope; // local valuation of the roots on this segment
            if (!w.top && !(sigma > 0)) continue; // belongs to a sibling cluster
            Rat sigma_abs = w.scale + sigma;
            if (sigma_abs > precision) {
                out.branches.push_back({w.center, seg.length, precision, false, seg.length == 1});
                out.ram = std::max(out.ram, w.center.ram());
                continue;
            }
            // characteristic polynomial from the coefficients on the hull line
            Rat v_left = cur[seg_left].val().q;
            FPoly chi;
            for (int i = seg_left; i <= seg_left + seg.length; ++i) {
                if (i >= static_cast<int>(cur.size()) || cur[i].is_zero()) continue;
                Val vi = cur[i].val();
                if (vi.inf || vi.q != v_left + seg.slope * Rat(i - seg_left)) continue;
                if (static_cast<int>(chi.size()) <= i - seg_left) chi.resize(i - seg_left + 1, F->zero());
                chi[i - seg_left] = cur[i].leading_coeff();
            }
            chi = F->p_trim(std::move(chi));
            std::vector<std::pair<FElem, int>> roots = F->roots_in_field(chi);
            int covered = 0;
            for (auto& [c, mult] : roots) covered += mult;
            if (covered < F->p_deg(chi)) {
                if (policy == ExtendPolicy::auto_single && F->is_rational()) {
                    for (const auto& f : F->factor(chi)) {
                        if (F->p_deg(f.factor) < 2) continue;
                        std::vector<Rat> mp(f.factor.size());
                        for (std::size_t i = 0; i < f.factor.size(); ++i)
                            mp[i] = f.factor[i].empty() ? Rat(0) : f.factor[i][0];
                        FieldPtr bigger = std::make_shared<NumberField>(mp, "a");
                        F = bigger;
                        p = kp_lift_to(p_in, bigger);
                        out.extended = true;
                        goto restart;
                    }
                    throw internal_error("puiseux: missing residue roots but no nonlinear factor");
                }
                throw extension_required("puiseux_roots: residue root outside the coefficient field");
            }
            for (auto& [c, mult] : roots) {
                (void)mult;
                KElem tp_local = KElem::t_power(F, sigma);
                KElem tp_abs = KElem::t_power(F, sigma_abs);
                KElem new_center = w.center + KElem::from_f(F, c) * tp_abs;
                if (sigma_abs >= precision) {
                    out.branches.push_back({new_center, mult, sigma_abs, false, mult == 1});
                    out.ram = std::max(out.ram, new_center.ram());
                    continue;
                }
                KPoly next = kp_compose_affine(cur, KElem::from_f(F, c) * tp_local, tp_local);
                stack.push_back({next, new_center, sigma_abs, false, w.depth + 1});
            }
        }
    }
    out.field = F;
    return out;
}

} // namespace berkmc
