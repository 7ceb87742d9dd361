#include "berkmc/numberfield.hpp"

#include "berkmc/errors.hpp"

#include <algorithm>
#include <functional>

namespace berkmc {

namespace {

// ---- helpers over Q[x] (dense, ascending, trimmed) ----

using QPoly = std::vector<Rat>;

QPoly qp_trim(QPoly p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
    return p;
}

int qp_deg(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

QPoly qp_add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return qp_trim(std::move(r));
}

QPoly qp_neg(QPoly a) {
    for (auto& c : a) c = -c;
    return a;
}

QPoly qp_mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return qp_trim(std::move(r));
}

Rat qp_eval(const QPoly& p, const Rat& x) {
    Rat r(0);
    for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

std::pair<QPoly, QPoly> qp_divrem(const QPoly& a, const QPoly& b) {
    if (b.empty()) throw internal_error("qp_divrem by zero");
    QPoly r = a, q;
    int db = qp_deg(b);
    if (qp_deg(a) >= db) q.assign(a.size() - b.size() + 1, Rat(0));
    while (qp_deg(r) >= db) {
        Rat c = r.back() / b.back();
        int shift = qp_deg(r) - db;
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) r[shift + i] -= c * b[i];
        r = qp_trim(std::move(r));
    }
    return {qp_trim(std::move(q)), r};
}

// integer content-normalized copy: primitive integer coefficients
std::vector<Int> qp_primitive(const QPoly& p) {
    Int lcm_den(1);
    for (const auto& c : p)
        mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den().get_mpz_t());
    std::vector<Int> z;
    z.reserve(p.size());
    Int gcd_all(0);
    for (const auto& c : p) {
        Int v = c.get_num() * (lcm_den / c.get_den());
        mpz_gcd(gcd_all.get_mpz_t(), gcd_all.get_mpz_t(), v.get_mpz_t());
        z.push_back(v);
    }
    if (gcd_all > 1)
        for (auto& v : z) v /= gcd_all;
    return z;
}

constexpr std::size_t kDivisorCap = 4096;

// all rational roots with multiplicity, removed from p in place
std::vector<std::pair<Rat, int>> qp_rational_roots(QPoly& p) {
    std::vector<std::pair<Rat, int>> out;
    if (qp_deg(p) < 1) return out;
    // roots at zero
    int z = 0;
    while (!p.empty() && p.front() == 0) {
        p.erase(p.begin());
        ++z;
    }
    if (z) out.emplace_back(Rat(0), z);
    if (qp_deg(p) < 1) return out;
    auto zp = qp_primitive(p);
    auto nums = divisors_signed(zp.front(), kDivisorCap);
    auto dens = divisors_signed(zp.back(), kDivisorCap);
    if (nums.empty() || dens.empty())
        throw unresolved_factorization("rational root search: divisor bound exceeded");
    for (const auto& n : nums) {
        for (const auto& d : dens) {
            if (d <= 0) continue;
            Rat cand(n, d);
            cand.canonicalize();
            int mult = 0;
            while (qp_deg(p) >= 1 && qp_eval(p, cand) == 0) {
                QPoly lin = {-cand, Rat(1)};
                auto [q, r] = qp_divrem(p, lin);
                if (!r.empty()) break;
                p = q;
                ++mult;
            }
            if (mult) out.emplace_back(cand, mult);
        }
    }
    return out;
}

// monic quadratic factors over Q of a polynomial with no rational roots
// (Kronecker interpolation on x = 0, 1, -1)
std::vector<QPoly> qp_quadratic_factors(const QPoly& p0) {
    std::vector<QPoly> out;
    QPoly p = p0;
    if (qp_deg(p) < 2) return out;
    auto zp = qp_primitive(p);
    QPoly pz(zp.size());
    for (std::size_t i = 0; i < zp.size(); ++i) pz[i] = Rat(zp[i]);
    Int v0 = qp_eval(pz, Rat(0)).get_num();
    Int v1 = qp_eval(pz, Rat(1)).get_num();
    Int vm = qp_eval(pz, Rat(-1)).get_num();
    if (v0 == 0 || v1 == 0 || vm == 0) return out; // rational roots were not stripped
    auto d0 = divisors_signed(v0, kDivisorCap);
    auto d1 = divisors_signed(v1, kDivisorCap);
    auto dm = divisors_signed(vm, kDivisorCap);
    if (d0.empty() || d1.empty() || dm.empty())
        throw unresolved_factorization("quadratic factor search: divisor bound exceeded");
    for (const auto& a0 : d0)
        for (const auto& a1 : d1)
            for (const auto& am : dm) {
                // q(0)=a0, q(1)=a1, q(-1)=am
                Int two_c1 = a1 - am;
                Int two_c2 = a1 + am - 2 * a0;
                if (two_c1 % 2 != 0 || two_c2 % 2 != 0) continue;
                Int c2 = two_c2 / 2;
                if (c2 == 0) continue;
                QPoly q = {Rat(a0), Rat(two_c1 / 2), Rat(c2)};
                auto [quo, rem] = qp_divrem(pz, q);
                if (!rem.empty()) continue;
                QPoly monic = {q[0] / q[2], q[1] / q[2], Rat(1)};
                if (std::find(out.begin(), out.end(), monic) == out.end()) out.push_back(monic);
            }
    return out;
}

} // namespace

// ---- NumberField ----

NumberField::NumberField() : min_poly_{Rat(0), Rat(1)}, gen_name_("a"), deg_(1) {}

NumberField::NumberField(std::vector<Rat> min_poly, std::string gen_name)
    : min_poly_(std::move(min_poly)), gen_name_(std::move(gen_name)) {
    if (min_poly_.size() < 3 || min_poly_.back() != 1)
        throw parse_error("number field minimal polynomial must be monic of degree >= 2");
    deg_ = static_cast<int>(min_poly_.size()) - 1;
}

FElem NumberField::from_rat(const Rat& q) const {
    Rat c = q;
    c.canonicalize();
    if (c == 0) return {};
    return {c};
}

FElem NumberField::gen() const {
    if (deg_ == 1) throw internal_error("generator requested over Q");
    return reduce_({Rat(0), Rat(1)});
}

FElem NumberField::reduce_(std::vector<Rat> c) const {
    // reduce modulo the minimal polynomial
    while (static_cast<int>(c.size()) > deg_) {
        Rat lead = c.back();
        std::size_t k = c.size() - 1;
        c.pop_back();
        if (lead == 0) continue;
        for (int i = 0; i < deg_; ++i) c[k - deg_ + i] -= lead * min_poly_[i];
    }
    while (!c.empty() && c.back() == 0) c.pop_back();
    return c;
}

bool NumberField::eq(const FElem& a, const FElem& b) const { return a == b; }

FElem NumberField::add(const FElem& a, const FElem& b) const {
    std::vector<Rat> r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

FElem NumberField::sub(const FElem& a, const FElem& b) const { return add(a, neg(b)); }

FElem NumberField::neg(const FElem& a) const {
    FElem r = a;
    for (auto& c : r) c = -c;
    return r;
}

FElem NumberField::mul(const FElem& a, const FElem& b) const {
    if (a.empty() || b.empty()) return {};
    std::vector<Rat> r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return reduce_(std::move(r));
}

FElem NumberField::inv(const FElem& a) const {
    if (a.empty()) throw internal_error("number field division by zero");
    if (deg_ == 1) return {Rat(1) / a[0]};
    // extended Euclid on (min_poly, a) over Q[x]
    QPoly r0 = min_poly_, r1(a.begin(), a.end());
    QPoly s0 = {}, s1 = {Rat(1)};
    while (!r1.empty()) {
        auto [q, r2] = qp_divrem(r0, r1);
        QPoly s2 = qp_add(s0, qp_neg(qp_mul(q, s1)));
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if (qp_deg(r0) != 0) throw internal_error("minimal polynomial not irreducible");
    Rat c = r0[0];
    for (auto& x : s0) x /= c;
    return reduce_(std::move(s0));
}

FElem NumberField::div(const FElem& a, const FElem& b) const { return mul(a, inv(b)); }

std::optional<Rat> NumberField::as_rat(const FElem& a) const {
    if (a.empty()) return Rat(0);
    if (a.size() == 1) return a[0];
    return std::nullopt;
}

std::optional<FElem> NumberField::sqrt(const FElem& a) const {
    if (a.empty()) return FElem{};
    if (auto q = as_rat(a)) {
        if (auto s = rat_sqrt(*q)) return from_rat(*s);
        if (deg_ == 1) return std::nullopt;
    }
    if (deg_ != 2) {
        if (as_rat(a)) return std::nullopt;   // non-square rational in a deep field: give up
        return std::nullopt;
    }
    // F = Q[x]/(x^2 + m1 x + m0); solve (u + v a)^2 = a0 + a1 a
    Rat m1 = min_poly_[1], m0 = min_poly_[0];
    Rat a0 = a.size() > 0 ? a[0] : Rat(0);
    Rat a1 = a.size() > 1 ? a[1] : Rat(0);
    auto check = [&](const Rat& u, const Rat& v) -> std::optional<FElem> {
        FElem cand = reduce_({u, v});
        if (eq(mul(cand, cand), a)) return cand;
        return std::nullopt;
    };
    if (a1 == 0) {
        if (auto u = rat_sqrt(a0))
            if (auto r = check(*u, Rat(0))) return r;
        Rat denom = m1 * m1 / 4 - m0;
        if (denom != 0) {
            if (auto v = rat_sqrt(a0 / denom))
                if (auto r = check(-*v * m1 / 2, *v)) return r;
        }
        return std::nullopt;
    }
    // quadratic in T = v^2:  T^2 (m1^2-4 m0) + T (2 a1 m1 - 4 a0) + a1^2 = 0
    Rat A = m1 * m1 - 4 * m0, B = 2 * a1 * m1 - 4 * a0, C = a1 * a1;
    Rat disc = B * B - 4 * A * C;
    auto sd = rat_sqrt(disc);
    if (!sd) return std::nullopt;
    for (int sign : {+1, -1}) {
        Rat T = (-B + sign * *sd) / (2 * A);
        auto v = rat_sqrt(T);
        if (!v || *v == 0) continue;
        Rat u = (a1 + T * m1) / (2 * *v);
        if (auto r = check(u, *v)) return r;
    }
    return std::nullopt;
}

std::string NumberField::to_string(const FElem& a) const {
    if (a.empty()) return "0";
    std::string out;
    bool first = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        Rat c = a[i];
        std::string term;
        if (i == 0) {
            term = rat_string(c);
        } else {
            std::string pw = gen_name_ + (i > 1 ? "^" + std::to_string(i) : "");
            if (c == 1)
                term = pw;
            else if (c == -1)
                term = "-" + pw;
            else
                term = rat_string(c) + "*" + pw;
        }
        if (!first && term[0] != '-') out += "+";
        out += term;
        first = false;
    }
    return out;
}

std::size_t NumberField::bits(const FElem& a) const {
    std::size_t n = 0;
    for (const auto& c : a) n += rat_bits(c);
    return n;
}

// ---- polynomials over F ----

FPoly NumberField::p_const(const FElem& c) const {
    if (c.empty()) return {};
    return {c};
}

FPoly NumberField::p_x() const { return {zero(), one()}; }

FPoly NumberField::p_trim(FPoly p) const {
    while (!p.empty() && p.back().empty()) p.pop_back();
    return p;
}

bool NumberField::p_eq(const FPoly& a, const FPoly& b) const { return a == b; }

FPoly NumberField::p_add(const FPoly& a, const FPoly& b) const {
    FPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
        FElem x = i < a.size() ? a[i] : zero();
        FElem y = i < b.size() ? b[i] : zero();
        r[i] = add(x, y);
    }
    return p_trim(std::move(r));
}

FPoly NumberField::p_sub(const FPoly& a, const FPoly& b) const { return p_add(a, p_neg(b)); }

FPoly NumberField::p_neg(const FPoly& a) const {
    FPoly r = a;
    for (auto& c : r) c = neg(c);
    return r;
}

FPoly NumberField::p_mul(const FPoly& a, const FPoly& b) const {
    if (a.empty() || b.empty()) return {};
    FPoly r(a.size() + b.size() - 1, zero());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].empty()) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j].empty()) continue;
            r[i + j] = add(r[i + j], mul(a[i], b[j]));
        }
    }
    return p_trim(std::move(r));
}

FPoly NumberField::p_scale(const FPoly& a, const FElem& c) const {
    if (c.empty()) return {};
    FPoly r = a;
    for (auto& x : r) x = mul(x, c);
    return p_trim(std::move(r));
}

std::pair<FPoly, FPoly> NumberField::p_divrem(const FPoly& a, const FPoly& b) const {
    if (b.empty()) throw internal_error("polynomial division by zero");
    FPoly r = a, q;
    int db = p_deg(b);
    FElem lead_inv = inv(b.back());
    if (p_deg(a) >= db) q.assign(a.size() - b.size() + 1, zero());
    while (p_deg(r) >= db) {
        FElem c = mul(r.back(), lead_inv);
        int shift = p_deg(r) - db;
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) r[shift + i] = sub(r[shift + i], mul(c, b[i]));
        r = p_trim(std::move(r));
    }
    return {p_trim(std::move(q)), r};
}

FPoly NumberField::p_monic(const FPoly& a) const {
    if (a.empty()) return a;
    return p_scale(a, inv(a.back()));
}

FPoly NumberField::p_gcd(const FPoly& a, const FPoly& b) const {
    FPoly r0 = a, r1 = b;
    while (!r1.empty()) {
        auto [q, r2] = p_divrem(r0, r1);
        (void)q;
        r0 = r1;
        r1 = r2;
    }
    if (r0.empty()) return r0;
    return p_monic(r0);
}

FPoly NumberField::p_derivative(const FPoly& a) const {
    if (a.size() <= 1) return {};
    FPoly r(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = mul(a[i], from_rat(Rat(static_cast<long>(i))));
    return p_trim(std::move(r));
}

FPoly NumberField::p_pow(const FPoly& a, int n) const {
    FPoly r = p_const(one());
    for (int i = 0; i < n; ++i) r = p_mul(r, a);
    return r;
}

FElem NumberField::p_eval(const FPoly& a, const FElem& x) const {
    FElem r = zero();
    for (std::size_t i = a.size(); i-- > 0;) r = add(mul(r, x), a[i]);
    return r;
}

FPoly NumberField::p_squarefree_part(const FPoly& a) const {
    if (p_deg(a) <= 0) return a;
    FPoly g = p_gcd(a, p_derivative(a));
    if (p_deg(g) <= 0) return p_monic(a);
    return p_monic(p_divrem(a, g).first);
}

bool NumberField::p_divides(const FPoly& d, const FPoly& a) const {
    if (d.empty()) return a.empty();
    return p_divrem(a, d).second.empty();
}

std::string NumberField::p_to_string(const FPoly& a, const std::string& var) const {
    if (a.empty()) return "0";
    std::string out;
    bool first = true;
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i].empty()) continue;
        std::string coeff = to_string(a[i]);
        bool composite = coeff.find('+') != std::string::npos ||
                         coeff.find('-', 1) != std::string::npos;
        std::string term;
        if (i == 0) {
            term = composite ? "(" + coeff + ")" : coeff;
        } else {
            std::string pw = var + (i > 1 ? "^" + std::to_string(i) : "");
            if (coeff == "1")
                term = pw;
            else if (coeff == "-1")
                term = "-" + pw;
            else
                term = (composite ? "(" + coeff + ")" : coeff) + "*" + pw;
        }
        if (!first && term[0] != '-') out += "+";
        out += term;
        first = false;
    }
    return out;
}

// ---- roots and factorization ----

std::vector<std::pair<FElem, int>> NumberField::roots_squarefree_(const FPoly& p) const {
    std::vector<std::pair<FElem, int>> out; // mult always 1 here
    if (p_deg(p) < 1) return out;
    if (deg_ == 1) {
        QPoly q(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[i].empty() ? Rat(0) : p[i][0];
        q = qp_trim(std::move(q));
        QPoly work = q;
        for (auto& [r, m] : qp_rational_roots(work)) {
            (void)m;
            out.emplace_back(from_rat(r), 1);
        }
        return out;
    }
    // Norm to Q[x] via multiplication matrices, then pick up candidates whose
    // minimal polynomial over Q is linear or quadratic.  Complete for [F:Q] = 2.
    // N(x) = det(sum_j M_{c_j} x^j), an m x m matrix with Q[x] entries.
    int m = deg_;
    std::vector<std::vector<QPoly>> M(m, std::vector<QPoly>(m));
    for (int j = 0; j < static_cast<int>(p.size()); ++j) {
        const FElem& c = p[j];
        if (c.empty()) continue;
        for (int col = 0; col < m; ++col) {
            // column = c * alpha^col in the power basis
            FElem am(static_cast<std::size_t>(col) + 1, Rat(0));
            am[col] = 1;
            FElem prod = mul(c, reduce_(std::vector<Rat>(am.begin(), am.end())));
            for (int row = 0; row < m; ++row) {
                Rat entry = row < static_cast<int>(prod.size()) ? prod[row] : Rat(0);
                if (entry == 0) continue;
                QPoly term(static_cast<std::size_t>(j) + 1, Rat(0));
                term[j] = entry;
                M[row][col] = qp_add(M[row][col], term);
            }
        }
    }
    // determinant by cofactor expansion (m <= 4 in practice)
    std::function<QPoly(const std::vector<std::vector<QPoly>>&)> det =
        [&](const std::vector<std::vector<QPoly>>& A) -> QPoly {
        std::size_t n = A.size();
        if (n == 1) return A[0][0];
        QPoly acc;
        for (std::size_t i = 0; i < n; ++i) {
            if (A[i][0].empty()) continue;
            std::vector<std::vector<QPoly>> minor;
            minor.reserve(n - 1);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                std::vector<QPoly> row(A[r].begin() + 1, A[r].end());
                minor.push_back(std::move(row));
            }
            QPoly term = qp_mul(A[i][0], det(minor));
            if (i % 2) term = qp_neg(term);
            acc = qp_add(acc, term);
        }
        return acc;
    };
    QPoly N = det(M);
    if (N.empty()) throw internal_error("norm polynomial vanished");
    auto rational_candidates = qp_rational_roots(N);
    auto try_root = [&](const FElem& cand) {
        if (!is_zero(p_eval(p, cand))) return;
        for (auto& [r, mm] : out)
            if (eq(r, cand)) return;
        out.emplace_back(cand, 1);
    };
    for (auto& [r, mm] : rational_candidates) {
        (void)mm;
        try_root(from_rat(r));
    }
    for (const auto& q : qp_quadratic_factors(N)) {
        // roots of x^2 + q1 x + q0 in F via sqrt of the discriminant
        Rat q1 = q[1], q0 = q[0];
        FElem disc = from_rat(q1 * q1 - 4 * q0);
        auto s = sqrt(disc);
        if (!s) continue;
        FElem half = from_rat(Rat(1, 2));
        FElem r1 = mul(half, add(from_rat(-q1), *s));
        FElem r2 = mul(half, sub(from_rat(-q1), *s));
        try_root(r1);
        try_root(r2);
    }
    return out;
}

std::vector<std::pair<FElem, int>> NumberField::roots_in_field(const FPoly& p) const {
    std::vector<std::pair<FElem, int>> out;
    if (p_deg(p) < 1) return out;
    FPoly sf = p_squarefree_part(p);
    for (auto& [r, m1] : roots_squarefree_(sf)) {
        (void)m1;
        // true multiplicity by repeated division
        FPoly lin = {neg(r), one()};
        FPoly work = p;
        int mult = 0;
        while (p_deg(work) >= 1) {
            auto [q, rem] = p_divrem(work, lin);
            if (!rem.empty()) break;
            work = q;
            ++mult;
        }
        out.emplace_back(r, mult);
    }
    return out;
}

std::vector<FFactor> NumberField::factor(const FPoly& p) const {
    std::vector<FFactor> out;
    if (p_deg(p) < 1) return out;
    // Yun's squarefree decomposition, then split each squarefree part
    FPoly a = p_monic(p);
    std::vector<std::pair<FPoly, int>> squarefree;
    {
        FPoly d = p_derivative(a);
        FPoly g = p_gcd(a, d);
        FPoly w = p_divrem(a, g).first;
        FPoly y = p_divrem(d, g).first;
        int k = 1;
        while (p_deg(w) >= 1) {
            FPoly z = p_sub(y, p_derivative(w));
            FPoly f = p_gcd(w, z);
            if (p_deg(f) >= 1) squarefree.emplace_back(p_monic(f), k);
            w = p_divrem(w, f).first;
            y = p_divrem(z, f).first;
            ++k;
        }
    }
    for (auto& [part, mult] : squarefree) {
        FPoly rem = part;
        for (auto& [r, m1] : roots_squarefree_(rem)) {
            (void)m1;
            FPoly lin = {neg(r), one()};
            rem = p_divrem(rem, lin).first;
            out.push_back({lin, mult});
        }
        int dr = p_deg(rem);
        if (dr <= 0) continue;
        if (deg_ > 2)
            throw unresolved_factorization("irreducibility not certified over fields of degree > 2");
        if (dr == 1) {
            out.push_back({p_monic(rem), mult});
        } else if (dr == 2 || dr == 3) {
            out.push_back({p_monic(rem), mult}); // rootless quadratic/cubic is irreducible
        } else if (dr == 4) {
            // rootless quartic: split into quadratics via the resolvent cubic
            FPoly mq = p_monic(rem);
            FElem A = mq[3], B = mq[2], C = mq[1], D = mq[0];
            // resolvent: z^3 - B z^2 + (AC - 4D) z - (A^2 D + C^2 - 4 B D)
            FPoly res = {neg(add(add(mul(mul(A, A), D), mul(C, C)), neg(mul(from_rat(4), mul(B, D))))),
                         sub(mul(A, C), mul(from_rat(4), D)),
                         neg(B),
                         one()};
            bool split = false;
            for (auto& [z, zm] : roots_in_field(res)) {
                (void)zm;
                // q + s = z, qs = D ; p + r = A, pr = B - z
                auto s1 = sqrt(sub(mul(z, z), mul(from_rat(4), D)));
                auto s2 = sqrt(sub(mul(A, A), mul(from_rat(4), sub(B, z))));
                if (!s1 || !s2) continue;
                FElem half = from_rat(Rat(1, 2));
                FElem qv = mul(half, add(z, *s1)), sv = mul(half, sub(z, *s1));
                for (int sign : {+1, -1}) {
                    FElem pv = mul(half, add(A, sign > 0 ? *s2 : neg(*s2)));
                    FElem rv = sub(A, pv);
                    FPoly f1 = {qv, pv, one()};
                    FPoly f2 = {sv, rv, one()};
                    if (p_eq(p_mul(f1, f2), mq)) {
                        out.push_back({f1, mult});
                        out.push_back({f2, mult});
                        split = true;
                        break;
                    }
                }
                if (split) break;
            }
            if (!split) out.push_back({mq, mult}); // no root, no quadratic split: irreducible
        } else {
            throw unresolved_factorization("factorization beyond degree 4 not supported");
        }
    }
    return out;
}

bool NumberField::is_irreducible(const FPoly& p) const {
    if (p_deg(p) < 1) return false;
    auto fs = factor(p);
    return fs.size() == 1 && fs[0].mult == 1;
}

std::vector<Rat> NumberField::min_poly_of(const FElem& a) const {
    if (auto q = as_rat(a)) return {-*q, Rat(1)};
    // characteristic polynomial of multiplication-by-a, then squarefree part
    int m = deg_;
    std::vector<std::vector<QPoly>> M(m, std::vector<QPoly>(m));
    for (int col = 0; col < m; ++col) {
        FElem basis(static_cast<std::size_t>(col) + 1, Rat(0));
        basis[col] = 1;
        FElem prod = mul(a, reduce_(std::vector<Rat>(basis.begin(), basis.end())));
        for (int row = 0; row < m; ++row) {
            Rat entry = row < static_cast<int>(prod.size()) ? prod[row] : Rat(0);
            QPoly cell;
            if (row == col) cell = qp_add(cell, QPoly{Rat(0), Rat(1)}); // x on the diagonal
            if (entry != 0) cell = qp_add(cell, QPoly{-entry});
            M[row][col] = cell;
        }
    }
    std::function<QPoly(const std::vector<std::vector<QPoly>>&)> det =
        [&](const std::vector<std::vector<QPoly>>& A) -> QPoly {
        std::size_t n = A.size();
        if (n == 1) return A[0][0];
        QPoly acc;
        for (std::size_t i = 0; i < n; ++i) {
            if (A[i][0].empty()) continue;
            std::vector<std::vector<QPoly>> minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                minor.emplace_back(A[r].begin() + 1, A[r].end());
            }
            QPoly term = qp_mul(A[i][0], det(minor));
            if (i % 2) term = qp_neg(term);
            acc = qp_add(acc, term);
        }
        return acc;
    };
    QPoly cp = det(M);
    // char poly of a field element is minpoly^(m/deg); take the squarefree part
    NumberField Q;
    FPoly cpf(cp.size());
    for (std::size_t i = 0; i < cp.size(); ++i) cpf[i] = Q.from_rat(cp[i]);
    FPoly sf = Q.p_squarefree_part(Q.p_trim(std::move(cpf)));
    std::vector<Rat> outp(sf.size());
    for (std::size_t i = 0; i < sf.size(); ++i) outp[i] = sf[i].empty() ? Rat(0) : sf[i][0];
    return outp;
}

FPoly NumberField::image_class_min_poly(const FPoly& h, const FPoly& gn, const FPoly& gd) const {
    int m = p_deg(h);
    if (m < 1) throw internal_error("image_class_min_poly: bad modulus");
    // beta = gn * gd^{-1} mod h, via extended Euclid in F[x]
    FPoly r0 = h, r1 = p_divrem(gd, h).second;
    if (r1.empty()) throw internal_error("image_class_min_poly: gd not invertible mod h");
    FPoly s0 = {}, s1 = p_const(one());
    while (!r1.empty()) {
        auto [q, r2] = p_divrem(r0, r1);
        FPoly s2 = p_sub(s0, p_mul(q, s1));
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if (p_deg(r0) != 0) throw internal_error("image_class_min_poly: modulus not irreducible");
    FPoly gd_inv = p_scale(s0, inv(r0[0]));
    FPoly beta = p_divrem(p_mul(gn, gd_inv), h).second;
    // multiplication-by-beta matrix over F in the theta power basis
    std::vector<std::vector<FPoly>> M(m, std::vector<FPoly>(m)); // entries in F[x] (char var)
    for (int col = 0; col < m; ++col) {
        FPoly bc(static_cast<std::size_t>(col) + 1, zero());
        bc[col] = one();
        FPoly prod = p_divrem(p_mul(beta, bc), h).second;
        for (int row = 0; row < m; ++row) {
            FElem entry = row < static_cast<int>(prod.size()) ? prod[row] : zero();
            FPoly cell;
            if (row == col) cell = p_add(cell, p_x());
            if (!entry.empty()) cell = p_add(cell, p_const(neg(entry)));
            M[row][col] = cell;
        }
    }
    std::function<FPoly(const std::vector<std::vector<FPoly>>&)> det =
        [&](const std::vector<std::vector<FPoly>>& A) -> FPoly {
        std::size_t n = A.size();
        if (n == 1) return A[0][0];
        FPoly acc;
        for (std::size_t i = 0; i < n; ++i) {
            if (A[i][0].empty()) continue;
            std::vector<std::vector<FPoly>> minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                minor.emplace_back(A[r].begin() + 1, A[r].end());
            }
            FPoly term = p_mul(A[i][0], det(minor));
            if (i % 2) term = p_neg(term);
            acc = p_add(acc, term);
        }
        return acc;
    };
    return p_squarefree_part(det(M));
}

} // namespace berkmc
