#pragma once

#include "berkmc/numberfield.hpp"

#include <compare>
#include <optional>

namespace berkmc {

// Valuation value: a rational or +infinity (for 0).
struct Val {
    bool inf = false;
    Rat q = 0;

    static Val infinite() { return {true, 0}; }
    static Val of(Rat r) { return {false, std::move(r)}; }
    bool operator==(const Val& o) const { return inf == o.inf && (inf || q == o.q); }
    bool operator<(const Val& o) const {
        if (inf) return false;
        if (o.inf) return true;
        return q < o.q;
    }
    bool operator<=(const Val& o) const { return *this == o || *this < o; }
    Val operator+(const Val& o) const {
        if (inf || o.inf) return infinite();
        return of(q + o.q);
    }
};

std::string val_string(const Val& v);

// Exact element of K = F(t^{1/ram}): a reduced fraction of polynomials in
// u = t^{1/ram} over the number field F.  Canonical: gcd(num,den) = 1, den
// monic, ram minimal.  Equality is structural.
class KElem {
public:
    KElem() = default;
    KElem(FieldPtr F, int ram, FPoly num, FPoly den);

    static KElem zero(FieldPtr F) { return KElem(std::move(F), 1, {}, {{Rat(1)}}); }
    static KElem one(FieldPtr F);
    static KElem from_f(FieldPtr F, const FElem& c);
    static KElem from_rat(FieldPtr F, const Rat& q);
    static KElem t_power(FieldPtr F, const Rat& q); // t^q, ram = den(q)

    const FieldPtr& field() const { return F_; }
    int ram() const { return ram_; }
    const FPoly& num() const { return num_; }
    const FPoly& den() const { return den_; }

    bool is_zero() const { return num_.empty(); }
    Val val() const;

    KElem operator+(const KElem& o) const;
    KElem operator-(const KElem& o) const;
    KElem operator-() const;
    KElem operator*(const KElem& o) const;
    KElem operator/(const KElem& o) const;
    bool operator==(const KElem& o) const;
    bool operator!=(const KElem& o) const { return !(*this == o); }
    KElem pow(int n) const;

    // leading (lowest-order) series coefficient, in F
    FElem leading_coeff() const;
    // residue at scale q: leading coefficient if val() == q, zero if val() > q
    FElem residue_at(const Rat& q) const;

    // coefficient-wise lift into a larger number field (old F must be Q)
    KElem lift_to(const FieldPtr& bigger) const;

    // Laurent-series truncation: the polynomial part with exponents < q.
    // Canonical center representative for the type II point zeta_{*, q}.
    KElem truncate_below(const Rat& q) const;

    std::string to_string() const;
    std::size_t bits() const;

private:
    void normalize_();
    FieldPtr F_;
    int ram_ = 1;
    FPoly num_, den_; // in u = t^{1/ram}
};

// two elements aligned to a common ramification index (raw, unnormalized)
struct KAligned {
    int ram;
    FPoly na, da, nb, db;
};
KAligned k_unify(const KElem& a, const KElem& b);

// dense polynomial over K, ascending coefficients, trailing zeros trimmed
using KPoly = std::vector<KElem>;

KPoly kp_trim(KPoly p);
int kp_deg(const KPoly& p);
bool kp_is_zero(const KPoly& p);
KPoly kp_add(const KPoly& a, const KPoly& b);
KPoly kp_sub(const KPoly& a, const KPoly& b);
KPoly kp_neg(KPoly a);
KPoly kp_mul(const KPoly& a, const KPoly& b);
KPoly kp_scale(const KPoly& a, const KElem& c);
std::pair<KPoly, KPoly> kp_divrem(const KPoly& a, const KPoly& b);
KPoly kp_gcd(const KPoly& a, const KPoly& b); // monic
KPoly kp_derivative(const KPoly& a);
KElem kp_eval(const KPoly& a, const KElem& x);
// S(w) = p(a + s*w)
KPoly kp_compose_affine(const KPoly& p, const KElem& a, const KElem& s);
std::string kp_to_string(const KPoly& p, const std::string& var);
std::size_t kp_bits(const KPoly& p);
KPoly kp_lift_to(const KPoly& p, const FieldPtr& bigger);

// ---- Newton polygon ----

struct NPSegment {
    Rat slope;  // hull slope; the segment's roots have valuation -slope
    int length; // number of roots (with multiplicity)
};

struct NewtonPolygon {
    std::vector<NPSegment> segments; // slopes strictly increasing
    int ord0 = 0;                    // multiplicity of the root z = 0 (valuation +inf)
    int degree = 0;
};

NewtonPolygon newton_polygon(const KPoly& p);

struct ValRange {
    std::optional<Rat> lo;  // nullopt = -infinity
    std::optional<Rat> hi;  // nullopt = +infinity
    bool lo_open = false;
    bool hi_open = false;
};

// number of roots (in the algebraic closure, with multiplicity) whose
// valuation lies in the range; roots at z = 0 count as valuation +infinity
int count_roots_in_valuation_range(const KPoly& p, const ValRange& range);

// ---- Newton-Puiseux ----

enum class ExtendPolicy { deny, auto_single };

struct PuiseuxBranch {
    KElem center;        // truncated expansion (exact element of K, possibly enlarged field/ram)
    int multiplicity;    // number of roots in this branch (with multiplicity)
    Rat attained;        // terms are correct below this valuation
    bool exact;          // center is an exact root
    bool resolved;       // branch isolates a single root (or is exact)
};

struct PuiseuxResult {
    std::vector<PuiseuxBranch> branches;
    FieldPtr field;      // possibly enlarged
    int ram;             // max ramification used by any branch
    bool extended;       // true if the number field grew
};

PuiseuxResult puiseux_roots(const KPoly& p, const Rat& precision, ExtendPolicy policy);

} // namespace berkmc
