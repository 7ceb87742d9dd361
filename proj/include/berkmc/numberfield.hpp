#pragma once

#include "berkmc/rat.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace berkmc {

// Element of F = Q[x]/(m(x)): coefficient vector in the power basis,
// trailing zeros trimmed (empty = 0).  Over Q the vector has length <= 1.
using FElem = std::vector<Rat>;

// Polynomial over F, coefficient list by ascending degree, trailing zeros
// trimmed (empty = 0).
using FPoly = std::vector<FElem>;

struct FFactor {
    FPoly factor;   // monic irreducible
    int mult = 0;
};

// Arithmetic manager for F = Q or Q[x]/(m), m monic irreducible over Q.
// Immutable; every operation is a pure function of its arguments.
class NumberField {
public:
    NumberField();                                     // F = Q
    NumberField(std::vector<Rat> min_poly, std::string gen_name); // monic, deg >= 2

    int degree() const { return deg_; }
    bool is_rational() const { return deg_ == 1; }
    const std::vector<Rat>& min_poly() const { return min_poly_; }
    const std::string& gen_name() const { return gen_name_; }

    // element ops
    FElem zero() const { return {}; }
    FElem one() const { return from_rat(1); }
    FElem from_rat(const Rat& q) const;
    FElem gen() const;                                 // the class of x; error over Q
    bool is_zero(const FElem& a) const { return a.empty(); }
    bool eq(const FElem& a, const FElem& b) const;
    FElem add(const FElem& a, const FElem& b) const;
    FElem sub(const FElem& a, const FElem& b) const;
    FElem neg(const FElem& a) const;
    FElem mul(const FElem& a, const FElem& b) const;
    FElem inv(const FElem& a) const;
    FElem div(const FElem& a, const FElem& b) const;
    std::optional<Rat> as_rat(const FElem& a) const;   // value if a is rational
    std::optional<FElem> sqrt(const FElem& a) const;   // exact sqrt in F if found
    std::string to_string(const FElem& a) const;
    std::size_t bits(const FElem& a) const;

    // dense univariate polynomial ops over F
    FPoly p_zero() const { return {}; }
    FPoly p_const(const FElem& c) const;
    FPoly p_x() const;
    int p_deg(const FPoly& p) const { return static_cast<int>(p.size()) - 1; }
    bool p_is_zero(const FPoly& p) const { return p.empty(); }
    FPoly p_trim(FPoly p) const;
    bool p_eq(const FPoly& a, const FPoly& b) const;
    FPoly p_add(const FPoly& a, const FPoly& b) const;
    FPoly p_sub(const FPoly& a, const FPoly& b) const;
    FPoly p_neg(const FPoly& a) const;
    FPoly p_mul(const FPoly& a, const FPoly& b) const;
    FPoly p_scale(const FPoly& a, const FElem& c) const;
    std::pair<FPoly, FPoly> p_divrem(const FPoly& a, const FPoly& b) const;
    FPoly p_monic(const FPoly& a) const;
    FPoly p_gcd(const FPoly& a, const FPoly& b) const; // monic
    FPoly p_derivative(const FPoly& a) const;
    FPoly p_pow(const FPoly& a, int n) const;
    FElem p_eval(const FPoly& a, const FElem& x) const;
    FPoly p_squarefree_part(const FPoly& a) const;
    bool p_divides(const FPoly& d, const FPoly& a) const;
    std::string p_to_string(const FPoly& a, const std::string& var) const;

    // roots of p lying in F, with multiplicities
    std::vector<std::pair<FElem, int>> roots_in_field(const FPoly& p) const;

    // complete factorization into monic irreducibles; exact for residual
    // squarefree degree <= 4, throws unresolved_factorization beyond
    std::vector<FFactor> factor(const FPoly& p) const;
    bool is_irreducible(const FPoly& p) const;

    // minimal polynomial over Q of an element of F (monic, rational coeffs)
    std::vector<Rat> min_poly_of(const FElem& a) const;

    // minimal polynomial over F of the image g(theta) in F[theta]/(h), where
    // h is monic irreducible over F and g = gn/gd with gd(theta) invertible.
    // Used to push direction classes through tangent maps.
    FPoly image_class_min_poly(const FPoly& h, const FPoly& gn, const FPoly& gd) const;

private:
    FElem reduce_(std::vector<Rat> c) const;
    std::vector<std::pair<FElem, int>> roots_squarefree_(const FPoly& p) const;

    std::vector<Rat> min_poly_; // size deg_+1, monic; {0,1} placeholder over Q
    std::string gen_name_;
    int deg_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

} // namespace berkmc
