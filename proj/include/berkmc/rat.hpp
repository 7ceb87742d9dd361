#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace berkmc {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat rat(long n, long d = 1) {
    Rat q(n, d);
    q.canonicalize();
    return q;
}

// "p/q" with the "/q" dropped for integers; the only number format emitted.
std::string rat_string(const Rat& q);

// Parses "p", "-p", "p/q"; rejects anything else.
Rat parse_rat(const std::string& s);

std::optional<Int> int_sqrt(const Int& n);       // exact square root if n is a perfect square
std::optional<Rat> rat_sqrt(const Rat& q);       // exact square root in Q if it exists

Int rat_floor(const Rat& q);
Int rat_ceil(const Rat& q);

// All (positive and negative) divisors of n; empty guard if n has too many.
std::vector<Int> divisors_signed(const Int& n, std::size_t cap);

// Rough size measure used by orbit/work guards: bits in numerator+denominator.
std::size_t rat_bits(const Rat& q);

} // namespace berkmc
