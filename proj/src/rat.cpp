#include "berkmc/rat.hpp"

#include "berkmc/errors.hpp"

namespace berkmc {

std::string rat_string(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rat parse_rat(const std::string& s) {
    if (s.empty()) throw parse_error("empty rational literal");
    for (char ch : s)
        if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '/'))
            throw parse_error("bad rational literal: " + s);
    try {
        Rat q(s);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw parse_error("bad rational literal: " + s);
    }
}

std::optional<Int> int_sqrt(const Int& n) {
    if (n < 0) return std::nullopt;
    Int r, rem;
    mpz_sqrtrem(r.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t());
    if (rem != 0) return std::nullopt;
    return r;
}

std::optional<Rat> rat_sqrt(const Rat& q) {
    if (q < 0) return std::nullopt;
    auto n = int_sqrt(q.get_num());
    if (!n) return std::nullopt;
    auto d = int_sqrt(q.get_den());
    if (!d) return std::nullopt;
    Rat r(*n, *d);
    r.canonicalize();
    return r;
}

Int rat_floor(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

Int rat_ceil(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    return r;
}

std::vector<Int> divisors_signed(const Int& n, std::size_t cap) {
    std::vector<Int> out;
    Int a = abs(n);
    if (a == 0) return out;
    for (Int d = 1; d * d <= a; ++d) {
        if (a % d == 0) {
            out.push_back(d);
            Int c = a / d;
            if (c != d) out.push_back(c);
            if (out.size() > cap) return {};
        }
    }
    std::size_t m = out.size();
    out.reserve(2 * m);
    for (std::size_t i = 0; i < m; ++i) out.push_back(-out[i]);
    return out;
}

std::size_t rat_bits(const Rat& q) {
    return mpz_sizeinbase(q.get_num().get_mpz_t(), 2) + mpz_sizeinbase(q.get_den().get_mpz_t(), 2);
}

} // namespace berkmc
