#include "berkmc/expr.hpp"

#include "berkmc/errors.hpp"

#include <cctype>

namespace berkmc {

namespace {

// value with a z-free denominator
struct PVal {
    KPoly num;
    KElem den;
    bool is_t_atom = false;
};

struct Parser {
    const std::string& s;
    std::size_t pos = 0;
    FieldPtr F;

    explicit Parser(const std::string& text, FieldPtr field) : s(text), F(std::move(field)) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw parse_error("expression error at position " + std::to_string(pos) + ": " + msg);
    }

    PVal make_const(KElem c) { return {c.is_zero() ? KPoly{} : KPoly{std::move(c)}, KElem::one(F), false}; }

    PVal add(PVal a, PVal b, bool subtract) {
        KPoly lhs = kp_scale(a.num, b.den);
        KPoly rhs = kp_scale(b.num, a.den);
        return {subtract ? kp_sub(lhs, rhs) : kp_add(lhs, rhs), a.den * b.den, false};
    }
    PVal mul(PVal a, PVal b) { return {kp_mul(a.num, b.num), a.den * b.den, false}; }
    PVal div(PVal a, PVal b) {
        if (kp_deg(b.num) > 0) fail("division by a z-dependent expression");
        if (kp_is_zero(b.num)) fail("division by zero");
        return {kp_scale(a.num, b.den), a.den * b.num[0], false};
    }
    PVal neg(PVal a) { return {kp_neg(std::move(a.num)), a.den, false}; }

    PVal parse_expr() {
        PVal v = eat('-') ? neg(parse_term()) : parse_term();
        for (;;) {
            if (eat('+'))
                v = add(std::move(v), parse_term(), false);
            else if (eat('-'))
                v = add(std::move(v), parse_term(), true);
            else
                return v;
        }
    }

    PVal parse_term() {
        PVal v = parse_power();
        for (;;) {
            if (eat('*'))
                v = mul(std::move(v), parse_power());
            else if (eat('/'))
                v = div(std::move(v), parse_power());
            else
                return v;
        }
    }

    long parse_int() {
        skip();
        bool negv = false;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) {
            negv = s[pos] == '-';
            ++pos;
        }
        if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos]))) fail("expected an integer");
        long v = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            v = v * 10 + (s[pos] - '0');
            if (v > 1000000) fail("exponent too large");
            ++pos;
        }
        return negv ? -v : v;
    }

    PVal parse_power() {
        PVal base = eat('-') ? neg(parse_atom()) : parse_atom();
        if (!eat('^')) return base;
        long e = parse_int();
        if (e < 0) {
            if (!base.is_t_atom) fail("negative exponents are only allowed on t");
            return make_const(KElem::t_power(F, Rat(e)));
        }
        PVal r = make_const(KElem::one(F));
        for (long i = 0; i < e; ++i) r = mul(std::move(r), base);
        return r;
    }

    PVal parse_atom() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            PVal v = parse_expr();
            if (!eat(')')) fail("missing closing parenthesis");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Int n(0);
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                n = n * 10 + (s[pos] - '0');
                ++pos;
            }
            return make_const(KElem::from_rat(F, Rat(n)));
        }
        if (c == 't') {
            ++pos;
            PVal v = make_const(KElem::t_power(F, Rat(1)));
            v.is_t_atom = true;
            return v;
        }
        if (c == 'z') {
            ++pos;
            return {KPoly{KElem::zero(F), KElem::one(F)}, KElem::one(F), false};
        }
        if (!F->is_rational() && s.compare(pos, F->gen_name().size(), F->gen_name()) == 0) {
            pos += F->gen_name().size();
            return make_const(KElem::from_f(F, F->gen()));
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

KPoly parse_poly(const std::string& text, const FieldPtr& F) {
    Parser p(text, F);
    PVal v = p.parse_expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return kp_scale(v.num, KElem::one(F) / v.den);
}

KElem parse_ground(const std::string& text, const FieldPtr& F) {
    KPoly p = parse_poly(text, F);
    if (kp_deg(p) > 0) throw parse_error("expected a ground expression without z: " + text);
    return p.empty() ? KElem::zero(F) : p[0];
}

} // namespace berkmc
