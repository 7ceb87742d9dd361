#pragma once

#include "berkmc/series.hpp"

namespace berkmc {

// Shared expression grammar: integers, rationals p/q, the symbols t and z
// (plus the field generator when one is declared), operators + - * / ^ with
// integer exponents (negative exponents on t only), and parentheses.
// Whitespace-insensitive.  Division by a z-dependent expression is rejected.

// polynomial in z over K
KPoly parse_poly(const std::string& text, const FieldPtr& F);

// ground element (z-free expression)
KElem parse_ground(const std::string& text, const FieldPtr& F);

} // namespace berkmc
