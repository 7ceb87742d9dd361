#pragma once

#include <stdexcept>
#include <string>

namespace berkmc {

// Typed failure modes surfaced through the CLI as distinct exit codes.

struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A residue-field computation needed a root outside F and automatic
// extension was disabled (or unsupported for this field).
struct extension_required : std::runtime_error {
    explicit extension_required(const std::string& msg) : std::runtime_error(msg) {}
};

// Chain construction refused: a totally invariant vertex sits in Gamma and
// the chain would degenerate to a point mass.
struct refused_totally_invariant : std::runtime_error {
    explicit refused_totally_invariant(const std::string& msg) : std::runtime_error(msg) {}
};

// A bounded search ended without a certificate (orbit bound, depth, step
// budget, vertex budget).  Carries which bound tripped and on what.
struct inconclusive_error : std::runtime_error {
    std::string bound_name;
    std::string subject;
    inconclusive_error(const std::string& bound, const std::string& subj, const std::string& msg)
        : std::runtime_error(msg), bound_name(bound), subject(subj) {}
};

// Power iteration ended without convergence or period detection.
struct no_verdict : std::runtime_error {
    explicit no_verdict(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact factorization beyond the supported degree range.
struct unresolved_factorization : std::runtime_error {
    explicit unresolved_factorization(const std::string& msg) : std::runtime_error(msg) {}
};

struct internal_error : std::logic_error {
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace berkmc
