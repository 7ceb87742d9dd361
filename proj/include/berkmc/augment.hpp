#pragma once

#include "berkmc/partition.hpp"

namespace berkmc {

struct OrbitResult {
    std::vector<Pt> points; // x, f(x), f^2(x), ...
    bool preperiodic = false;
    int tail = 0;   // first index of the cycle
    int period = 0; // cycle length
    bool size_guarded = false;
};

// iterate image_of_point with exact equality testing; stops at the first
// repeat, the bound, or the representation-size guard
OrbitResult orbit_with_preperiodicity(const BerkMap& f, const Pt& x, int bound);

struct AttractingCycle {
    int period = 1;
    bool at_infinity = false;
    KElem center;        // ignored when at_infinity
    Rat center_precision;
    Disk certified;      // open disk; together with its boundary it is f-invariant
    Val multiplier_val;  // valuation of the multiplier, > 0
};

// attracting cycles of period 1 (fixed points, including infinity), each with
// the largest grid-radius invariant disk f(D) strictly inside D
std::vector<AttractingCycle> find_attracting_cycles(const BerkMap& f, int max_period,
                                                    const Rat& precision, ExtendPolicy policy,
                                                    int ram_grid);

struct VertexCertificate {
    enum class Kind { maps_into_gamma, wandering_f_disk, attracting_f_disk } kind;
    int vertex;
    int period = 0; // boundary/cycle period when applicable
};

struct AugmentationResult {
    std::vector<Pt> gamma_prime;
    bool stable = false;
    std::vector<VertexCertificate> certificates; // when stable
    StabilityReport final_report;
    // diagnostics when inconclusive
    std::string blocked_bound;
    std::string blocked_vertex;
    int added = 0;
};

struct StabilizeBounds {
    int orbit_bound = 64;
    int max_period = 4;
    int max_new_vertices = 64;
    int ram_grid = 1; // adjoined radius exponents live on (1/ram_grid) Z
    ExtendPolicy policy = ExtendPolicy::deny;
};

// Grow Gamma until (f, Gamma') is analytically stable: adjoin closed forward
// orbits, boundaries of certified attracting disks the orbit enters, or single
// forward images, until stable or a bound trips.  Never reports a wrong
// "stable": the final report is an independent re-check.
AugmentationResult stabilize(const BerkMap& f, const VertexSet& G, const StabilizeBounds& bounds);

} // namespace berkmc
