#pragma once

#include "berkmc/partition.hpp"

namespace berkmc {

// Transition matrix P_{U,V} = m_{U,V}/d over the enumerated state space.
// Entries live on complete rows only; the rest of a truncated row's mass is
// tracked as an explicit sink.
class TransitionMatrix {
public:
    explicit TransitionMatrix(StateSpace space);

    const StateSpace& space() const { return space_; }
    int size() const { return space_.size(); }
    int degree() const { return space_.map().degree(); }
    bool row_complete(int u) const { return space_.state(u).row_complete; }
    // exact rational entries of a complete row
    const std::map<int, Rat>& row(int u) const;

    Rat entry(int u, int v) const;

private:
    StateSpace space_;
    std::vector<std::map<int, Rat>> prows_;
};

// build_matrix: stability and the Julia-not-in-Gamma check, then enumeration
TransitionMatrix build_matrix(const BerkMap& f, const VertexSet& G, int depth, int orbit_bound);

// sparse row vector with explicit unaccounted mass
struct MassVector {
    std::map<int, Rat> entries;
    Rat sink = 0; // mass routed through incomplete rows / out of the空间
    Rat total() const;
};

// one multiplication step nu -> nu P; incomplete-row mass moves to the sink
MassVector step(const TransitionMatrix& P, const MassVector& nu);

// exact matrix power restricted to rows whose n-step support stays complete;
// uncertain entries carry the row's sink mass as an additive bound
struct PowerRow {
    std::map<int, Rat> entries;
    Rat uncertainty = 0;
};
std::vector<PowerRow> power(const TransitionMatrix& P, int n);

struct StationaryResult {
    enum class Kind { converged, periodic, refused } kind = Kind::converged;
    // converged
    std::map<int, Rat> nu;   // exact entries on complete states
    Rat tail_mass = 0;
    int steps = 0;
    bool exact = false;      // exact stationarity was reached
    // periodic
    int period = 1;
    std::vector<std::map<int, Rat>> cycle;              // one period of reference-row iterates
    std::vector<std::map<int, Rat>> stationary_vectors; // one per recurrent class
    // refused
    std::string reason;
};

StationaryResult stationary(const TransitionMatrix& P, int max_steps, int period_max,
                            const Rat& tail_tol);

// m_{U,V}: the constant preimage count, recomputed directly from the
// preimage-count formula at a representative of U (no row machinery)
long multiplicity(const StateSpace& S, int u, int v);

// oracle: d^{-n} times the multiplicity-weighted count of n-th preimages of a
// representative of U inside V, computed by splitting f^n = f^{n-1} o f and
// re-deriving every one-step count from the preimage-count formula alone.
// Nullopt when the truncated space cannot support the recursion exactly.
std::optional<Rat> brute_force_pullback(const StateSpace& S, int u, int v, int n, int bound = 4);

} // namespace berkmc
