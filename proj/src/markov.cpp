#include "berkmc/markov.hpp"

#include "berkmc/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace berkmc {

TransitionMatrix::TransitionMatrix(StateSpace space) : space_(std::move(space)) {
    int d = space_.map().degree();
    prows_.resize(space_.size());
    for (int u = 0; u < space_.size(); ++u) {
        if (!space_.state(u).row_complete) continue;
        for (const auto& [v, m] : space_.row(u)) {
            Rat e(m, d);
            e.canonicalize();
            prows_[u][v] = e;
        }
    }
}

const std::map<int, Rat>& TransitionMatrix::row(int u) const {
    if (!row_complete(u)) throw internal_error("row of an incomplete state requested");
    return prows_[u];
}

Rat TransitionMatrix::entry(int u, int v) const {
    const auto& r = row(u);
    auto it = r.find(v);
    return it == r.end() ? Rat(0) : it->second;
}

TransitionMatrix build_matrix(const BerkMap& f, const VertexSet& G, int depth, int orbit_bound) {
    StabilityReport rep = check_stability(f, G, orbit_bound);
    if (rep.verdict == StabilityReport::Verdict::unstable)
        throw inconclusive_error("analytic-stability", "vertex set",
                                 "pair is not analytically stable; augment the vertex set first");
    if (rep.verdict == StabilityReport::Verdict::inconclusive)
        throw inconclusive_error("orbit-bound", "stability check",
                                 "stability could not be certified within the orbit bound");
    StateSpace S = enumerate_states(f, G, depth);
    if (auto tv = totally_invariant_vertex(f, G); tv && !S.has_j_domain())
        throw refused_totally_invariant("totally-invariant-vertex: " + pt_string(G.vertices()[*tv]) +
                                        " carries the entire measure");
    return TransitionMatrix(std::move(S));
}

Rat MassVector::total() const {
    Rat s = sink;
    for (const auto& [k, v] : entries) s += v;
    return s;
}

MassVector step(const TransitionMatrix& P, const MassVector& nu) {
    MassVector out;
    out.sink = nu.sink;
    for (const auto& [u, mass] : nu.entries) {
        if (mass == 0) continue;
        if (!P.row_complete(u)) {
            out.sink += mass;
            continue;
        }
        for (const auto& [v, p] : P.row(u)) out.entries[v] += mass * p;
    }
    for (auto& [v, m] : out.entries) m.canonicalize();
    out.sink.canonicalize();
    return out;
}

std::vector<PowerRow> power(const TransitionMatrix& P, int n) {
    if (n < 1) throw parse_error("matrix power requires n >= 1");
    std::vector<PowerRow> out(P.size());
    for (int u = 0; u < P.size(); ++u) {
        MassVector r;
        r.entries[u] = 1;
        for (int k = 0; k < n; ++k) r = step(P, r);
        out[u].entries = r.entries;
        out[u].uncertainty = r.sink;
    }
    return out;
}

// ---- stationary ----

namespace {

// recurrent classes of the complete-row support graph
std::vector<std::vector<int>> recurrent_classes(const TransitionMatrix& P) {
    int n = P.size();
    // reachability closure
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int u = 0; u < n; ++u) {
        if (!P.row_complete(u)) continue;
        for (const auto& [v, p] : P.row(u))
            if (p != 0) reach[u][v] = true;
    }
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            if (reach[i][k])
                for (int j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> classes;
    for (int u = 0; u < n; ++u) {
        if (comp[u] >= 0 || !P.row_complete(u)) continue;
        std::vector<int> scc;
        for (int v = 0; v < n; ++v)
            if ((u == v) || (reach[u][v] && reach[v][u])) {
                if (v == u || comp[v] < 0) scc.push_back(v);
            }
        // a recurrent class: closed under transitions, all rows complete
        bool closed = true;
        for (int v : scc) {
            if (!P.row_complete(v)) {
                closed = false;
                break;
            }
            for (const auto& [w, p] : P.row(v)) {
                if (p == 0) continue;
                if (std::find(scc.begin(), scc.end(), w) == scc.end()) {
                    closed = false;
                    break;
                }
            }
            if (!closed) break;
        }
        if (closed) {
            for (int v : scc) comp[v] = static_cast<int>(classes.size());
            classes.push_back(scc);
        } else {
            comp[u] = n; // transient marker
        }
    }
    return classes;
}

// unique stationary vector of an irreducible class, solved exactly
std::map<int, Rat> class_stationary(const TransitionMatrix& P, const std::vector<int>& cls) {
    int k = static_cast<int>(cls.size());
    // solve nu (Q - I) = 0 with sum(nu) = 1: columns are equations
    std::vector<std::vector<Rat>> A(k, std::vector<Rat>(k + 1, Rat(0)));
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
            Rat q = P.entry(cls[i], cls[j]);
            A[j][i] = q;
            if (i == j) A[j][i] -= 1;
        }
    }
    // replace the last equation by sum = 1
    for (int i = 0; i < k; ++i) A[k - 1][i] = 1;
    A[k - 1][k] = 1;
    // Gauss-Jordan elimination, tracking pivot columns
    std::vector<int> pivot_col(k, -1);
    for (int col = 0, row = 0; col < k && row < k; ++col) {
        int piv = -1;
        for (int r = row; r < k; ++r)
            if (A[r][col] != 0) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(A[piv], A[row]);
        Rat inv = Rat(1) / A[row][col];
        for (int c = col; c <= k; ++c) A[row][c] *= inv;
        for (int r = 0; r < k; ++r) {
            if (r == row || A[r][col] == 0) continue;
            Rat fac = A[r][col];
            for (int c = col; c <= k; ++c) A[r][c] -= fac * A[row][c];
        }
        pivot_col[row] = col;
        ++row;
    }
    std::map<int, Rat> nu;
    for (int i = 0; i < k; ++i) {
        if (pivot_col[i] < 0) continue;
        Rat v = A[i][k];
        v.canonicalize();
        if (v != 0) nu[cls[pivot_col[i]]] = v;
    }
    return nu;
}

bool maps_equal(const std::map<int, Rat>& a, const std::map<int, Rat>& b) {
    auto nonzero = [](const std::map<int, Rat>& m) {
        std::map<int, Rat> r;
        for (auto& [k, v] : m)
            if (v != 0) r[k] = v;
        return r;
    };
    return nonzero(a) == nonzero(b);
}

} // namespace

StationaryResult stationary(const TransitionMatrix& P, int max_steps, int period_max,
                            const Rat& tail_tol) {
    const StateSpace& S = P.space();
    int nverts = S.gamma().size();
    bool tot_inv = totally_invariant_vertex(S.map(), S.gamma()).has_value();

    struct RowIter {
        std::vector<MassVector> history; // history[k] = r_k
        bool frozen = false;
        int exact_period = 0; // >0 when exact cycle found
        int frozen_at = 0;
        MassVector limit;
        Rat tail = 0;
    };
    std::vector<RowIter> rows(nverts);
    for (int v = 0; v < nverts; ++v) {
        MassVector r0;
        r0.entries[v] = 1;
        rows[v].history.push_back(r0);
    }
    auto trusted_entries = [&](const MassVector& r) {
        std::map<int, Rat> out;
        for (const auto& [k, val] : r.entries) {
            if (val == 0) continue;
            if (!S.state(k).row_complete) continue;
            if (!tot_inv && S.state(k).ref.kind == DomainRef::Kind::vertex) continue;
            out[k] = val;
        }
        return out;
    };
    auto tail_of = [&](const MassVector& r) {
        Rat tail = r.sink;
        for (const auto& [k, val] : r.entries) {
            if (!S.state(k).row_complete ||
                (!tot_inv && S.state(k).ref.kind == DomainRef::Kind::vertex))
                tail += val;
        }
        tail.canonicalize();
        return tail;
    };

    for (int n = 1; n <= max_steps; ++n) {
        bool all_frozen = true;
        for (auto& ri : rows) {
            if (ri.frozen) continue;
            MassVector next = step(P, ri.history.back());
            ri.history.push_back(next);
            // exact cycle detection
            for (int p = 1; p <= period_max && p <= n; ++p) {
                const MassVector& prev = ri.history[n - p];
                if (maps_equal(next.entries, prev.entries) && next.sink == prev.sink) {
                    ri.frozen = true;
                    ri.exact_period = p;
                    ri.frozen_at = n;
                    ri.limit = next;
                    ri.tail = tail_of(next);
                    break;
                }
            }
            if (!ri.frozen && n >= 2) {
                // tail criterion: settled exactly on trusted entries, small tail
                if (maps_equal(trusted_entries(next), trusted_entries(ri.history[n - 1]))) {
                    Rat tail = tail_of(next);
                    if (!(tail > tail_tol)) {
                        ri.frozen = true;
                        ri.exact_period = 0;
                        ri.frozen_at = n;
                        ri.limit = next;
                        ri.tail = tail;
                    }
                }
            }
            if (!ri.frozen) all_frozen = false;
        }
        if (!all_frozen) continue;

        int period = 1;
        for (const auto& ri : rows)
            if (ri.exact_period > 1) period = std::lcm(period, ri.exact_period);
        if (period > 1) {
            StationaryResult out;
            out.kind = StationaryResult::Kind::periodic;
            out.period = period;
            out.steps = n;
            for (const auto& ri : rows) {
                if (ri.exact_period <= 1) continue;
                for (int k = ri.frozen_at - ri.exact_period + 1; k <= ri.frozen_at; ++k)
                    out.cycle.push_back(ri.history[k].entries);
                break;
            }
            for (const auto& cls : recurrent_classes(P))
                out.stationary_vectors.push_back(class_stationary(P, cls));
            return out;
        }
        // all rows settled with period one; verify they agree
        bool agree = true;
        for (int v = 1; v < nverts && agree; ++v)
            agree = maps_equal(trusted_entries(rows[0].limit), trusted_entries(rows[v].limit));
        if (!agree) {
            StationaryResult out;
            out.kind = StationaryResult::Kind::refused;
            out.reason = "multiple-stationary-vectors";
            out.steps = n;
            for (const auto& cls : recurrent_classes(P))
                out.stationary_vectors.push_back(class_stationary(P, cls));
            return out;
        }
        // pick the reference row with the smallest tail
        int best = 0;
        for (int v = 1; v < nverts; ++v)
            if (rows[v].tail < rows[best].tail) best = v;
        StationaryResult out;
        out.kind = StationaryResult::Kind::converged;
        out.steps = n;
        out.exact = true;
        for (const auto& ri : rows) out.exact = out.exact && ri.exact_period == 1;
        out.nu = trusted_entries(rows[best].limit);
        out.tail_mass = rows[best].tail;
        return out;
    }
    throw no_verdict("no convergence or exact period within the step budget");
}

// ---- brute-force pullback oracle ----

namespace {

long direct_count(const StateSpace& S, const Rep& y, int v) {
    const BerkMap& f = S.map();
    const State& sv = S.state(v);
    if (sv.ref.kind == DomainRef::Kind::vertex) {
        const Pt& x = S.gamma().vertices()[sv.ref.vertex];
        PointImage pi = image_with_tangent(f, x);
        if (y.kind == Rep::Kind::pt && pt_eq(pi.image, y.pt)) return pi.tf.local_degree;
        return 0;
    }
    return count_preimages_in_simple_domain(f, S.gamma().boundary_disks(sv.ref), y);
}

} // namespace

long multiplicity(const StateSpace& S, int u, int v) {
    return direct_count(S, S.representative(u), v);
}

std::optional<Rat> brute_force_pullback(const StateSpace& S, int u, int v, int n, int bound) {
    if (n < 1 || n > bound) return std::nullopt;
    int d = S.map().degree();
    // one-step counts from representatives, no chain machinery
    int ns = S.size();
    std::vector<std::vector<long>> one(ns, std::vector<long>(ns, -1));
    std::vector<bool> have(ns, false), full(ns, false);
    std::function<bool(int)> ensure = [&](int a) {
        if (have[a]) return full[a];
        have[a] = true;
        Rep y = S.representative(a);
        long sum = 0;
        for (int b = 0; b < ns; ++b) {
            one[a][b] = direct_count(S, y, b);
            sum += one[a][b];
        }
        full[a] = sum == d;
        return full[a];
    };
    // N_k(u, *) built by splitting f^k = f^{k-1} o f
    std::vector<long> cur(ns, 0);
    if (!ensure(u)) return std::nullopt;
    for (int b = 0; b < ns; ++b) cur[b] = one[u][b];
    for (int k = 2; k <= n; ++k) {
        std::vector<long> nxt(ns, 0);
        for (int w = 0; w < ns; ++w) {
            if (cur[w] == 0) continue;
            if (!ensure(w)) return std::nullopt;
            for (int b = 0; b < ns; ++b) nxt[b] += cur[w] * one[w][b];
        }
        cur = std::move(nxt);
    }
    Rat r(cur[v]);
    Rat dn(1);
    for (int k = 0; k < n; ++k) dn *= d;
    Rat res = r / dn;
    res.canonicalize();
    return res;
}

} // namespace berkmc
