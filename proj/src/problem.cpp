#include "berkmc/problem.hpp"

#include "berkmc/errors.hpp"
#include "berkmc/expr.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace berkmc {

using nlohmann::json;

namespace {

FieldPtr field_from(const std::string& minpoly_text, const std::string& gen) {
    if (minpoly_text.empty()) return std::make_shared<NumberField>();
    // the minimal polynomial is written in x over Q
    auto Q = std::make_shared<NumberField>();
    KPoly raw;
    {
        std::string fixed = minpoly_text;
        for (auto& c : fixed)
            if (c == 'x') c = 'z';
        raw = parse_poly(fixed, Q);
    }
    std::vector<Rat> mp(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i].is_zero()) {
            mp[i] = 0;
            continue;
        }
        Val v = raw[i].val();
        if (!(v == Val::of(Rat(0))) && !raw[i].is_zero())
            throw parse_error("minimal polynomial must have rational coefficients");
        auto q = Q->as_rat(raw[i].leading_coeff());
        mp[i] = *q;
    }
    if (mp.empty() || mp.back() == 0) throw parse_error("bad minimal polynomial");
    // normalize monic
    Rat lead = mp.back();
    for (auto& c : mp) c /= lead;
    auto F = std::make_shared<NumberField>(mp, gen);
    if (F->degree() <= 4) {
        // verify irreducibility where the factorizer is complete
        FPoly p(mp.size());
        auto Q2 = std::make_shared<NumberField>();
        for (std::size_t i = 0; i < mp.size(); ++i) p[i] = Q2->from_rat(mp[i]);
        if (!Q2->is_irreducible(p)) throw parse_error("minimal polynomial is reducible");
    }
    return F;
}

} // namespace

BerkMap ProblemSpec::make_map() const {
    KPoly num = parse_poly(num_text, field);
    KPoly den = parse_poly(den_text, field);
    BerkMap f(num, den);
    if (f.degree() < 2) throw parse_error("map degree must be at least 2");
    return f;
}

VertexSet ProblemSpec::make_vertices() const {
    std::vector<Pt> verts;
    for (std::size_t i = 0; i < center_texts.size(); ++i) {
        KElem c = parse_ground(center_texts[i], field);
        Rat q = parse_rat(radius_texts[i]);
        verts.push_back(Pt::make(c, q));
    }
    return VertexSet(field, verts);
}

ProblemSpec parse_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("bad JSON: ") + e.what());
    }
    ProblemSpec spec;
    if (j.contains("field")) {
        const auto& f = j.at("field");
        if (f.contains("ramification")) spec.ramification = f.at("ramification").get<int>();
        if (spec.ramification < 1) throw parse_error("ramification must be >= 1");
        if (f.contains("minpoly")) spec.minpoly_text = f.at("minpoly").get<std::string>();
        if (f.contains("generator")) spec.generator = f.at("generator").get<std::string>();
    }
    spec.field = field_from(spec.minpoly_text, spec.generator);
    if (!j.contains("map")) throw parse_error("missing \"map\"");
    spec.num_text = j.at("map").at("numerator").get<std::string>();
    spec.den_text = j.at("map").at("denominator").get<std::string>();
    if (!j.contains("vertices") || !j.at("vertices").is_array() || j.at("vertices").empty())
        throw parse_error("missing or empty \"vertices\"");
    for (const auto& v : j.at("vertices")) {
        spec.center_texts.push_back(v.at("center").get<std::string>());
        spec.radius_texts.push_back(v.at("radius_exponent").get<std::string>());
    }
    if (j.contains("bounds")) {
        const auto& b = j.at("bounds");
        if (b.contains("depth")) spec.bounds.depth = b.at("depth").get<int>();
        if (b.contains("orbit_bound")) spec.bounds.orbit_bound = b.at("orbit_bound").get<int>();
        if (b.contains("max_period")) spec.bounds.max_period = b.at("max_period").get<int>();
        if (b.contains("max_new_vertices"))
            spec.bounds.max_new_vertices = b.at("max_new_vertices").get<int>();
        if (b.contains("power_steps")) spec.bounds.power_steps = b.at("power_steps").get<int>();
        if (b.contains("period_max")) spec.bounds.period_max = b.at("period_max").get<int>();
        if (b.contains("tail_tol")) spec.bounds.tail_tol = parse_rat(b.at("tail_tol").get<std::string>());
    }
    // validate early: map and vertex set must construct
    spec.make_map();
    spec.make_vertices();
    return spec;
}

std::string serialize_spec(const ProblemSpec& spec) {
    json j;
    j["field"]["ramification"] = spec.ramification;
    if (!spec.minpoly_text.empty()) {
        j["field"]["minpoly"] = spec.minpoly_text;
        j["field"]["generator"] = spec.generator;
    }
    j["map"]["numerator"] = spec.num_text;
    j["map"]["denominator"] = spec.den_text;
    j["vertices"] = json::array();
    for (std::size_t i = 0; i < spec.center_texts.size(); ++i)
        j["vertices"].push_back({{"center", spec.center_texts[i]},
                                 {"radius_exponent", spec.radius_texts[i]}});
    j["bounds"] = {{"depth", spec.bounds.depth},
                   {"orbit_bound", spec.bounds.orbit_bound},
                   {"max_period", spec.bounds.max_period},
                   {"max_new_vertices", spec.bounds.max_new_vertices},
                   {"power_steps", spec.bounds.power_steps},
                   {"period_max", spec.bounds.period_max},
                   {"tail_tol", rat_string(spec.bounds.tail_tol)}};
    return j.dump(2);
}

// ---- serializers ----

namespace {

json stability_json(const VertexSet& G, const StabilityReport& rep) {
    json out;
    switch (rep.verdict) {
        case StabilityReport::Verdict::stable: out["verdict"] = "stable"; break;
        case StabilityReport::Verdict::unstable: out["verdict"] = "unstable"; break;
        case StabilityReport::Verdict::inconclusive: out["verdict"] = "inconclusive"; break;
    }
    out["vertices"] = json::array();
    for (const auto& v : rep.verdicts) {
        json jv;
        jv["vertex"] = pt_string(G.vertices()[v.vertex]);
        switch (v.kind) {
            case VertexVerdict::Kind::in_gamma: jv["verdict"] = "maps-into-gamma"; break;
            case VertexVerdict::Kind::lands_in_F: jv["verdict"] = "lands-in-F-domain"; break;
            case VertexVerdict::Kind::lands_in_J: jv["verdict"] = "lands-in-J-domain"; break;
            case VertexVerdict::Kind::inconclusive: jv["verdict"] = "inconclusive"; break;
        }
        if (v.kind != VertexVerdict::Kind::in_gamma) {
            jv["landing"] = G.key_of(v.landing);
            if (v.kind == VertexVerdict::Kind::lands_in_J) jv["first_hit"] = v.detail.first_hit;
            if (v.kind == VertexVerdict::Kind::inconclusive) jv["diagnostics"] = v.detail.diagnostics;
            if (v.kind == VertexVerdict::Kind::lands_in_F) {
                switch (v.detail.fcert) {
                    case Classification::FCert::periodic_disks: jv["certificate"] = "periodic-disks"; break;
                    case Classification::FCert::nested_disks: jv["certificate"] = "nested-disks"; break;
                    case Classification::FCert::absorbed: jv["certificate"] = "absorbed"; break;
                    case Classification::FCert::wandering_translate:
                        jv["certificate"] = "wandering-translate";
                        break;
                    case Classification::FCert::routed: jv["certificate"] = "routed"; break;
                    default: break;
                }
                jv["certificate_period"] = v.detail.cert_period;
            }
        }
        out["vertices"].push_back(jv);
    }
    return out;
}

json states_json(const StateSpace& S) {
    json out;
    out["depth"] = S.depth();
    out["states"] = json::array();
    for (int i = 0; i < S.size(); ++i) {
        const State& st = S.state(i);
        json js;
        js["key"] = st.key;
        js["level"] = st.level;
        js["conjugacy_size"] = st.conjugacy_size;
        js["row_complete"] = st.row_complete;
        out["states"].push_back(js);
    }
    return out;
}

json matrix_json(const TransitionMatrix& P) {
    json out = states_json(P.space());
    out["degree"] = P.degree();
    out["entries"] = json::array();
    for (int u = 0; u < P.size(); ++u) {
        if (!P.row_complete(u)) continue;
        for (const auto& [v, p] : P.row(u)) {
            if (p == 0) continue;
            out["entries"].push_back({{"from", P.space().state(u).key},
                                      {"to", P.space().state(v).key},
                                      {"p", rat_string(p)}});
        }
    }
    return out;
}

std::string matrix_tsv(const TransitionMatrix& P) {
    std::ostringstream os;
    os << "state";
    for (int v = 0; v < P.size(); ++v) os << "\t" << P.space().state(v).key;
    os << "\n";
    for (int u = 0; u < P.size(); ++u) {
        os << P.space().state(u).key;
        if (!P.row_complete(u)) {
            for (int v = 0; v < P.size(); ++v) os << "\t?";
        } else {
            for (int v = 0; v < P.size(); ++v) os << "\t" << rat_string(P.entry(u, v));
        }
        os << "\n";
    }
    return os.str();
}

json mass_json(const StateSpace& S, const std::map<int, Rat>& nu) {
    json out = json::array();
    for (const auto& [k, v] : nu) {
        if (v == 0) continue;
        json e;
        e["state"] = S.state(k).key;
        e["mass"] = rat_string(v);
        int cs = S.state(k).conjugacy_size;
        if (cs > 1) {
            Rat per = v / cs;
            per.canonicalize();
            e["conjugacy_size"] = cs;
            e["per_copy_mass"] = rat_string(per);
        }
        out.push_back(e);
    }
    return out;
}

json stationary_json(const TransitionMatrix& P, const StationaryResult& r) {
    json out;
    const StateSpace& S = P.space();
    switch (r.kind) {
        case StationaryResult::Kind::converged: {
            out["kind"] = "converged";
            out["nu"] = mass_json(S, r.nu);
            out["tail_mass"] = rat_string(r.tail_mass);
            out["steps"] = r.steps;
            out["exact"] = r.exact;
            break;
        }
        case StationaryResult::Kind::periodic: {
            out["kind"] = "periodic";
            out["period"] = r.period;
            out["cycle"] = json::array();
            for (const auto& c : r.cycle) out["cycle"].push_back(mass_json(S, c));
            out["stationary_vectors"] = json::array();
            for (const auto& nu : r.stationary_vectors)
                out["stationary_vectors"].push_back(mass_json(S, nu));
            break;
        }
        case StationaryResult::Kind::refused: {
            out["kind"] = "refused";
            out["reason"] = r.reason;
            out["stationary_vectors"] = json::array();
            for (const auto& nu : r.stationary_vectors)
                out["stationary_vectors"].push_back(mass_json(S, nu));
            break;
        }
    }
    return out;
}

json augment_json(const FieldPtr& F, const AugmentationResult& r, const VertexSet& G0) {
    json out;
    out["verdict"] = r.stable ? "stable" : "inconclusive";
    out["added"] = r.added;
    out["gamma_prime"] = json::array();
    for (const auto& p : r.gamma_prime.empty() && !r.stable ? G0.vertices() : r.gamma_prime) {
        out["gamma_prime"].push_back(
            {{"center", p.center.to_string()}, {"radius_exponent", rat_string(p.radius_exp)}});
    }
    if (r.stable) {
        out["certificates"] = json::array();
        for (const auto& c : r.certificates) {
            json jc;
            jc["vertex"] = pt_string(r.gamma_prime[c.vertex]);
            switch (c.kind) {
                case VertexCertificate::Kind::maps_into_gamma: jc["kind"] = "maps-into-gamma"; break;
                case VertexCertificate::Kind::wandering_f_disk: jc["kind"] = "wandering-F-disk"; break;
                case VertexCertificate::Kind::attracting_f_disk: jc["kind"] = "attracting-F-disk"; break;
            }
            if (c.period > 0) jc["period"] = c.period;
            out["certificates"].push_back(jc);
        }
    } else {
        out["diagnostics"] = {{"bound", r.blocked_bound}, {"vertex", r.blocked_vertex}};
    }
    (void)F;
    return out;
}

json boundary_json(const NumberField& F, const BoundaryClass& b) {
    json out;
    std::string H = F.p_to_string(b.H_affine, "X");
    if (b.H_inf_mult > 0)
        H = (H == "1" ? std::string() : H + "*") + "Y^" + std::to_string(b.H_inf_mult);
    out["H"] = H.empty() ? "Y^0" : H;
    out["phi_numerator"] = F.p_to_string(b.phi_num, "z");
    out["phi_denominator"] = F.p_to_string(b.phi_den, "z");
    out["phi_constant"] = b.phi_constant;
    if (b.phi_constant) out["phi_value"] = witness_string(F, b.phi_value);
    out["in_indeterminacy"] = b.in_indeterminacy;
    return out;
}

std::string dot_tree(const VertexSet& G, const StateSpace* S, const std::map<int, Rat>* nu) {
    std::ostringstream os;
    os << "graph state_space {\n  node [shape=ellipse];\n";
    auto id_of = [](const std::string& key) {
        std::string id = "n";
        for (char c : key)
            id += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
        return id;
    };
    for (const auto& v : G.vertices()) {
        os << "  " << id_of(pt_string(v)) << " [label=\"" << pt_string(v)
           << "\", shape=box];\n";
    }
    for (const auto& [child, parent] : G.hull_edges()) {
        if (G.find_vertex(child) < 0)
            os << "  " << id_of(pt_string(child)) << " [label=\"" << pt_string(child)
               << "\", shape=point];\n";
    }
    for (const auto& [child, parent] : G.hull_edges())
        os << "  " << id_of(pt_string(child)) << " -- " << id_of(pt_string(parent)) << ";\n";
    if (S) {
        for (int i = 0; i < S->size(); ++i) {
            const State& st = S->state(i);
            if (st.ref.kind == DomainRef::Kind::vertex) continue;
            std::string label = st.key;
            if (nu) {
                auto it = nu->find(i);
                label += "\\nmass=" + (it == nu->end() ? std::string("0") : rat_string(it->second));
            }
            os << "  " << id_of(st.key) << " [label=\"" << label << "\"];\n";
            for (const auto& D : S->gamma().boundary_disks(st.ref))
                os << "  " << id_of(st.key) << " -- " << id_of(pt_string(D.boundary))
                   << " [style=dashed];\n";
        }
    }
    os << "}\n";
    return os.str();
}

StabilityReport require_stable(const BerkMap& f, const VertexSet& G, const Bounds& b) {
    StabilityReport rep = check_stability(f, G, b.orbit_bound);
    if (rep.verdict == StabilityReport::Verdict::unstable)
        throw inconclusive_error("analytic-stability", "vertex set",
                                 "pair is not analytically stable; run augment first");
    if (rep.verdict == StabilityReport::Verdict::inconclusive)
        throw inconclusive_error("orbit-bound", "stability check",
                                 "stability not certified within the orbit bound");
    return rep;
}

} // namespace

RunOutput run_command(const std::string& command, const ProblemSpec& spec, const RunOptions& opt) {
    RunOutput out;
    auto t0 = std::chrono::steady_clock::now();
    BerkMap f = spec.make_map();
    VertexSet G = spec.make_vertices();
    const Bounds& b = spec.bounds;
    json j;

    auto finish = [&](json& payload) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        payload["timing_ms"] = static_cast<long>(ms);
        payload["field"] = {{"degree", spec.field->degree()},
                            {"ramification", spec.ramification},
                            {"extension_policy",
                             opt.policy == ExtendPolicy::deny ? "deny" : "auto"}};
        out.out = payload.dump(2) + "\n";
    };

    if (command == "check-stability") {
        StabilityReport rep = check_stability(f, G, b.orbit_bound);
        j = stability_json(G, rep);
        if (rep.verdict == StabilityReport::Verdict::inconclusive) out.exit_code = 3;
        finish(j);
        return out;
    }
    if (command == "enumerate") {
        require_stable(f, G, b);
        StateSpace S = enumerate_states(f, G, b.depth);
        if (opt.format == "dot") {
            out.out = dot_tree(G, &S, nullptr);
            return out;
        }
        j = states_json(S);
        finish(j);
        return out;
    }
    if (command == "chain") {
        TransitionMatrix P = build_matrix(f, G, b.depth, b.orbit_bound);
        if (opt.format == "tsv") {
            out.out = matrix_tsv(P);
            return out;
        }
        j = matrix_json(P);
        finish(j);
        return out;
    }
    if (command == "stationary") {
        TransitionMatrix P = build_matrix(f, G, b.depth, b.orbit_bound);
        StationaryResult r = stationary(P, b.power_steps, b.period_max, b.tail_tol);
        j = stationary_json(P, r);
        if (r.kind == StationaryResult::Kind::refused) out.exit_code = 3;
        finish(j);
        return out;
    }
    if (command == "augment") {
        StabilizeBounds sb{b.orbit_bound, b.max_period, b.max_new_vertices, spec.ramification,
                           opt.policy};
        AugmentationResult r = stabilize(f, G, sb);
        j = augment_json(spec.field, r, G);
        if (!r.stable) out.exit_code = 3;
        finish(j);
        return out;
    }
    if (command == "classify-limit") {
        BoundaryClass bc = classify_boundary(f);
        j = boundary_json(*spec.field, bc);
        VertexSet Gg(spec.field, {Pt::gauss(spec.field)});
        StabilityReport rep = check_stability(f, Gg, b.orbit_bound);
        j["gauss_stability"] = rep.verdict == StabilityReport::Verdict::stable     ? "stable"
                               : rep.verdict == StabilityReport::Verdict::unstable ? "unstable"
                                                                                   : "inconclusive";
        if (rep.verdict != StabilityReport::Verdict::inconclusive) {
            bool agree = bc.in_indeterminacy == (rep.verdict == StabilityReport::Verdict::unstable);
            j["agrees_with_stability"] = agree;
            if (!agree) throw internal_error("I(d) classification disagrees with stability");
        }
        finish(j);
        return out;
    }
    if (command == "report") {
        StabilizeBounds sb{b.orbit_bound, b.max_period, b.max_new_vertices, spec.ramification,
                           opt.policy};
        AugmentationResult ar = stabilize(f, G, sb);
        j["augmentation"] = augment_json(spec.field, ar, G);
        if (!ar.stable) {
            out.exit_code = 3;
            finish(j);
            return out;
        }
        VertexSet Gp(spec.field, ar.gamma_prime);
        TransitionMatrix P = build_matrix(f, Gp, b.depth, b.orbit_bound);
        j["states"] = states_json(P.space());
        j["matrix"] = matrix_json(P);
        StationaryResult r = stationary(P, b.power_steps, b.period_max, b.tail_tol);
        j["stationary"] = stationary_json(P, r);
        BoundaryClass bc = classify_boundary(f);
        j["classify_limit"] = boundary_json(*spec.field, bc);
        if (opt.format == "dot") {
            const std::map<int, Rat>* nu =
                r.kind == StationaryResult::Kind::converged ? &r.nu : nullptr;
            out.out = dot_tree(Gp, &P.space(), nu);
            return out;
        }
        finish(j);
        return out;
    }
    throw parse_error("unknown command: " + command);
}

namespace {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const parse_error*>(&e)) return 2;
    if (dynamic_cast<const inconclusive_error*>(&e)) return 3;
    if (dynamic_cast<const no_verdict*>(&e)) return 3;
    if (dynamic_cast<const refused_totally_invariant*>(&e)) return 4;
    if (dynamic_cast<const extension_required*>(&e)) return 5;
    if (dynamic_cast<const unresolved_factorization*>(&e)) return 5;
    return 1;
}

} // namespace

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string command, spec_path = "-", format = "json", extend = "deny";
    std::map<std::string, std::string> flag_values;
    static const std::vector<std::string> commands = {
        "check-stability", "enumerate", "chain", "stationary", "augment", "classify-limit", "report"};
    auto usage = []() {
        std::cerr << "usage: berkmc <command> [spec.json|-] [options]\n"
                  << "commands: check-stability enumerate chain stationary augment classify-limit report\n"
                  << "options: --depth N --orbit-bound N --max-period N --max-new-vertices N\n"
                  << "         --power-steps N --period-max N --tail-tol p/q\n"
                  << "         --format json|tsv|dot --extend-field auto|deny\n";
    };
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (a == "--help" || a == "-h") {
                usage();
                return 0;
            }
            if (a.rfind("--", 0) == 0) {
                if (i + 1 >= args.size()) throw parse_error("missing value for " + a);
                flag_values[a.substr(2)] = args[++i];
            } else if (command.empty()) {
                command = a;
            } else {
                spec_path = a;
            }
        }
        if (command.empty()) {
            usage();
            return 2;
        }
        if (std::find(commands.begin(), commands.end(), command) == commands.end())
            throw parse_error("unknown command: " + command);
        std::string text;
        if (spec_path == "-") {
            std::ostringstream ss;
            ss << std::cin.rdbuf();
            text = ss.str();
        } else {
            std::ifstream in(spec_path);
            if (!in) throw parse_error("cannot open spec file: " + spec_path);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        ProblemSpec spec = parse_spec(text);
        auto geti = [&](const std::string& k, int& slot) {
            auto it = flag_values.find(k);
            if (it != flag_values.end()) slot = std::stoi(it->second);
        };
        geti("depth", spec.bounds.depth);
        geti("orbit-bound", spec.bounds.orbit_bound);
        geti("max-period", spec.bounds.max_period);
        geti("max-new-vertices", spec.bounds.max_new_vertices);
        geti("power-steps", spec.bounds.power_steps);
        geti("period-max", spec.bounds.period_max);
        if (flag_values.count("tail-tol")) spec.bounds.tail_tol = parse_rat(flag_values["tail-tol"]);
        if (flag_values.count("format")) format = flag_values["format"];
        if (flag_values.count("extend-field")) extend = flag_values["extend-field"];
        if (format != "json" && format != "tsv" && format != "dot")
            throw parse_error("bad format: " + format);
        if (extend != "auto" && extend != "deny") throw parse_error("bad extend-field: " + extend);
        RunOptions opt;
        opt.format = format;
        opt.policy = extend == "auto" ? ExtendPolicy::auto_single : ExtendPolicy::deny;
        RunOutput out = run_command(command, spec, opt);
        std::cout << out.out;
        if (!out.err.empty()) std::cerr << out.err;
        return out.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

} // namespace berkmc
