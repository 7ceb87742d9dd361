#pragma once

#include "berkmc/augment.hpp"
#include "berkmc/markov.hpp"

#include <string>

namespace berkmc {

struct Bounds {
    int depth = 8;
    int orbit_bound = 64;
    int max_period = 4;
    int max_new_vertices = 64;
    int power_steps = 64;
    int period_max = 6;
    Rat tail_tol = Rat(1, 128);
};

struct ProblemSpec {
    FieldPtr field;
    int ramification = 1;
    std::string minpoly_text;   // empty over Q
    std::string generator = "a";
    std::string num_text, den_text;
    std::vector<std::string> center_texts, radius_texts;
    Bounds bounds;

    BerkMap make_map() const;
    VertexSet make_vertices() const;
};

ProblemSpec parse_spec(const std::string& json_text);
std::string serialize_spec(const ProblemSpec& spec);

struct RunOptions {
    std::string format = "json"; // json | tsv | dot
    ExtendPolicy policy = ExtendPolicy::deny;
};

struct RunOutput {
    int exit_code = 0;
    std::string out;
    std::string err;
};

// commands: check-stability | enumerate | chain | stationary | augment |
//           classify-limit | report
RunOutput run_command(const std::string& command, const ProblemSpec& spec, const RunOptions& opt);

int cli_main(int argc, char** argv);

} // namespace berkmc
