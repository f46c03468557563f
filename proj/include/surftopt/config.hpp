// Flat key=value run configuration shared by all CLI commands.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "surftopt/fem.hpp"
#include "surftopt/levelset.hpp"
#include "surftopt/vec3.hpp"

namespace surftopt {

struct RunConfig {
    std::string command;  // set from the command line, not the file

    // Mesh source: exactly one of the two.
    int icosphere_level = -1;
    std::string mesh_off;

    ProblemCoefficients coeffs;

    // Design evaluated by `solve` and used as the unperturbed design of
    // `verify-td`: water (all material 2), land (all material 1), cap, or
    // labels from a file.
    std::string design = "water";
    double design_cap_angle_deg = 30.0;
    Vec3 design_cap_axis{0.0, 0.0, 1.0};
    std::string design_labels;

    // Desired-state source for optimize/verify-td: a target design whose
    // state is solved with the same coefficients (cap or labels), or a
    // precomputed field file.
    std::string target = "cap";
    double target_cap_angle_deg = 60.0;
    Vec3 target_cap_axis{0.0, 0.0, 1.0};
    std::string target_labels;
    std::string ud_field;

    // Initial design of `optimize`.
    std::string init = "water";
    std::string init_labels;

    double cg_tol = 1e-10;
    int cg_max_iter = 0;  // 0 selects 20 * n

    double kappa_max = 0.05;
    double kappa_growth = 1.1;
    double kappa_min = 1e-4;
    int max_halvings = 20;
    int max_iterations = 100;
    double angle_tol = 1e-3;

    std::string eps_list;  // comma separated, decreasing; empty -> command default
    int td_vertex = -1;    // -1 picks the vertex farthest from the interface

    std::string out_dir = ".";
    bool vtk_output = true;
    bool field_output = true;
};

// Reads `path` (may be empty: defaults only) and applies command-line
// overrides on top. Lines are `key = value`; '#' starts a comment.
// Unknown keys, malformed lines, and unparsable values throw ConfigError
// with the line number.
RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

// Comma-separated doubles, e.g. "0.3,0.2,0.1"; throws ConfigError.
std::vector<double> parse_double_list(const std::string& text);

}  // namespace surftopt
