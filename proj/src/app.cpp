#include "surftopt/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "surftopt/asymptotics.hpp"
#include "surftopt/io.hpp"
#include "surftopt/kernels.hpp"

namespace surftopt {

int exit_code(ErrorDomain domain) {
    switch (domain) {
        case ErrorDomain::config: return 2;
        case ErrorDomain::mesh: return 3;
        case ErrorDomain::solver: return 4;
        case ErrorDomain::optimizer: return 5;
        case ErrorDomain::io: return 6;
    }
    return 1;
}

namespace {

std::string output_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("SURFTOPT_OUT_DIR"); env && *env) return env;
    return cfg.out_dir;
}

std::string join(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

SurfaceMesh make_mesh(const RunConfig& cfg) {
    if (cfg.icosphere_level >= 0 && !cfg.mesh_off.empty())
        throw ConfigError("set either icosphere_level or mesh_off, not both");
    if (cfg.icosphere_level >= 0) return build_icosphere(cfg.icosphere_level);
    if (!cfg.mesh_off.empty()) return load_off(cfg.mesh_off);
    throw ConfigError("no mesh source: set icosphere_level or mesh_off");
}

MaterialIndicator make_design(const SurfaceMesh& mesh, const std::string& kind,
                              double cap_angle_deg, const Vec3& cap_axis,
                              const std::string& labels_path, const char* which) {
    if (kind == "water") return MaterialIndicator::uniform(mesh, Material::material2);
    if (kind == "land") return MaterialIndicator::uniform(mesh, Material::material1);
    if (kind == "cap")
        return spherical_cap_design(mesh, cap_axis,
                                    cap_angle_deg * std::numbers::pi / 180.0);
    if (kind == "labels") {
        if (labels_path.empty())
            throw ConfigError(std::string(which) + " labels file not set");
        return read_indicator_file(labels_path, mesh);
    }
    throw ConfigError(std::string(which) + " '" + kind +
                      "' is not one of water, land, cap, labels");
}

VertexField make_desired_state(const SurfaceMesh& mesh, const RunConfig& cfg,
                               const SolverOptions& opts) {
    if (cfg.target == "field") {
        if (cfg.ud_field.empty())
            throw ConfigError("target 'field' requires the ud_field key");
        return read_field_file(cfg.ud_field, mesh);
    }
    const MaterialIndicator tgt =
        make_design(mesh, cfg.target, cfg.target_cap_angle_deg, cfg.target_cap_axis,
                    cfg.target_labels, "target");
    return solve_state(mesh, tgt, cfg.coeffs, opts).field;
}

SolverOptions solver_options(const RunConfig& cfg) {
    return {cfg.cg_tol, cfg.cg_max_iter};
}

std::vector<double> radii(const RunConfig& cfg, const char* fallback) {
    std::vector<double> out = parse_double_list(cfg.eps_list.empty() ? fallback : cfg.eps_list);
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
        if (!(out[i + 1] < out[i]))
            throw ConfigError("eps_list must be strictly decreasing");
    return out;
}

void cmd_mesh_info(const RunConfig& cfg) {
    const SurfaceMesh mesh = make_mesh(cfg);
    double amin = mesh.area(0), amax = mesh.area(0);
    for (int t = 1; t < mesh.num_triangles(); ++t) {
        amin = std::min(amin, mesh.area(t));
        amax = std::max(amax, mesh.area(t));
    }
    std::cout << "vertices: " << mesh.num_vertices() << '\n'
              << "triangles: " << mesh.num_triangles() << '\n'
              << "total area: " << format_double(mesh.total_area()) << '\n'
              << "element area min: " << format_double(amin) << '\n'
              << "element area max: " << format_double(amax) << '\n'
              << "simd: " << kernels::isa_name(kernels::active_isa()) << '\n';
}

void cmd_solve(const RunConfig& cfg) {
    const SurfaceMesh mesh = make_mesh(cfg);
    const MaterialIndicator design =
        make_design(mesh, cfg.design, cfg.design_cap_angle_deg, cfg.design_cap_axis,
                    cfg.design_labels, "design");
    const FieldSolution sol = solve_state(mesh, design, cfg.coeffs, solver_options(cfg));

    const std::string dir = output_dir(cfg);
    if (cfg.field_output) {
        write_field_file(join(dir, "u.txt"), sol.field);
        write_indicator_file(join(dir, "labels.txt"), design);
    }
    if (cfg.vtk_output) write_vtk(join(dir, "solve.vtk"), mesh, {{"u", &sol.field}}, &design);
    std::cout << "cg iterations: " << sol.cg.iterations << '\n'
              << "relative residual: " << format_double(sol.cg.rel_residual) << '\n';
}

void cmd_optimize(const RunConfig& cfg) {
    const SurfaceMesh mesh = make_mesh(cfg);
    const SolverOptions opts = solver_options(cfg);
    const VertexField u_d = make_desired_state(mesh, cfg, opts);

    VertexField psi0 = [&] {
        if (cfg.init == "water") return init_levelset(mesh, Material::material2);
        if (cfg.init == "land") return init_levelset(mesh, Material::material1);
        if (cfg.init == "labels") {
            if (cfg.init_labels.empty())
                throw ConfigError("init 'labels' requires the init_labels key");
            return init_levelset(mesh, read_indicator_file(cfg.init_labels, mesh));
        }
        throw ConfigError("init '" + cfg.init + "' is not one of water, land, labels");
    }();

    OptimizerConfig oc;
    oc.kappa_max = cfg.kappa_max;
    oc.kappa_growth = cfg.kappa_growth;
    oc.kappa_min = cfg.kappa_min;
    oc.max_halvings = cfg.max_halvings;
    oc.max_iterations = cfg.max_iterations;
    oc.angle_tol = cfg.angle_tol;
    oc.solver = opts;

    const OptimizerState st = optimize(mesh, psi0, u_d, cfg.coeffs, oc);

    const std::string dir = output_dir(cfg);
    write_history_csv(join(dir, "history.csv"), st.history);
    if (cfg.vtk_output)
        write_vtk(join(dir, "final.vtk"), mesh, {{"psi", &st.psi}, {"u", &st.state}},
                  &st.materials);
    if (cfg.field_output) {
        write_field_file(join(dir, "psi.txt"), st.psi);
        write_indicator_file(join(dir, "final_labels.txt"), st.materials);
    }
    std::cout << "initial objective: " << format_double(st.initial_objective) << '\n'
              << "final objective: " << format_double(st.objective) << '\n'
              << "accepted steps: " << st.iterations << '\n'
              << "drift steps: " << st.drift_steps << '\n'
              << "stop: " << to_string(st.stop) << '\n';
}

void cmd_verify_td(const RunConfig& cfg) {
    const SurfaceMesh mesh = make_mesh(cfg);
    const SolverOptions opts = solver_options(cfg);
    const MaterialIndicator base =
        make_design(mesh, cfg.design, cfg.design_cap_angle_deg, cfg.design_cap_axis,
                    cfg.design_labels, "design");
    const VertexField u_d = make_desired_state(mesh, cfg, opts);
    const std::vector<double> eps = radii(cfg, "0.3,0.2,0.15,0.1");
    const int vertex = cfg.td_vertex >= 0 ? cfg.td_vertex
                                          : farthest_vertex_from_interface(mesh, base);

    const QuotientTable table = td_quotient_study(mesh, base, u_d, cfg.coeffs, vertex,
                                                  eps, opts);

    write_quotient_csv(join(output_dir(cfg), "quotient.csv"), table);
    std::cout << "vertex: " << table.vertex << '\n'
              << "base objective: " << format_double(table.base_objective) << '\n'
              << "formula value: " << format_double(table.formula_value) << '\n';
    for (const QuotientRow& r : table.rows) {
        std::cout << "eps " << format_double(r.eps) << ": quotient "
                  << format_double(r.quotient) << ", rel_err "
                  << format_double(r.rel_error);
        if (r.below_resolution) std::cout << " (below mesh resolution)";
        std::cout << '\n';
    }
}

void cmd_verify_area(const RunConfig& cfg) {
    const SurfaceMesh mesh = make_mesh(cfg);
    const std::vector<double> eps = radii(cfg, "0.4,0.2,0.1,0.05");
    const int vertex = cfg.td_vertex >= 0 ? cfg.td_vertex : 0;
    const MaterialIndicator uniform = MaterialIndicator::uniform(mesh, Material::material2);

    std::string csv = "eps,area_exact,area_flat,deviation,area_mesh\n";
    for (double e : eps) {
        const double exact = geodesic_disk_area_exact(e);
        const double flat = std::numbers::pi * e * e;
        const double deviation = std::abs(exact / flat - 1.0);
        const double mesh_area = flip_geodesic_disk(mesh, uniform, vertex, e).flipped_area;
        csv += format_double(e) + ',' + format_double(exact) + ',' + format_double(flat) +
               ',' + format_double(deviation) + ',' + format_double(mesh_area) + '\n';
        std::cout << "eps " << format_double(e) << ": exact " << format_double(exact)
                  << ", flat " << format_double(flat) << ", deviation "
                  << format_double(deviation) << ", mesh " << format_double(mesh_area)
                  << '\n';
    }
    write_text_atomic(join(output_dir(cfg), "area_check.csv"), csv);
}

}  // namespace

void run(const RunConfig& cfg) {
    if (cfg.command == "mesh-info") cmd_mesh_info(cfg);
    else if (cfg.command == "solve") cmd_solve(cfg);
    else if (cfg.command == "optimize") cmd_optimize(cfg);
    else if (cfg.command == "verify-td") cmd_verify_td(cfg);
    else if (cfg.command == "verify-area") cmd_verify_area(cfg);
    else
        throw ConfigError("unknown command '" + cfg.command +
                          "'; expected solve, optimize, verify-td, verify-area, or "
                          "mesh-info");
}

namespace {

void print_usage(std::ostream& out) {
    out << "usage: surftopt <command> [--config FILE] [--key value | --key=value]...\n"
           "commands:\n"
           "  solve        solve the state equation for a configured design\n"
           "  optimize     run the level-set optimization loop\n"
           "  verify-td    finite-difference check of the sensitivity formula\n"
           "  verify-area  geodesic disk area expansion check\n"
           "  mesh-info    print mesh statistics\n"
           "Configuration is flat key = value; command-line overrides win.\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    if (argc < 2) {
        print_usage(std::cerr);
        return 2;
    }
    const std::string command = argv[1];
    if (command == "-h" || command == "--help" || command == "help") {
        print_usage(std::cout);
        return 0;
    }

    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    for (int i = 2; i < argc; ++i) {
        std::string token = argv[i];
        if (token.rfind("--", 0) != 0) {
            std::cerr << "surftopt: unexpected argument '" << token << "'\n";
            print_usage(std::cerr);
            return 2;
        }
        token.erase(0, 2);
        std::string key, value;
        if (const auto eq = token.find('='); eq != std::string::npos) {
            key = token.substr(0, eq);
            value = token.substr(eq + 1);
        } else {
            key = token;
            if (i + 1 >= argc) {
                std::cerr << "surftopt: missing value for --" << key << '\n';
                return 2;
            }
            value = argv[++i];
        }
        if (key.empty()) {
            std::cerr << "surftopt: empty option name\n";
            return 2;
        }
        if (key == "config") config_path = value;
        else overrides.emplace_back(key, value);
    }

    try {
        RunConfig cfg = parse_config(config_path, overrides);
        cfg.command = command;
        run(cfg);
        return 0;
    } catch (const Error& e) {
        std::cerr << "surftopt: error: " << e.what() << '\n';
        return exit_code(e.domain());
    } catch (const std::exception& e) {
        std::cerr << "surftopt: internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace surftopt
