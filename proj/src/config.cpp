#include "surftopt/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "surftopt/error.hpp"

namespace surftopt {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
    return d;
}

int parse_int(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const long d = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("key '" + key + "': cannot parse '" + value + "' as an integer");
    return static_cast<int>(d);
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a boolean");
}

Vec3 parse_axis(const std::string& key, const std::string& value) {
    const std::vector<double> parts = parse_double_list(value);
    if (parts.size() != 3)
        throw ConfigError("key '" + key + "': expected three comma-separated components");
    return {parts[0], parts[1], parts[2]};
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "icosphere_level") cfg.icosphere_level = parse_int(key, v);
    else if (key == "mesh_off") cfg.mesh_off = v;
    else if (key == "beta1") cfg.coeffs.beta1 = parse_double(key, v);
    else if (key == "beta2") cfg.coeffs.beta2 = parse_double(key, v);
    else if (key == "gamma1") cfg.coeffs.gamma1 = parse_double(key, v);
    else if (key == "gamma2") cfg.coeffs.gamma2 = parse_double(key, v);
    else if (key == "f1") cfg.coeffs.f1 = parse_double(key, v);
    else if (key == "f2") cfg.coeffs.f2 = parse_double(key, v);
    else if (key == "alpha1") cfg.coeffs.alpha1 = parse_double(key, v);
    else if (key == "alpha2") cfg.coeffs.alpha2 = parse_double(key, v);
    else if (key == "design") cfg.design = v;
    else if (key == "design_cap_angle_deg") cfg.design_cap_angle_deg = parse_double(key, v);
    else if (key == "design_cap_axis") cfg.design_cap_axis = parse_axis(key, v);
    else if (key == "design_labels") cfg.design_labels = v;
    else if (key == "target") cfg.target = v;
    else if (key == "target_cap_angle_deg") cfg.target_cap_angle_deg = parse_double(key, v);
    else if (key == "target_cap_axis") cfg.target_cap_axis = parse_axis(key, v);
    else if (key == "target_labels") cfg.target_labels = v;
    else if (key == "ud_field") cfg.ud_field = v;
    else if (key == "init") cfg.init = v;
    else if (key == "init_labels") cfg.init_labels = v;
    else if (key == "cg_tol") cfg.cg_tol = parse_double(key, v);
    else if (key == "cg_max_iter") cfg.cg_max_iter = parse_int(key, v);
    else if (key == "kappa_max") cfg.kappa_max = parse_double(key, v);
    else if (key == "kappa_growth") cfg.kappa_growth = parse_double(key, v);
    else if (key == "kappa_min") cfg.kappa_min = parse_double(key, v);
    else if (key == "max_halvings") cfg.max_halvings = parse_int(key, v);
    else if (key == "max_iterations") cfg.max_iterations = parse_int(key, v);
    else if (key == "angle_tol") cfg.angle_tol = parse_double(key, v);
    else if (key == "eps_list") cfg.eps_list = v;
    else if (key == "td_vertex") cfg.td_vertex = parse_int(key, v);
    else if (key == "out_dir") cfg.out_dir = v;
    else if (key == "vtk_output") cfg.vtk_output = parse_bool(key, v);
    else if (key == "field_output") cfg.field_output = parse_bool(key, v);
    else throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string v = trim(item);
        if (v.empty()) throw ConfigError("empty entry in list '" + text + "'");
        out.push_back(parse_double("list entry", v));
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open configuration file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string content = trim(line);
            if (content.empty()) continue;
            const auto eq = content.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = trim(content.substr(0, eq));
            const std::string value = content.substr(eq + 1);
            if (key.empty())
                throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
            try {
                apply(cfg, key, value);
            } catch (const ConfigError& e) {
                throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    for (const auto& [key, value] : overrides) apply(cfg, key, value);
    cfg.coeffs.validate();
    return cfg;
}

}  // namespace surftopt
