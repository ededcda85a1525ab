#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bergman/analytic.hpp"
#include "bergman/operators.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline double parse_double(const std::string& s, const std::string& field) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("field '" + field + "': cannot parse number from '" + s + "'");
    }
}

inline long parse_long(const std::string& s, const std::string& field) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("field '" + field + "': cannot parse integer from '" + s + "'");
    }
}

}  // namespace detail

/// Tabulated weight from a two-column CSV (r, w(r)), r strictly increasing in
/// [0,1). Parse errors name the offending row.
inline RadialWeight load_weight_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open weight CSV: " + path.string());
    std::vector<double> rs, ws;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto parts = detail::split(t, ',');
        if (parts.size() != 2)
            throw ConfigError(path.string() + ": row " + std::to_string(row) +
                              ": expected two columns");
        double r, w;
        try {
            r = std::stod(parts[0]);
            w = std::stod(parts[1]);
        } catch (const std::exception&) {
            if (row == 1) continue;  // header row
            throw ConfigError(path.string() + ": row " + std::to_string(row) +
                              ": cannot parse numbers");
        }
        if (!(r >= 0.0 && r < 1.0))
            throw ConfigError(path.string() + ": row " + std::to_string(row) +
                              ": radius out of [0,1)");
        if (!rs.empty() && !(r > rs.back()))
            throw ConfigError(path.string() + ": row " + std::to_string(row) +
                              ": radii must be strictly increasing");
        if (!(w >= 0.0))
            throw ConfigError(path.string() + ": row " + std::to_string(row) +
                              ": negative weight sample");
        rs.push_back(r);
        ws.push_back(w);
    }
    if (rs.size() < 2) throw ConfigError(path.string() + ": need at least two samples");
    return RadialWeight::from_table(std::move(rs), std::move(ws), "table:" + path.string());
}

/// Grammar: "standard:alpha=<float>" or "table:<csv path>".
inline RadialWeight parse_weight_spec(const std::string& spec,
                                      const std::filesystem::path& base_dir = {}) {
    if (spec.rfind("standard:alpha=", 0) == 0)
        return RadialWeight::standard(
            detail::parse_double(spec.substr(15), "weight alpha"));
    if (spec.rfind("table:", 0) == 0) {
        std::filesystem::path p = spec.substr(6);
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return load_weight_csv(p);
    }
    throw ConfigError("unknown weight spec '" + spec +
                      "' (expected standard:alpha=<float> or table:<csv>)");
}

/// Grammar: constant:<c> | scaling:<lambda> | identity | power:<k> |
/// blaschke:<a> | taylor:<c0>,<c1>,... (real parameters).
inline SymbolMap parse_map_spec(const std::string& spec) {
    if (spec == "identity") return SymbolMap::identity();
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("unknown symbol spec '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string args = spec.substr(colon + 1);
    if (kind == "constant") return SymbolMap::constant(detail::parse_double(args, "constant"));
    if (kind == "scaling") return SymbolMap::scaling(detail::parse_double(args, "scaling"));
    if (kind == "power")
        return SymbolMap::power(static_cast<int>(detail::parse_long(args, "power")));
    if (kind == "blaschke") return SymbolMap::blaschke(detail::parse_double(args, "blaschke"));
    if (kind == "taylor") {
        std::vector<Complex> coeffs;
        for (const auto& tok : detail::split(args, ','))
            coeffs.push_back(detail::parse_double(tok, "taylor coefficient"));
        return SymbolMap::taylor(std::move(coeffs));
    }
    throw ConfigError("unknown symbol spec '" + spec + "'");
}

/// One experiment: flat key = value lines, '#' comments. Every knob mirrors a
/// module parameter; unknown keys are rejected with their line number.
struct ExperimentConfig {
    std::string name = "experiment";
    std::string weight_omega = "standard:alpha=0";
    std::string weight_nu = "standard:alpha=0";
    double p = 2.0;
    double q = 2.0;
    std::string phi = "scaling:0.5";
    std::string u = "constant:1";
    int n = 0;
    std::string delta = "heuristic";  // or a positive number
    std::string testfn_variant = "one_minus_a";
    double carleson_r = 0.5;
    std::vector<std::string> criteria = {"order_bounded", "bounded", "carleson"};
    int grid_a_dyadic = 10;
    int grid_a_angles = 8;
    int grid_z_dyadic = 8;
    int grid_z_angles = 16;
    int grid_tail_dyadic = 14;
    int grid_tail_angles = 16;
    int weight_grid_dyadic = 40;
    QuadratureSpec quad;

    // resolved objects
    RadialWeight omega() const { return parse_weight_spec(weight_omega, base_dir); }
    RadialWeight nu() const { return parse_weight_spec(weight_nu, base_dir); }
    OperatorSymbol symbol() const { return make_operator(parse_map_spec(phi), parse_map_spec(u), n); }
    TestVariant variant() const {
        if (testfn_variant == "one_minus_a") return TestVariant::one_minus_a;
        if (testfn_variant == "one_minus_a_sq") return TestVariant::one_minus_a_sq;
        throw ConfigError("testfn.variant must be one_minus_a or one_minus_a_sq");
    }

    std::filesystem::path base_dir;
};

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    ExperimentConfig cfg;
    cfg.base_dir = path.parent_path();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        auto fail = [&](const std::string& why) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": field '" + key +
                              "': " + why);
        };
        if (key == "name") cfg.name = val;
        else if (key == "weight.omega") cfg.weight_omega = val;
        else if (key == "weight.nu") cfg.weight_nu = val;
        else if (key == "p") cfg.p = detail::parse_double(val, key);
        else if (key == "q") cfg.q = detail::parse_double(val, key);
        else if (key == "symbol.phi") cfg.phi = val;
        else if (key == "symbol.u") cfg.u = val;
        else if (key == "symbol.n") cfg.n = static_cast<int>(detail::parse_long(val, key));
        else if (key == "delta") cfg.delta = val;
        else if (key == "testfn.variant") cfg.testfn_variant = val;
        else if (key == "carleson.r") cfg.carleson_r = detail::parse_double(val, key);
        else if (key == "criteria") cfg.criteria = detail::split(val, ',');
        else if (key == "grid.a_dyadic") cfg.grid_a_dyadic = static_cast<int>(detail::parse_long(val, key));
        else if (key == "grid.a_angles") cfg.grid_a_angles = static_cast<int>(detail::parse_long(val, key));
        else if (key == "grid.z_dyadic") cfg.grid_z_dyadic = static_cast<int>(detail::parse_long(val, key));
        else if (key == "grid.z_angles") cfg.grid_z_angles = static_cast<int>(detail::parse_long(val, key));
        else if (key == "grid.tail_dyadic") cfg.grid_tail_dyadic = static_cast<int>(detail::parse_long(val, key));
        else if (key == "grid.tail_angles") cfg.grid_tail_angles = static_cast<int>(detail::parse_long(val, key));
        else if (key == "weight.grid_dyadic") cfg.weight_grid_dyadic = static_cast<int>(detail::parse_long(val, key));
        else if (key == "quad.rings") cfg.quad.radial_rings = static_cast<int>(detail::parse_long(val, key));
        else if (key == "quad.angular") cfg.quad.angular_nodes_per_ring = static_cast<int>(detail::parse_long(val, key));
        else if (key == "quad.relerr") cfg.quad.rel_error_target = detail::parse_double(val, key);
        else if (key == "quad.cap") cfg.quad.divergence_cap = detail::parse_double(val, key);
        else if (key == "quad.levels") cfg.quad.max_refinement_levels = static_cast<int>(detail::parse_long(val, key));
        else if (key == "quad.budget") cfg.quad.cell_budget = detail::parse_long(val, key);
        else fail("unknown key");

        if (key == "carleson.r" && !(cfg.carleson_r > 0.0 && cfg.carleson_r < 1.0))
            fail("must lie in (0,1)");
        if ((key == "p" || key == "q") && !(detail::parse_double(val, key) > 0.0))
            fail("must be positive");
        if (key == "symbol.n" && cfg.n < 0) fail("must be >= 0");
        if (key == "quad.rings" && cfg.quad.radial_rings < 1) fail("must be >= 1");
        if (key == "quad.angular" && cfg.quad.angular_nodes_per_ring < 1) fail("must be >= 1");
        if (key == "quad.relerr" &&
            !(cfg.quad.rel_error_target > 0.0 && cfg.quad.rel_error_target < 1.0))
            fail("must lie in (0,1)");
        if (key == "quad.cap" && !(cfg.quad.divergence_cap > 1.0)) fail("must be > 1");
        if (key == "quad.levels" && cfg.quad.max_refinement_levels < 1) fail("must be >= 1");
        const std::vector<std::string> dyadics = {"grid.a_dyadic", "grid.z_dyadic",
                                                  "grid.tail_dyadic", "weight.grid_dyadic"};
        for (const auto& g : dyadics)
            if (key == g && detail::parse_long(val, key) < 1) fail("must be >= 1");
    }
    return cfg;
}

/// Deterministic key = value form of the fully-resolved config; embedded in
/// every JSON record for reproducibility.
inline std::map<std::string, std::string> resolved_config(const ExperimentConfig& c) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    std::map<std::string, std::string> m;
    m["name"] = c.name;
    m["weight.omega"] = c.weight_omega;
    m["weight.nu"] = c.weight_nu;
    m["p"] = num(c.p);
    m["q"] = num(c.q);
    m["symbol.phi"] = c.phi;
    m["symbol.u"] = c.u;
    m["symbol.n"] = std::to_string(c.n);
    m["delta"] = c.delta;
    m["testfn.variant"] = c.testfn_variant;
    m["carleson.r"] = num(c.carleson_r);
    std::string crit;
    for (const auto& s : c.criteria) crit += (crit.empty() ? "" : ",") + s;
    m["criteria"] = crit;
    m["grid.a_dyadic"] = std::to_string(c.grid_a_dyadic);
    m["grid.a_angles"] = std::to_string(c.grid_a_angles);
    m["grid.z_dyadic"] = std::to_string(c.grid_z_dyadic);
    m["grid.z_angles"] = std::to_string(c.grid_z_angles);
    m["grid.tail_dyadic"] = std::to_string(c.grid_tail_dyadic);
    m["grid.tail_angles"] = std::to_string(c.grid_tail_angles);
    m["weight.grid_dyadic"] = std::to_string(c.weight_grid_dyadic);
    m["quad.rings"] = std::to_string(c.quad.radial_rings);
    m["quad.angular"] = std::to_string(c.quad.angular_nodes_per_ring);
    m["quad.relerr"] = num(c.quad.rel_error_target);
    m["quad.cap"] = num(c.quad.divergence_cap);
    m["quad.levels"] = std::to_string(c.quad.max_refinement_levels);
    m["quad.budget"] = std::to_string(c.quad.cell_budget);
    return m;
}

}  // namespace bergman
