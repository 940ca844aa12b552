#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedoq/poisson.hpp"
#include "fedoq/poly_parse.hpp"

namespace fedoq {

// One job description: base ring, bracket data, truncation orders, seed.
struct JobConfig {
    std::vector<std::string> variables;
    RingMode base{};
    int hbar_order = 0;
    std::optional<int> weyl_degree;
    bool explicit_basis = false;
    PolyMatrix pi;
    std::optional<PolyMatrix> v;
    std::optional<PolyMatrix> phi;
    std::optional<PolyMatrix> omega;
    std::optional<std::vector<PolyMatrix>> c;
    std::uint64_t seed = 0;
    nlohmann::ordered_json echo;

    int d_max() const { return weyl_degree.value_or(2 * hbar_order); }

    StructureInput structure_input() const {
        StructureInput in;
        in.base = base;
        in.Pi = pi;
        in.explicit_basis = explicit_basis;
        in.V = v;
        in.phi = phi;
        in.omega = omega;
        in.C = c;
        return in;
    }
};

namespace detail {

inline PolyMatrix parse_string_matrix(const nlohmann::ordered_json& rows,
                                      const std::vector<std::string>& names, RingMode mode,
                                      const std::string& label) {
    if (!rows.is_array() || rows.empty())
        throw ParseError("config: '" + label + "' must be a non-empty array of rows");
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(rows[0].size());
    PolyMatrix m(nr, nc, mode);
    for (int i = 0; i < nr; ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != nc)
            throw ParseError("config: '" + label + "' rows have inconsistent lengths");
        for (int j = 0; j < nc; ++j) {
            if (!rows[i][j].is_string())
                throw ParseError("config: '" + label + "' entries must be polynomial strings");
            m.at(i, j) = poly_parse(rows[i][j].get<std::string>(), names, mode);
        }
    }
    return m;
}

} // namespace detail

inline JobConfig parse_config(const nlohmann::ordered_json& doc) {
    JobConfig cfg;
    cfg.echo = doc;
    if (!doc.is_object()) throw ParseError("config: top-level JSON object expected");

    if (!doc.contains("variables") || !doc["variables"].is_array() || doc["variables"].empty())
        throw ParseError("config: 'variables' must be a non-empty array of names");
    std::set<std::string> seen;
    for (const auto& v : doc["variables"]) {
        if (!v.is_string()) throw ParseError("config: variable names must be strings");
        std::string name = v.get<std::string>();
        if (!seen.insert(name).second)
            throw ParseError("config: duplicate variable name '" + name + "'");
        cfg.variables.push_back(std::move(name));
    }
    const int m = static_cast<int>(cfg.variables.size());

    if (!doc.contains("base") || !doc["base"].is_object() || !doc["base"].contains("type"))
        throw ParseError("config: 'base' object with a 'type' is required");
    std::string base_type = doc["base"]["type"].get<std::string>();
    if (base_type == "polynomial") {
        cfg.base = polynomial_mode(m);
    } else if (base_type == "jet") {
        if (!doc["base"].contains("max_degree"))
            throw ParseError("config: jet base requires 'max_degree'");
        int md = doc["base"]["max_degree"].get<int>();
        if (md < 1) throw ValidationError("config: jet max_degree must be >= 1");
        cfg.base = jet_mode(m, md);
    } else {
        throw ParseError("config: base type must be 'polynomial' or 'jet'");
    }

    if (!doc.contains("hbar_order")) throw ParseError("config: 'hbar_order' is required");
    cfg.hbar_order = doc["hbar_order"].get<int>();
    if (cfg.hbar_order < 0) throw ValidationError("config: hbar_order must be >= 0");
    if (doc.contains("weyl_degree")) {
        cfg.weyl_degree = doc["weyl_degree"].get<int>();
        if (*cfg.weyl_degree < 0) throw ValidationError("config: weyl_degree must be >= 0");
    }

    std::string mode_name =
        doc.contains("mode") ? doc["mode"].get<std::string>() : "symplectic_coordinates";
    if (mode_name == "symplectic_coordinates")
        cfg.explicit_basis = false;
    else if (mode_name == "explicit_basis")
        cfg.explicit_basis = true;
    else
        throw ParseError("config: mode must be 'symplectic_coordinates' or 'explicit_basis'");

    if (!doc.contains("poisson") || !doc["poisson"].contains("matrix"))
        throw ParseError("config: 'poisson.matrix' is required");
    cfg.pi = detail::parse_string_matrix(doc["poisson"]["matrix"], cfg.variables, cfg.base,
                                         "poisson.matrix");
    if (cfg.pi.rows() != m || cfg.pi.cols() != m)
        throw ParseError("config: poisson.matrix must be square of size 'variables'");

    if (cfg.explicit_basis) {
        if (!doc.contains("explicit"))
            throw ParseError("config: explicit_basis mode requires an 'explicit' object");
        const auto& ex = doc["explicit"];
        if (!ex.contains("V") || !ex.contains("phi") || !ex.contains("C"))
            throw ParseError("config: explicit data must supply V, phi and C");
        cfg.v = detail::parse_string_matrix(ex["V"], cfg.variables, cfg.base, "explicit.V");
        cfg.phi = detail::parse_string_matrix(ex["phi"], cfg.variables, cfg.base, "explicit.phi");
        if (ex.contains("omega"))
            cfg.omega =
                detail::parse_string_matrix(ex["omega"], cfg.variables, cfg.base, "explicit.omega");
        if (!ex["C"].is_array()) throw ParseError("config: explicit.C must be an array of matrices");
        std::vector<PolyMatrix> cs;
        for (std::size_t k = 0; k < ex["C"].size(); ++k)
            cs.push_back(detail::parse_string_matrix(ex["C"][k], cfg.variables, cfg.base,
                                                     "explicit.C[" + std::to_string(k) + "]"));
        cfg.c = std::move(cs);
    }

    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    return cfg;
}

inline JobConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    nlohmann::ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config JSON error: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace fedoq
