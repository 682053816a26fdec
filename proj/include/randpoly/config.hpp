#pragma once

// Experiment configuration: a strict JSON schema (unknown keys are errors)
// validated before anything runs.

#include <string>
#include <vector>

#include <json.hpp>

#include "randpoly/bodies.hpp"
#include "randpoly/estimators.hpp"
#include "randpoly/sampling.hpp"

namespace randpoly {

struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    std::string experiment_id;
    Body body = Ball{2, 1.0};
    DensitySpec density;
    int j = 1;
    std::vector<int> n_grid;
    int reps = 2;
    int y_samples = 128;
    std::vector<Route> routes;
    std::uint64_t master_seed = 0;
    double membership_tol = 1e-9;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                                const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw validation_error(path + ": unknown key '" + it.key() + "'");
    }
}

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw validation_error(path + "." + key + ": missing");
    return obj.at(key);
}

inline double get_number(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) throw validation_error(path + "." + key + ": must be a number");
    return v.get<double>();
}

inline int get_int(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_integer()) throw validation_error(path + "." + key + ": must be an integer");
    return v.get<int>();
}

inline Body parse_body(const json& b, const std::string& path) {
    if (!b.is_object()) throw validation_error(path + ": must be an object");
    const std::string kind = require(b, "kind", path).get<std::string>();
    try {
        if (kind == "ball") {
            reject_unknown_keys(b, {"kind", "dim", "radius"}, path);
            Body body = Ball{get_int(b, "dim", path), get_number(b, "radius", path)};
            validate_body(body);
            return body;
        }
        if (kind == "ellipsoid") {
            reject_unknown_keys(b, {"kind", "semiaxes"}, path);
            const json& ax = require(b, "semiaxes", path);
            if (!ax.is_array() || ax.size() < 2 || ax.size() > kMaxDim)
                throw validation_error(path + ".semiaxes: must be an array of 2..10 numbers");
            Ellipsoid e;
            e.dim = static_cast<int>(ax.size());
            for (size_t i = 0; i < ax.size(); ++i) e.semiaxes[i] = ax[i].get<double>();
            Body body = e;
            validate_body(body);
            return body;
        }
        if (kind == "capsule") {
            reject_unknown_keys(b, {"kind", "dim", "cap_radius", "core_length", "axis"}, path);
            Capsule c{get_int(b, "dim", path), get_number(b, "cap_radius", path),
                      get_number(b, "core_length", path),
                      b.contains("axis") ? get_int(b, "axis", path) : 0};
            Body body = c;
            validate_body(body);
            return body;
        }
        if (kind == "cube") {
            reject_unknown_keys(b, {"kind", "dim", "side"}, path);
            Body body = Cube{get_int(b, "dim", path), get_number(b, "side", path)};
            validate_body(body);
            return body;
        }
    } catch (const validation_error&) {
        throw;
    } catch (const std::exception& e) {
        throw validation_error(path + ": " + e.what());
    }
    throw validation_error(path + ".kind: must be one of ball, ellipsoid, capsule, cube");
}

inline DensitySpec parse_density(const json& d, const std::string& path, const Body& body) {
    if (!d.is_object()) throw validation_error(path + ": must be an object");
    const std::string kind = require(d, "kind", path).get<std::string>();
    if (kind == "uniform") {
        reject_unknown_keys(d, {"kind"}, path);
        return DensitySpec::uniform();
    }
    if (kind == "curvature_power") {
        reject_unknown_keys(d, {"kind", "beta"}, path);
        return DensitySpec::curvature_power(get_number(d, "beta", path));
    }
    if (kind == "perturbed") {
        reject_unknown_keys(d, {"kind", "base", "center", "amplitude", "width"}, path);
        const DensitySpec base = parse_density(require(d, "base", path), path + ".base", body);
        const json& c = require(d, "center", path);
        if (!c.is_array() || static_cast<int>(c.size()) != dim(body))
            throw validation_error(path + ".center: must be a boundary point with " +
                                   std::to_string(dim(body)) + " coordinates");
        Vec center(dim(body));
        for (int i = 0; i < dim(body); ++i) center[i] = c[static_cast<size_t>(i)].get<double>();
        try {
            return DensitySpec::perturbed(base, center, get_number(d, "amplitude", path),
                                          get_number(d, "width", path));
        } catch (const std::exception& e) {
            throw validation_error(path + ": " + e.what());
        }
    }
    throw validation_error(path + ".kind: must be one of uniform, curvature_power, perturbed");
}

inline Route parse_route(const std::string& s, const std::string& path) {
    if (s == "direct") return Route::direct;
    if (s == "support") return Route::support;
    if (s == "projection") return Route::projection;
    throw validation_error(path + ": unknown route '" + s + "'");
}

}  // namespace detail

inline bool route_applicable(Route r, int j, int d) {
    switch (r) {
        case Route::direct: return j == d && d <= 3;
        case Route::support: return j == 1;
        case Route::projection: return true;
    }
    return false;
}

inline ExperimentConfig parse_experiment_config(const nlohmann::json& root) {
    using detail::get_int;
    using detail::require;
    if (!root.is_object()) throw validation_error("config: must be a JSON object");
    detail::reject_unknown_keys(root,
                                {"experiment_id", "body", "density", "j", "n_grid", "reps",
                                 "y_samples", "routes", "master_seed", "tolerances"},
                                "config");
    ExperimentConfig cfg;
    cfg.experiment_id = require(root, "experiment_id", "config").get<std::string>();
    if (cfg.experiment_id.empty() ||
        cfg.experiment_id.find_first_of(",\n\r") != std::string::npos)
        throw validation_error("config.experiment_id: must be nonempty without commas/newlines");

    cfg.body = detail::parse_body(require(root, "body", "config"), "config.body");
    const int d = dim(cfg.body);
    cfg.density = detail::parse_density(require(root, "density", "config"), "config.density", cfg.body);
    // surfaces invalid body/density pairings (e.g. curvature power on flat parts)
    try {
        make_density(cfg.body, cfg.density);
    } catch (const std::exception& e) {
        throw validation_error(std::string("config.density: ") + e.what());
    }

    cfg.j = get_int(root, "j", "config");
    if (cfg.j < 1 || cfg.j > d)
        throw validation_error("config.j: must be in [1, " + std::to_string(d) + "]");

    const auto& grid = require(root, "n_grid", "config");
    if (!grid.is_array() || grid.empty())
        throw validation_error("config.n_grid: must be a nonempty array");
    for (const auto& v : grid) {
        const int n = v.get<int>();
        if (n < 1) throw validation_error("config.n_grid: entries must be >= 1");
        if (!cfg.n_grid.empty() && n <= cfg.n_grid.back())
            throw validation_error("config.n_grid: must be strictly increasing");
        cfg.n_grid.push_back(n);
    }

    cfg.reps = get_int(root, "reps", "config");
    if (cfg.reps < 2) throw validation_error("config.reps: must be >= 2");

    if (root.contains("y_samples")) {
        cfg.y_samples = get_int(root, "y_samples", "config");
        if (cfg.y_samples < 1) throw validation_error("config.y_samples: must be >= 1");
    }
    if (root.contains("master_seed")) {
        const auto& v = root.at("master_seed");
        if (!v.is_number_integer() || v.get<double>() < 0)
            throw validation_error("config.master_seed: must be a nonnegative integer");
        cfg.master_seed = v.get<std::uint64_t>();
    }
    if (root.contains("routes")) {
        const auto& rs = root.at("routes");
        if (!rs.is_array() || rs.empty())
            throw validation_error("config.routes: must be a nonempty array");
        for (const auto& r : rs) {
            const Route route = detail::parse_route(r.get<std::string>(), "config.routes");
            if (!route_applicable(route, cfg.j, d))
                throw validation_error(std::string("config.routes: route '") + route_name(route) +
                                       "' not applicable for j=" + std::to_string(cfg.j) +
                                       ", d=" + std::to_string(d));
            cfg.routes.push_back(route);
        }
    } else {
        for (Route r : {Route::direct, Route::support, Route::projection})
            if (route_applicable(r, cfg.j, d)) cfg.routes.push_back(r);
    }
    if (root.contains("tolerances")) {
        const auto& t = root.at("tolerances");
        detail::reject_unknown_keys(t, {"membership"}, "config.tolerances");
        if (t.contains("membership")) {
            cfg.membership_tol = t.at("membership").get<double>();
            if (!(cfg.membership_tol > 0))
                throw validation_error("config.tolerances.membership: must be > 0");
        }
    }
    return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw validation_error(std::string("config: invalid JSON: ") + e.what());
    }
    return parse_experiment_config(root);
}

}  // namespace randpoly
