#include "dsk/config.hpp"
#include "dsk/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace dsk {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

void reject_unknown(const json& j, const std::string& section, const std::set<std::string>& known) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("unknown key '" + section + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& section) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + section + key + "' has the wrong type");
    }
}

} // namespace

void Config::validate() const {
    physics.validate();
    require(grid.n_x >= 16 && grid.n_x % 2 == 0, "grid.n_x must be even and >= 16");
    require(grid.n_theta >= 4, "grid.n_theta must be >= 4");
    require(grid.q_max >= 1 && grid.q_max <= grid.n_theta, "grid.q_max must lie in [1, grid.n_theta]");
    require(grid.x_max >= 0, "grid.x_max must be >= 0 (0 selects automatic sizing)");
    require(grid.window > 0, "grid.window must be > 0");
    require(grid.cfl > 0 && grid.cfl <= 0.2, "grid.cfl must lie in (0, 0.2]");
    require(scattering.tol > 0 && scattering.tol < 1, "scattering.tol must lie in (0, 1)");
    require(scattering.t_max >= 0, "scattering.t_max must be >= 0");
    require(scattering.sample_dt > 0, "scattering.sample_dt must be > 0");
    require(scattering.suite_size >= 1, "scattering.suite_size must be >= 1");
    require(threads >= 1, "threads must be >= 1");
}

double Config::resolved_x_max(double data_radius) const {
    if (grid.x_max > 0) return grid.x_max;
    return std::max(truncation_half_width(physics), (data_radius + scattering.t_max + 2.0) / 0.875);
}

json Config::to_json() const {
    return json{{"physics",
                 {{"lambda", physics.lambda_c},
                  {"mass", physics.mass},
                  {"a", physics.spin},
                  {"n", physics.n},
                  {"m2", physics.m2}}},
                {"grid",
                 {{"n_x", grid.n_x},
                  {"n_theta", grid.n_theta},
                  {"q_max", grid.q_max},
                  {"x_max", grid.x_max},
                  {"window", grid.window},
                  {"cfl", grid.cfl}}},
                {"scattering",
                 {{"tol", scattering.tol},
                  {"t_max", scattering.t_max},
                  {"sample_dt", scattering.sample_dt},
                  {"suite_size", scattering.suite_size}}},
                {"seed", seed},
                {"threads", threads}};
}

Config Config::from_json(const json& j) {
    require(j.is_object(), "config must be a JSON object");
    reject_unknown(j, "", {"physics", "grid", "scattering", "seed", "threads"});
    Config c;
    if (j.contains("physics")) {
        const json& p = j["physics"];
        reject_unknown(p, "physics.", {"lambda", "mass", "a", "n", "m2"});
        read(p, "lambda", c.physics.lambda_c, "physics.");
        read(p, "mass", c.physics.mass, "physics.");
        read(p, "a", c.physics.spin, "physics.");
        read(p, "n", c.physics.n, "physics.");
        read(p, "m2", c.physics.m2, "physics.");
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        reject_unknown(g, "grid.", {"n_x", "n_theta", "q_max", "x_max", "window", "cfl"});
        read(g, "n_x", c.grid.n_x, "grid.");
        read(g, "n_theta", c.grid.n_theta, "grid.");
        read(g, "q_max", c.grid.q_max, "grid.");
        read(g, "x_max", c.grid.x_max, "grid.");
        read(g, "window", c.grid.window, "grid.");
        read(g, "cfl", c.grid.cfl, "grid.");
    }
    if (j.contains("scattering")) {
        const json& s = j["scattering"];
        reject_unknown(s, "scattering.", {"tol", "t_max", "sample_dt", "suite_size"});
        read(s, "tol", c.scattering.tol, "scattering.");
        read(s, "t_max", c.scattering.t_max, "scattering.");
        read(s, "sample_dt", c.scattering.sample_dt, "scattering.");
        read(s, "suite_size", c.scattering.suite_size, "scattering.");
    }
    read(j, "seed", c.seed, "");
    read(j, "threads", c.threads, "");
    c.validate();
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return from_json(j);
}

} // namespace dsk
