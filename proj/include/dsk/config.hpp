#pragma once

#include "dsk/geometry.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace dsk {

struct GridConfig {
    int n_x = 2048;
    int n_theta = 24;
    int q_max = 12;
    double x_max = 0;  // 0: sized from the truncation rule and the scattering horizon t_max
    double window = 40;
    double cfl = 0.1;
};

struct ScatterConfig {
    double tol = 1e-6;
    double t_max = 200;
    double sample_dt = 2;
    int suite_size = 10;
};

struct Config {
    SpacetimeParams physics;
    GridConfig grid;
    ScatterConfig scattering;
    std::uint64_t seed = 1;
    int threads = 1;

    /// Throws ConfigError naming the violated invariant.
    void validate() const;
    double resolved_x_max(double data_radius = 8.0) const;

    nlohmann::json to_json() const;
    static Config from_json(const nlohmann::json& j);
    static Config load(const std::string& path);
};

} // namespace dsk
