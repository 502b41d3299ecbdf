#pragma once

#include "dsk/scattering.hpp"

#include <iosfwd>
#include <vector>

namespace dsk {

enum class Horizon { FuturePlus, FutureMinus };

const char* to_string(Horizon h);
Side side_of(Horizon h);

/// Profile on a future horizon: *t (plus) or t* (minus) nodes, modal in θ.
struct HorizonProfile {
    Horizon which = Horizon::FuturePlus;
    std::vector<double> t_nodes;
    std::vector<double> theta_nodes;
    cmat values;        // N_t × Q
    double energy = 0;  // squared horizon norm
};

/// 2 ∫ |∂p + i l p|² over the horizon grid, l = l_± the horizon angular velocity times n.
double horizon_norm(const cmat& values, Horizon which, const GeneratorSet& g);
double horizon_norm(const HorizonProfile& p, const GeneratorSet& g);

HorizonProfile make_profile(const cmat& values, Horizon which, const GeneratorSet& g);

/// 𝓕±: profile ↦ outgoing comparison data of the matching side.
FieldState lift_profile(const HorizonProfile& p, const GeneratorSet& g);
/// Inverse of lift_profile; MembershipError if the side relation fails beyond rel_tol.
HorizonProfile project_profile(const FieldState& u, Horizon which, const GeneratorSet& g, double rel_tol = 1e-6);

struct TraceOptions {
    double t_max = 0;  // 0: causal budget
    double sample_dt = 2.0;
    double tol = 1e-4;
    double cfl = 0.1;
    bool strict = true;
};

struct TraceResult {
    HorizonProfile profile;
    double residual = 0;  // sup-change over the last tenth of the run, relative to the final profile
    double t_final = 0;
    bool stabilized = false;
};

TraceResult extract_trace(const FieldState& u, Horizon which, const GeneratorSet& g, const TraceOptions& o = {});

struct TracePair {
    TraceResult minus, plus;
};
/// Both traces from a single evolution.
TracePair extract_traces(const FieldState& u, const GeneratorSet& g, const TraceOptions& o = {});

/// Cauchy data W(𝓕₋p₋, 𝓕₊p₊) whose traces are the given profiles.
WaveOpResult goursat_solve(const HorizonProfile& p_minus, const HorizonProfile& p_plus, const GeneratorSet& g,
                           const ScatterOptions& o = {});

/// Columns: *t (or t*), θ, Re, Im, nodal in θ.
void write_profile_csv(const HorizonProfile& p, const GeneratorSet& g, std::ostream& os);

} // namespace dsk
