#pragma once

#include "dsk/operators.hpp"

#include <random>

namespace dsk {

struct SampleOptions {
    double center_spread = 4.0;            // centers uniform in [-spread, spread]
    double width_min = 1.5, width_max = 2.5;
    int modes = 2;                         // leading P-modes populated
    int bumps = 2;                         // Gaussians per component and mode
};

/// Support radius at the 1e-14 level for states drawn with these options.
double support_radius(const SampleOptions& o);

/// Complex Gaussian-sum grid function, one column per mode.
cmat random_profile(const GeneratorSet& g, std::mt19937_64& rng, const SampleOptions& o);

/// Random smooth compactly supported state (u0, u1).
FieldState random_state(const GeneratorSet& g, std::mt19937_64& rng, const SampleOptions& o);

} // namespace dsk
