#include "dsk/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace dsk {

double support_radius(const SampleOptions& o) {
    return o.center_spread + std::sqrt(2.0 * std::log(1e14)) * o.width_max;
}

cmat random_profile(const GeneratorSet& g, std::mt19937_64& rng, const SampleOptions& o) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int modes = std::min(o.modes, g.nq);
    cmat f = cmat::Zero(g.nx, g.nq);
    for (int q = 0; q < modes; ++q) {
        for (int b = 0; b < o.bumps; ++b) {
            double xc = o.center_spread * (2 * unit(rng) - 1);
            double w = o.width_min + (o.width_max - o.width_min) * unit(rng);
            double k = 0.6 * (2 * unit(rng) - 1) / w;
            cplx amp = std::polar(0.5 + unit(rng), 2 * M_PI * unit(rng)) / double(q + 1);
            for (int j = 0; j < g.nx; ++j) {
                double s = (g.chart.x[j] - xc) / w;
                f(j, q) += amp * std::exp(-0.5 * s * s) * std::polar(1.0, k * (g.chart.x[j] - xc));
            }
        }
    }
    return f;
}

FieldState random_state(const GeneratorSet& g, std::mt19937_64& rng, const SampleOptions& o) {
    FieldState u;
    u.n = g.params.n;
    u.u0 = random_profile(g, rng, o);
    u.u1 = random_profile(g, rng, o);
    return u;
}

} // namespace dsk
