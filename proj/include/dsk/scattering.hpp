#pragma once

#include "dsk/evolution.hpp"
#include "dsk/transport.hpp"

#include <iosfwd>
#include <vector>

namespace dsk {

struct ScatterOptions {
    double t_max = 0;          // 0: the causal budget of the grid for the given data
    double tol = 1e-6;         // relative to the norm of the current iterate
    double sample_dt = 2.0;
    int fit_window = 5;
    double rho_max = 0.95;
    double cfl = 0.1;
    int cutoff_power = 2;
    bool discrete_comparison = true;  // pull back with the RK4 step of H_{T,s} instead of the exact flow
    bool strict = true;        // throw NoConvergence instead of returning converged = false
    bool stop_on_convergence = true;
};

struct CauchySample {
    double t;
    double diff;  // norm of the difference to the previous iterate
    double norm;  // norm of the current iterate
};

struct WaveOpResult {
    FieldState limit;
    std::vector<CauchySample> history;
    bool converged = false;
    double t_final = 0;
    double rho = 0;   // fitted per-sample ratio of the last differences
    double tail = 0;  // projected geometric tail, relative
    double rate = 0;  // fitted exponential rate of the differences over the second half
};

/// Largest |x| (or one-sided extent) where the state exceeds rel times its maximum.
double data_radius(const FieldState& u, const RadialChart& c, double rel = 1e-10);
double data_extent(const FieldState& u, const RadialChart& c, Side toward, double rel = 1e-10);
/// Longest evolution time before data of the given radius reaches the guard band.
double causal_budget(const GeneratorSet& g, double radius);

FieldState apply_cutoff(const FieldState& u, Side s, int power, const GeneratorSet& g);

/// Ω_{T,s}u = lim e^{-itH_{T,s}} i_s^p e^{itH} u.
WaveOpResult inverse_wave_op(const FieldState& u, Side s, const GeneratorSet& g, const ScatterOptions& o = {});
/// W_{T,s}φ = lim e^{-itH} i_s^p e^{itH_{T,s}} φ.
WaveOpResult direct_wave_op(const FieldState& p, Side s, const GeneratorSet& g, const ScatterOptions& o = {});

struct GlobalOmega {
    WaveOpResult minus, plus;
};
GlobalOmega global_omega(const FieldState& u, const GeneratorSet& g, const ScatterOptions& o = {});
/// W(u^l, u^r) = W_{T,-}u^l + W_{T,+}u^r, computed as one limit.
WaveOpResult global_W(const FieldState& p_minus, const FieldState& p_plus, const GeneratorSet& g,
                      const ScatterOptions& o = {});

/// Norm of Ω u in the profile space: sqrt(‖Ω₋u‖²_{T,-} + ‖Ω₊u‖²_{T,+}).
double profile_norm(const FieldState& p_minus, const FieldState& p_plus, const GeneratorSet& g);

/// e^{-itH_{+∞}} i₊ e^{itH} u.
FieldState omega_inf_plus(const FieldState& u, double t, const GeneratorSet& g, double cfl = 0.4);
/// max over the second half of [0, t_max] of ‖i₋ e^{itH_{+∞}} u‖_{+∞}.
double s_diagnostic(const FieldState& u, double t_max, const GeneratorSet& g, double sample_dt = 1.0,
                    double cfl = 0.4);

struct PartitionSample {
    double t;
    double defect;    // ‖E(-t)i₋²E(t)u + E(-t)i₊²E(t)u - E(-t)E(t)u‖ / ‖u‖
    double reversal;  // ‖E(-t)E(t)u - u‖ / ‖u‖
};
std::vector<PartitionSample> partition_check(const FieldState& u, const std::vector<double>& times,
                                             const GeneratorSet& g, double cfl = 0.4);

void write_history_csv(const std::vector<CauchySample>& h, std::ostream& os);

} // namespace dsk
