#pragma once

#include "dsk/operators.hpp"

#include <functional>
#include <vector>

namespace dsk {

enum class Generator { Full, InfPlus, InfMinus };

const char* to_string(Generator g);

double cfl_max_dt(const GeneratorSet& g, double c_cfl = 0.4);
double cfl_max_dt(double dx, double c_cfl = 0.4);

/// iH applied to (v0, v1): (i v1, i(h v0 + 2k v1)).
FieldState apply_generator(const FieldState& u, Generator gen, const GeneratorSet& g);

struct EvolveOptions {
    double cfl = 0.4;
    bool guard = true;             // initial support check and running guard-band monitor
    double guard_initial = 1e-10;
    double guard_running = 1e-6;
    double blowup_factor = 1e6;
    int monitor_every = 20;        // steps between norm / guard checks
    NormKind monitor_norm = NormKind::FullInhom;
};

struct NormSample {
    double t;
    double norm;  // sqrt of the monitored quadratic form
};

/// Fixed-step classical RK4 for ∂_t V = iHV over a signed duration.
class Rk4 {
public:
    Rk4(const GeneratorSet& g, Generator gen, double dt);
    void step(FieldState& u) const;
    double dt() const { return dt_; }

private:
    const GeneratorSet& g_;
    Generator gen_;
    double dt_;
};

FieldState evolve(const FieldState& u, double t, Generator gen, const GeneratorSet& g,
                  const EvolveOptions& opt = {}, std::vector<NormSample>* history = nullptr);

/// Steps needed for |t| at the CFL limit, and the resulting step.
int step_count(double t, double dt_max);

/// Throws GridError if |u| exceeds `rel` times its maximum on the outer eighth of the grid.
void check_guard_band(const FieldState& u, double rel, const char* stage);

/// Least-squares fit norm(t) ≈ A e^{B t} over the samples (A, B returned).
std::pair<double, double> fit_growth(const std::vector<NormSample>& s);

} // namespace dsk
