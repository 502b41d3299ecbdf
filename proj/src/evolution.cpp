#include "dsk/evolution.hpp"
#include "dsk/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dsk {

const char* to_string(Generator g) {
    switch (g) {
    case Generator::Full: return "full";
    case Generator::InfPlus: return "inf_plus";
    case Generator::InfMinus: return "inf_minus";
    }
    return "?";
}

double cfl_max_dt(double dx, double c_cfl) { return c_cfl * dx; }
double cfl_max_dt(const GeneratorSet& g, double c_cfl) { return cfl_max_dt(g.h, c_cfl); }

FieldState apply_generator(const FieldState& u, Generator gen, const GeneratorSet& g) {
    const cplx I(0, 1);
    FieldState out;
    out.n = u.n;
    out.u0 = I * u.u1;
    switch (gen) {
    case Generator::Full:
        out.u1 = I * (g.apply_h(u.u0) + 2.0 * g.apply_k(u.u1));
        break;
    case Generator::InfPlus:
    case Generator::InfMinus: {
        Side s = gen == Generator::InfPlus ? Side::Plus : Side::Minus;
        out.u1 = I * (g.apply_h_inf(u.u0, s) - 2.0 * g.l_side(s) * u.u1);
        break;
    }
    }
    return out;
}

Rk4::Rk4(const GeneratorSet& g, Generator gen, double dt) : g_(g), gen_(gen), dt_(dt) {}

void Rk4::step(FieldState& u) const {
    const double dt = dt_;
    FieldState k = apply_generator(u, gen_, g_);
    cmat a0 = k.u0, a1 = k.u1;
    FieldState tmp{u.u0 + (0.5 * dt) * k.u0, u.u1 + (0.5 * dt) * k.u1, u.n};
    k = apply_generator(tmp, gen_, g_);
    a0 += 2.0 * k.u0;
    a1 += 2.0 * k.u1;
    tmp.u0 = u.u0 + (0.5 * dt) * k.u0;
    tmp.u1 = u.u1 + (0.5 * dt) * k.u1;
    k = apply_generator(tmp, gen_, g_);
    a0 += 2.0 * k.u0;
    a1 += 2.0 * k.u1;
    tmp.u0 = u.u0 + dt * k.u0;
    tmp.u1 = u.u1 + dt * k.u1;
    k = apply_generator(tmp, gen_, g_);
    u.u0 += (dt / 6.0) * (a0 + k.u0);
    u.u1 += (dt / 6.0) * (a1 + k.u1);
}

int step_count(double t, double dt_max) {
    if (t == 0) return 0;
    return std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt_max - 1e-9)));
}

void check_guard_band(const FieldState& u, double rel, const char* stage) {
    const int N = u.nx(), band = std::max(1, N / 16);
    double inner = std::max(max_abs(u.u0), max_abs(u.u1));
    if (inner == 0) return;
    double outer = 0;
    for (int q = 0; q < u.nq(); ++q)
        for (int j = 0; j < N; ++j) {
            if (j >= band && j < N - band) continue;
            outer = std::max({outer, std::abs(u.u0(j, q)), std::abs(u.u1(j, q))});
        }
    if (outer > rel * inner)
        throw GridError(std::string(stage) + ": field reaches the guard band (relative amplitude " +
                        std::to_string(outer / inner) + ")");
}

FieldState evolve(const FieldState& u, double t, Generator gen, const GeneratorSet& g, const EvolveOptions& opt,
                  std::vector<NormSample>* history) {
    if (u.nx() != g.nx || u.nq() != g.nq) throw ShapeError("state does not match generator grid");
    if (opt.guard) check_guard_band(u, opt.guard_initial, "evolve (initial data)");
    const int steps = step_count(t, cfl_max_dt(g, opt.cfl));
    if (steps == 0) return u;
    const double dt = t / steps;
    NormKind nk = opt.monitor_norm;
    if (gen == Generator::InfPlus) nk = NormKind::InfPlus;
    if (gen == Generator::InfMinus) nk = NormKind::InfMinus;
    const double n0 = std::sqrt(std::max(0.0, energy_norm(u, nk, g)));
    if (history) history->push_back({0.0, n0});
    Rk4 rk(g, gen, dt);
    FieldState v = u;
    for (int s = 1; s <= steps; ++s) {
        rk.step(v);
        if (s % opt.monitor_every == 0 || s == steps) {
            double nrm = std::sqrt(std::max(0.0, energy_norm(v, nk, g)));
            if (!std::isfinite(nrm) || (n0 > 0 && nrm > opt.blowup_factor * n0))
                throw BlowupError("norm grew from " + std::to_string(n0) + " to " + std::to_string(nrm) +
                                  " at t=" + std::to_string(s * dt));
            if (history) history->push_back({s * dt, nrm});
            if (opt.guard) check_guard_band(v, opt.guard_running, "evolve");
        }
    }
    return v;
}

std::pair<double, double> fit_growth(const std::vector<NormSample>& s) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    int n = 0;
    for (const auto& p : s) {
        if (!(p.norm > 0)) continue;
        double y = std::log(p.norm);
        st += p.t;
        sy += y;
        stt += p.t * p.t;
        sty += p.t * y;
        ++n;
    }
    if (n < 2) return {n ? std::exp(sy) : 0.0, 0.0};
    double den = n * stt - st * st;
    double B = den != 0 ? (n * sty - st * sy) / den : 0.0;
    double A = std::exp((sy - B * st) / n);
    return {A, B};
}

} // namespace dsk
