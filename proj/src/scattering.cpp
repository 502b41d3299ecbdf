#include "dsk/scattering.hpp"
#include "dsk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dsk {

namespace {

double norm_of(const FieldState& u, NormKind k, const GeneratorSet& g) {
    return std::sqrt(std::max(0.0, energy_norm(u, k, g)));
}

EvolveOptions chunk_options(const ScatterOptions& o) {
    EvolveOptions e;
    e.cfl = o.cfl;
    e.guard_initial = e.guard_running;
    e.monitor_every = 1 << 30;
    return e;
}

struct TailCheck {
    double rho = 1, tail = INFINITY;
    bool ok = false;
};

TailCheck geometric_tail(const std::vector<CauchySample>& h, double scale, const ScatterOptions& o) {
    TailCheck c;
    const int w = o.fit_window;
    if (static_cast<int>(h.size()) < w) return c;
    const size_t b = h.size() - w;
    bool all_zero = true;
    for (size_t k = b; k < h.size(); ++k) all_zero = all_zero && h[k].diff == 0;
    if (all_zero) {
        c.rho = 0;
        c.tail = 0;
        c.ok = true;
        return c;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < w; ++k) {
        double y = std::log(std::max(h[b + k].diff, 1e-300));
        sx += k;
        sy += y;
        sxx += double(k) * k;
        sxy += k * y;
    }
    double slope = (w * sxy - sx * sy) / (w * sxx - sx * sx);
    c.rho = std::exp(slope);
    double last = h.back().diff;
    c.tail = c.rho < 1 ? last * c.rho / (1 - c.rho) : INFINITY;
    if (scale > 0) c.tail /= scale;
    c.ok = c.rho < o.rho_max && c.tail < o.tol;
    return c;
}

double history_rate(const std::vector<CauchySample>& h) {
    std::vector<double> t, d;
    for (size_t k = h.size() / 2; k < h.size(); ++k)
        if (h[k].diff > 0) {
            t.push_back(h[k].t);
            d.push_back(h[k].diff);
        }
    if (t.size() < 2) return 0;
    return fit_decay_rate(t, d, 0, static_cast<int>(t.size()));
}

void finish(WaveOpResult& r, const TailCheck& c, const char* what, const ScatterOptions& o) {
    r.rho = c.rho;
    r.tail = c.tail;
    r.converged = c.ok;
    r.rate = history_rate(r.history);
    if (!c.ok && o.strict)
        throw NoConvergence(std::string(what) + ": Cauchy tail " + std::to_string(c.tail) + " (tol " +
                            std::to_string(o.tol) + ") at t=" + std::to_string(r.t_final) +
                            ", fitted rate " + std::to_string(r.rate));
}

double resolve_t_max(double requested, double budget, const char* what) {
    if (requested <= 0) return budget;
    if (requested > budget + 1e-12)
        throw GridError(std::string(what) + ": t_max " + std::to_string(requested) +
                        " exceeds the causal budget " + std::to_string(budget) + " of the grid");
    return requested;
}

int sample_count(double t_max, double dt) { return static_cast<int>(std::floor(t_max / dt + 1e-9)); }

// Comparison flow over time m·dt: exact, or as m RK4 steps of size dt (m < 0: inverse of -m steps).
struct ComparisonFlow {
    const GeneratorSet& g;
    bool discrete;
    double dt;
    FieldState operator()(const FieldState& u, int m, Side s) const {
        return discrete ? comparison_discrete(u, dt, m, s, g) : comparison_evolve(u, m * dt, s, g);
    }
};

void require_grid(const FieldState& u, const GeneratorSet& g) {
    if (u.nx() != g.nx || u.nq() != g.nq || u.u1.rows() != g.nx || u.u1.cols() != g.nq)
        throw ShapeError("state does not match generator grid");
}

bool is_zero(const FieldState& u) { return u.u0.isZero(0) && u.u1.isZero(0); }

} // namespace

double data_radius(const FieldState& u, const RadialChart& c, double rel) {
    double m = std::max(max_abs(u.u0), max_abs(u.u1));
    if (m == 0) return 0;
    double r = 0;
    for (int j = 0; j < u.nx(); ++j)
        for (int q = 0; q < u.nq(); ++q)
            if (std::abs(u.u0(j, q)) > rel * m || std::abs(u.u1(j, q)) > rel * m) r = std::max(r, std::abs(c.x[j]));
    return r;
}

double data_extent(const FieldState& u, const RadialChart& c, Side toward, double rel) {
    double m = std::max(max_abs(u.u0), max_abs(u.u1));
    if (m == 0) return -c.x_max;
    double e = -INFINITY;
    for (int j = 0; j < u.nx(); ++j)
        for (int q = 0; q < u.nq(); ++q)
            if (std::abs(u.u0(j, q)) > rel * m || std::abs(u.u1(j, q)) > rel * m)
                e = std::max(e, toward == Side::Plus ? c.x[j] : -c.x[j]);
    return e;
}

double causal_budget(const GeneratorSet& g, double radius) {
    return std::max(0.0, 0.875 * g.chart.x_max - radius - 2.0);
}

FieldState apply_cutoff(const FieldState& u, Side s, int power, const GeneratorSet& g) {
    const std::vector<double>& i = s == Side::Plus ? g.chart.i_plus : g.chart.i_minus;
    FieldState v = u;
    for (int j = 0; j < u.nx(); ++j) {
        double f = power == 1 ? i[j] : i[j] * i[j];
        v.u0.row(j) *= f;
        v.u1.row(j) *= f;
    }
    return v;
}

double profile_norm(const FieldState& p_minus, const FieldState& p_plus, const GeneratorSet& g) {
    return std::sqrt(std::max(0.0, energy_norm(p_minus, NormKind::TMinus, g)) +
                     std::max(0.0, energy_norm(p_plus, NormKind::TPlus, g)));
}

namespace {

// Shared forward sweep for Ω₋ and Ω₊ from one full evolution.
void omega_sweep(const FieldState& u, const GeneratorSet& g, const ScatterOptions& o, WaveOpResult* rm,
                 WaveOpResult* rp) {
    const double t_max = resolve_t_max(o.t_max, causal_budget(g, data_radius(u, g.chart)), "inverse wave operator");
    const int K = sample_count(t_max, o.sample_dt);
    EvolveOptions eo = chunk_options(o);
    const int m = step_count(o.sample_dt, cfl_max_dt(g, o.cfl));
    const ComparisonFlow flow{g, o.discrete_comparison, o.sample_dt / m};
    check_guard_band(u, 1e-10, "inverse wave operator (initial data)");
    FieldState state = u;
    FieldState fm, fp;
    if (rm) fm = apply_cutoff(u, Side::Minus, o.cutoff_power, g);
    if (rp) fp = apply_cutoff(u, Side::Plus, o.cutoff_power, g);
    TailCheck cm, cp;
    double t = 0;
    for (int k = 1; k <= K; ++k) {
        state = evolve(state, o.sample_dt, Generator::Full, g, eo);
        t = k * o.sample_dt;
        double scale = 0;
        FieldState nm, np;
        double dm = 0, dp = 0, nrm_m = 0, nrm_p = 0;
        if (rm) {
            nm = flow(apply_cutoff(state, Side::Minus, o.cutoff_power, g), -k * m, Side::Minus);
            dm = norm_of(nm - fm, NormKind::TMinus, g);
            nrm_m = norm_of(nm, NormKind::TMinus, g);
            rm->history.push_back({t, dm, nrm_m});
            fm = std::move(nm);
        }
        if (rp) {
            np = flow(apply_cutoff(state, Side::Plus, o.cutoff_power, g), -k * m, Side::Plus);
            dp = norm_of(np - fp, NormKind::TPlus, g);
            nrm_p = norm_of(np, NormKind::TPlus, g);
            rp->history.push_back({t, dp, nrm_p});
            fp = std::move(np);
        }
        scale = std::sqrt(nrm_m * nrm_m + nrm_p * nrm_p);
        if (rm) cm = geometric_tail(rm->history, scale, o);
        if (rp) cp = geometric_tail(rp->history, scale, o);
        bool done = (!rm || cm.ok) && (!rp || cp.ok);
        if (done && o.stop_on_convergence) break;
    }
    if (rm) {
        rm->limit = fm;
        rm->t_final = t;
        finish(*rm, cm, "inverse wave operator (minus)", o);
    }
    if (rp) {
        rp->limit = fp;
        rp->t_final = t;
        finish(*rp, cp, "inverse wave operator (plus)", o);
    }
}

// Shared sweep for direct wave operators; the profile for an absent side is null.
WaveOpResult direct_sweep(const FieldState* pm, const FieldState* pp, const GeneratorSet& g, const ScatterOptions& o) {
    double budget = INFINITY;
    // low tails of an inverse limit are incoming residue and move inward; the running guard polices the rest
    const double lvl = 1e-3;
    if (pm) budget = std::min(budget, causal_budget(g, std::max(0.0, data_extent(*pm, g.chart, Side::Minus, lvl))));
    if (pp) budget = std::min(budget, causal_budget(g, std::max(0.0, data_extent(*pp, g.chart, Side::Plus, lvl))));
    const double t_max = resolve_t_max(o.t_max, budget, "direct wave operator");
    const int K = sample_count(t_max, o.sample_dt);
    EvolveOptions eo = chunk_options(o);
    const int m = step_count(o.sample_dt, cfl_max_dt(g, o.cfl));
    // forward comparison flow as the inverse of backward RK4 steps, so that the backward full evolution undoes it
    const ComparisonFlow flow{g, o.discrete_comparison, -o.sample_dt / m};

    auto phi_at = [&](int k) {
        FieldState f = FieldState::zeros(g.nx, g.nq, g.params.n);
        if (pm) f += apply_cutoff(flow(*pm, -k * m, Side::Minus), Side::Minus, o.cutoff_power, g);
        if (pp) f += apply_cutoff(flow(*pp, -k * m, Side::Plus), Side::Plus, o.cutoff_power, g);
        return f;
    };

    WaveOpResult r;
    FieldState phi = phi_at(0);
    TailCheck c;
    double t = 0;
    for (int k = 1; k <= K; ++k) {
        FieldState next = phi_at(k);
        t = k * o.sample_dt;
        FieldState pulled = evolve(next, -o.sample_dt, Generator::Full, g, eo);
        double d = norm_of(pulled - phi, NormKind::FullHom, g), n = norm_of(next, NormKind::FullHom, g);
        phi = std::move(next);
        r.history.push_back({t, d, n});
        c = geometric_tail(r.history, n, o);
        if (c.ok && o.stop_on_convergence) break;
    }
    r.t_final = t;
    r.limit = t > 0 ? evolve(phi, -t, Generator::Full, g, eo) : phi;
    finish(r, c, "direct wave operator", o);
    return r;
}

} // namespace

WaveOpResult inverse_wave_op(const FieldState& u, Side s, const GeneratorSet& g, const ScatterOptions& o) {
    require_grid(u, g);
    WaveOpResult r;
    if (is_zero(u)) {
        r.limit = u;
        r.converged = true;
        return r;
    }
    if (s == Side::Plus)
        omega_sweep(u, g, o, nullptr, &r);
    else
        omega_sweep(u, g, o, &r, nullptr);
    return r;
}

GlobalOmega global_omega(const FieldState& u, const GeneratorSet& g, const ScatterOptions& o) {
    require_grid(u, g);
    GlobalOmega r;
    if (is_zero(u)) {
        r.minus.limit = r.plus.limit = u;
        r.minus.converged = r.plus.converged = true;
        return r;
    }
    omega_sweep(u, g, o, &r.minus, &r.plus);
    return r;
}

WaveOpResult direct_wave_op(const FieldState& p, Side s, const GeneratorSet& g, const ScatterOptions& o) {
    require_grid(p, g);
    if (is_zero(p)) {
        WaveOpResult r;
        r.limit = p;
        r.converged = true;
        return r;
    }
    return s == Side::Plus ? direct_sweep(nullptr, &p, g, o) : direct_sweep(&p, nullptr, g, o);
}

WaveOpResult global_W(const FieldState& p_minus, const FieldState& p_plus, const GeneratorSet& g,
                      const ScatterOptions& o) {
    require_grid(p_minus, g);
    require_grid(p_plus, g);
    bool zm = is_zero(p_minus), zp = is_zero(p_plus);
    if (zm && zp) {
        WaveOpResult r;
        r.limit = p_plus;
        r.converged = true;
        return r;
    }
    return direct_sweep(zm ? nullptr : &p_minus, zp ? nullptr : &p_plus, g, o);
}

FieldState omega_inf_plus(const FieldState& u, double t, const GeneratorSet& g, double cfl) {
    EvolveOptions eo;
    eo.cfl = cfl;
    FieldState v = evolve(u, t, Generator::Full, g, eo);
    eo.guard_initial = eo.guard_running;
    return evolve(apply_cutoff(v, Side::Plus, 1, g), -t, Generator::InfPlus, g, eo);
}

double s_diagnostic(const FieldState& u, double t_max, const GeneratorSet& g, double sample_dt, double cfl) {
    if (is_zero(u)) return 0;
    EvolveOptions eo;
    eo.cfl = cfl;
    eo.guard_initial = eo.guard_running;
    eo.monitor_every = 1 << 30;
    const int K = sample_count(t_max, sample_dt);
    FieldState v = u;
    double best = 0;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) v = evolve(v, sample_dt, Generator::InfPlus, g, eo);
        if (k * sample_dt >= 0.5 * t_max)
            best = std::max(best, norm_of(apply_cutoff(v, Side::Minus, 1, g), NormKind::InfPlus, g));
    }
    return best;
}

std::vector<PartitionSample> partition_check(const FieldState& u, const std::vector<double>& times,
                                             const GeneratorSet& g, double cfl) {
    EvolveOptions eo;
    eo.cfl = cfl;
    EvolveOptions back = eo;
    back.guard_initial = back.guard_running;
    const double n0 = std::sqrt(l2_sq(u.u0, g.h) + l2_sq(u.u1, g.h));
    std::vector<PartitionSample> out;
    for (double t : times) {
        FieldState v = evolve(u, t, Generator::Full, g, eo);
        FieldState whole = evolve(v, -t, Generator::Full, g, back);
        FieldState parts = evolve(apply_cutoff(v, Side::Minus, 2, g), -t, Generator::Full, g, back) +
                           evolve(apply_cutoff(v, Side::Plus, 2, g), -t, Generator::Full, g, back);
        FieldState d = parts - whole, e = whole - u;
        out.push_back({t, std::sqrt(l2_sq(d.u0, g.h) + l2_sq(d.u1, g.h)) / n0,
                       std::sqrt(l2_sq(e.u0, g.h) + l2_sq(e.u1, g.h)) / n0});
    }
    return out;
}

void write_history_csv(const std::vector<CauchySample>& h, std::ostream& os) {
    os << "t,cauchy_diff,norm\n";
    os.precision(17);
    for (const auto& s : h) os << s.t << ',' << s.diff << ',' << s.norm << '\n';
}

} // namespace dsk
