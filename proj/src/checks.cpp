#include "dsk/checks.hpp"
#include "dsk/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

namespace dsk {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SpacetimeParams physics(double a, int n, double m2 = 0) {
    SpacetimeParams p;
    p.spin = a;
    p.n = n;
    p.m2 = m2;
    return p;
}

std::unique_ptr<GeneratorSet> make_set(const SpacetimeParams& p, double x_max, int nx, int n_theta, int q_max) {
    RadialChart c = build_background(p, x_max, nx);
    AngularBasis b = spectrum_P(assemble_P_n(p, n_theta), q_max);
    return std::make_unique<GeneratorSet>(p, c, b);
}

Eigen::VectorXcd flatten(const FieldState& u) {
    const Eigen::Index m = u.u0.size();
    Eigen::VectorXcd v(2 * m);
    v.head(m) = Eigen::Map<const Eigen::VectorXcd>(u.u0.data(), m);
    v.tail(m) = Eigen::Map<const Eigen::VectorXcd>(u.u1.data(), m);
    return v;
}

FieldState unflatten(const Eigen::VectorXcd& v, int nx, int nq, int n) {
    FieldState u = FieldState::zeros(nx, nq, n);
    const Eigen::Index m = Eigen::Index(nx) * nq;
    u.u0 = Eigen::Map<const cmat>(v.data(), nx, nq);
    u.u1 = Eigen::Map<const cmat>(v.data() + m, nx, nq);
    return u;
}

double enorm(const FieldState& u, NormKind k, const GeneratorSet& g) {
    return std::sqrt(std::max(0.0, energy_norm(u, k, g)));
}

NormKind t_norm(Side s) { return s == Side::Plus ? NormKind::TPlus : NormKind::TMinus; }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

void finish(CheckResult& r, Clock::time_point t0, bool ok) {
    r.seconds = since(t0);
    r.ok = ok;
    r.pass = ok && (r.time_limit <= 0 || r.seconds < r.time_limit);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

SampleOptions suite_options() {
    SampleOptions so;
    so.center_spread = 3.0;
    so.width_min = 1.0;
    so.width_max = 1.5;
    so.modes = 2;
    return so;
}

CheckResult check_geometry() {
    CheckResult r{1, "geometry", false, false, 0, 1.0, "", {}};
    auto t0 = Clock::now();
    RadialChart c = build_background(physics(0.05, 1), 160, 2048);
    const int N = c.size();
    std::vector<double> xs, gaps;
    for (int j = 3 * N / 4; j < N; ++j) {
        xs.push_back(c.x[j]);
        gaps.push_back(c.dp[j]);
    }
    double fit = fit_decay_rate(xs, gaps, 0, static_cast<int>(xs.size()));
    double kerr = rel_err(fit, c.kappa_plus);
    double terr = 0;
    for (int j = 0; j < N; ++j)
        terr = std::max(terr, std::abs(T_of_gaps(c, c.dm[j], c.dp[j]) - c.x[j]) / std::max(1.0, std::abs(c.x[j])));
    r.metrics = {{"kappa_plus", c.kappa_plus}, {"kappa_fit", fit}, {"kappa_rel_err", kerr}, {"T_of_r_err", terr}};
    r.detail = "kappa+ fit rel err " + fmt("%.2e", kerr) + ", max |T(r(x)) - x| " + fmt("%.2e", terr);
    finish(r, t0, kerr < 1e-4 && terr < 1e-10);
    return r;
}

CheckResult check_angular() {
    CheckResult r{2, "angular", false, false, 0, 1.0, "", {}};
    auto t0 = Clock::now();
    double worst = 0;
    for (int n : {0, 1, 2}) {
        AngularBasis b = spectrum_P(assemble_P_n(physics(0, n), 24), 10);
        for (int q = 0; q < b.q_count(); ++q) {
            double l = std::abs(n) + q;
            worst = std::max(worst, std::abs(b.eigenvalues(q) - l * (l + 1)) / (l * (l + 1) + 1));
        }
    }
    r.metrics = {{"max_rel_err", worst}};
    r.detail = "a=0, n=0,1,2: max eigenvalue error vs l(l+1) " + fmt("%.2e", worst);
    finish(r, t0, worst < 1e-8);
    return r;
}

CheckResult check_evolution() {
    CheckResult r{3, "evolution", false, false, 0, 30.0, "", {}};
    auto t0 = Clock::now();
    auto g = make_set(physics(0.05, 0, 0.01), 8, 48, 8, 3);
    std::mt19937_64 rng(17);
    SampleOptions so;
    so.center_spread = 1;
    so.width_min = 0.8;
    so.width_max = 1.2;
    so.modes = 3;
    FieldState u = random_state(*g, rng, so);
    const Eigen::Index dim = 2 * Eigen::Index(g->nx) * g->nq;
    Eigen::MatrixXcd M(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
        e(i) = 1;
        M.col(i) = flatten(apply_generator(unflatten(e, g->nx, g->nq, g->params.n), Generator::Full, *g));
    }
    const double t = 1.0;
    FieldState exact = unflatten((M * t).exp() * flatten(u), g->nx, g->nq, g->params.n);
    const double ne = enorm(exact, NormKind::FullInhom, *g);
    auto run = [&](int steps) {
        Rk4 rk(*g, Generator::Full, t / steps);
        FieldState v = u;
        for (int s = 0; s < steps; ++s) rk.step(v);
        return enorm(v - exact, NormKind::FullInhom, *g) / ne;
    };
    EvolveOptions eo;
    eo.cfl = 0.1;
    eo.guard = false;
    double err = enorm(evolve(u, t, Generator::Full, *g, eo) - exact, NormKind::FullInhom, *g) / ne;
    double e1 = run(20), e2 = run(40), e3 = run(80);
    double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    r.metrics = {{"rel_err", err}, {"order_20_40", o1}, {"order_40_80", o2}};
    r.detail = "RK4 vs expm rel err " + fmt("%.2e", err) + ", observed order " + fmt("%.2f", o1) + ", " +
               fmt("%.2f", o2);
    finish(r, t0, err < 1e-6 && std::abs(o1 - 4) < 0.3 && std::abs(o2 - 4) < 0.3);
    return r;
}

CheckResult check_transport() {
    CheckResult r{4, "transport", false, false, 0, 10.0, "", {}};
    auto t0 = Clock::now();
    auto g = make_set(physics(0.05, 1), 60, 512, 10, 3);
    std::mt19937_64 rng(4);
    SampleOptions so = suite_options();
    double unit = 0, group = 0, psi = 0, pyth = 0;
    for (TransportKind k : {TransportKind::WPlus, TransportKind::WTildeMinus, TransportKind::WMinus,
                            TransportKind::WTildePlus}) {
        cmat f = random_profile(*g, rng, so);
        double nf = std::sqrt(l2_sq(f, g->h));
        cmat a = exact_transport(f, 7.5, k, *g);
        unit = std::max(unit, std::abs(std::sqrt(l2_sq(a, g->h)) / nf - 1));
        cmat b = exact_transport(exact_transport(f, 3.0, k, *g), 4.5, k, *g);
        group = std::max(group, std::sqrt(l2_sq(a - b, g->h)) / nf);
    }
    for (Side s : {Side::Plus, Side::Minus}) {
        FieldState u = make_admissible(random_state(*g, rng, so), s, *g).state;
        double p0 = std::sqrt(l2_sq(psi_functional(u, s, *g), g->h));
        for (double t : {-5.0, 4.0, 11.0}) {
            FieldState v = kirchhoff_evolve(u, t, s, *g);
            psi = std::max(psi, std::abs(std::sqrt(l2_sq(psi_functional(v, s, *g), g->h)) - p0) / p0);
        }
        LeftRightSplit sp = split_left_right(u, s, *g);
        double e = energy_norm(u, t_norm(s), *g);
        pyth = std::max(pyth, rel_err(energy_norm(sp.left, t_norm(s), *g) + energy_norm(sp.right, t_norm(s), *g), e));
    }
    r.metrics = {{"unitarity", unit}, {"group_law", group}, {"psi_invariance", psi}, {"pythagoras", pyth}};
    r.detail = "unitarity " + fmt("%.1e", unit) + ", group law " + fmt("%.1e", group) + ", Psi drift " +
               fmt("%.1e", psi) + ", Pythagoras " + fmt("%.1e", pyth);
    finish(r, t0, unit < 1e-12 && group < 1e-10 && psi < 1e-10 && pyth < 1e-10);
    return r;
}

CheckResult check_wave_operator_rate() {
    CheckResult r{5, "wave-operator convergence", false, false, 0, 120.0, "", {}};
    auto t0 = Clock::now();
    SpacetimeParams p = physics(0, 1);
    RadialChart probe = build_background(p, 40, 256);
    const double kp = probe.kappa_plus, w = 1.0;
    const double R = w * std::sqrt(2 * std::log(1e10));
    const double t_max = 4 * R + 20 / kp;
    const double x_max = std::ceil((R + t_max + 4) / 0.875);
    const int nx = 2 * static_cast<int>(std::ceil(x_max / 0.3125));
    auto g = make_set(p, x_max, nx, 10, 3);
    FieldState u = FieldState::zeros(g->nx, g->nq, 1);
    for (int j = 0; j < g->nx; ++j) u.u0(j, 0) = std::exp(-0.5 * std::pow(g->chart.x[j] / w, 2));
    ScatterOptions o;
    o.tol = 1e-6;
    o.t_max = std::floor(t_max / o.sample_dt) * o.sample_dt;
    o.strict = false;
    o.stop_on_convergence = false;
    WaveOpResult res = inverse_wave_op(u, Side::Plus, *g, o);
    double ratio = res.rate / kp;
    r.metrics = {{"kappa_plus", kp},   {"fitted_rate", res.rate}, {"rate_over_kappa", ratio},
                 {"t_max", o.t_max},   {"R", R},                  {"tail", res.tail},
                 {"converged", double(res.converged)}};
    r.detail = "fitted rate " + fmt("%.4f", res.rate) + " = " + fmt("%.3f", ratio) + " kappa+ (need 0.75..1.25); " +
               (res.converged ? "converged" : "not converged") + " at tol 1e-6 by t_max " + fmt("%.1f", o.t_max) +
               " (tail " + fmt("%.1e", res.tail) + ")";
    finish(r, t0, std::abs(ratio - 1) <= 0.25 && res.converged);
    return r;
}

SuiteRun run_suite(const CheckSettings& s, const ScatterGrid& grid, bool traces) {
    SuiteRun out;
    auto g = make_set(s.physics, grid.x_max, grid.n_x, s.n_theta, s.q_max);
    ScatterOptions o;
    o.tol = grid.tol;
    o.cfl = s.cfl;
    o.sample_dt = s.sample_dt;
    o.strict = false;
    TraceOptions to;
    to.tol = grid.tol;
    to.cfl = s.cfl;
    to.sample_dt = s.sample_dt;
    to.strict = false;
    std::mt19937_64 rng(s.seed);
    const SampleOptions so = suite_options();
    out.c_lower = INFINITY;
    auto note = [&](bool ok, const std::string& what) {
        if (!ok && out.failure.empty()) out.failure = what;
        out.converged = out.converged && ok;
    };

    for (int i = 0; i < s.suite_size; ++i) {
        FieldState u = random_state(*g, rng, so);
        cmat fm = random_profile(*g, rng, so), fp = random_profile(*g, rng, so);
        auto t0 = Clock::now();
        const double nu = enorm(u, NormKind::FullHom, *g);

        GlobalOmega om = global_omega(u, *g, o);
        note(om.minus.converged && om.plus.converged, "Omega did not converge on state " + std::to_string(i));
        double a = enorm(om.minus.limit, NormKind::TMinus, *g), b = enorm(om.plus.limit, NormKind::TPlus, *g);
        out.energy_constant = std::max(out.energy_constant, nu / (a + b));
        out.bound_constant = std::max(out.bound_constant, (a + b) / nu);
        out.max_psi = std::max(out.max_psi, std::sqrt(l2_sq(psi_functional(om.plus.limit, Side::Plus, *g), g->h)) / b);
        out.max_psi = std::max(out.max_psi, std::sqrt(l2_sq(psi_functional(om.minus.limit, Side::Minus, *g), g->h)) / a);
        WaveOpResult w = global_W(om.minus.limit, om.plus.limit, *g, o);
        note(w.converged, "W did not converge on state " + std::to_string(i));
        out.max_w_omega = std::max(out.max_w_omega, enorm(w.limit - u, NormKind::FullHom, *g) / nu);

        FieldState pm = outgoing_state(fm, Side::Minus, *g), pp = outgoing_state(fp, Side::Plus, *g);
        WaveOpResult wp = global_W(pm, pp, *g, o);
        note(wp.converged, "W did not converge on profile " + std::to_string(i));
        GlobalOmega back = global_omega(wp.limit, *g, o);
        note(back.minus.converged && back.plus.converged, "Omega did not converge on W(profile) " + std::to_string(i));
        out.max_omega_w = std::max(out.max_omega_w, profile_norm(back.minus.limit - pm, back.plus.limit - pp, *g) /
                                                        profile_norm(pm, pp, *g));
        out.seconds += since(t0);

        if (!traces) continue;
        auto t1 = Clock::now();
        TracePair tr = extract_traces(u, *g, to);
        note(tr.minus.stabilized && tr.plus.stabilized, "trace did not stabilize on state " + std::to_string(i));
        for (Side side : {Side::Plus, Side::Minus}) {
            const TraceResult& t = side == Side::Plus ? tr.plus : tr.minus;
            const FieldState& lim = side == Side::Plus ? om.plus.limit : om.minus.limit;
            double gap = enorm(lift_profile(t.profile, *g) - lim, t_norm(side), *g) / enorm(lim, t_norm(side), *g);
            out.max_trace_gap = std::max(out.max_trace_gap, gap);
        }
        double traces_norm = std::sqrt(tr.minus.profile.energy) + std::sqrt(tr.plus.profile.energy);
        out.c_lower = std::min(out.c_lower, traces_norm / nu);
        out.c_upper = std::max(out.c_upper, traces_norm / nu);
        WaveOpResult rec = goursat_solve(tr.minus.profile, tr.plus.profile, *g, o);
        note(rec.converged, "Goursat solve did not converge on state " + std::to_string(i));
        out.max_goursat = std::max(out.max_goursat, enorm(rec.limit - u, NormKind::FullHom, *g) / nu);
        out.trace_seconds += since(t1);
    }
    return out;
}

namespace {

std::string grid_note(const char* what, double b, double f) {
    return std::string(what) + " " + fmt("%.2e", b) + " -> " + fmt("%.2e", f);
}

} // namespace

CheckResult check_inversion(const SuiteRun& base, const SuiteRun& fine) {
    CheckResult r{6, "inversion", false, false, base.seconds + fine.seconds, 900.0, "", {}};
    r.metrics = {{"w_omega_base", base.max_w_omega},       {"w_omega_fine", fine.max_w_omega},
                 {"omega_w_base", base.max_omega_w},       {"omega_w_fine", fine.max_omega_w},
                 {"energy_constant_base", base.energy_constant}, {"energy_constant_fine", fine.energy_constant},
                 {"bound_constant_base", base.bound_constant},   {"bound_constant_fine", fine.bound_constant}};
    bool ok = base.converged && fine.converged && base.max_w_omega < 1e-3 && fine.max_w_omega < 1e-3 &&
              base.max_omega_w < 1e-3 && fine.max_omega_w < 1e-3 && fine.max_w_omega < base.max_w_omega &&
              fine.max_omega_w < base.max_omega_w;
    r.detail = grid_note("max |WOu-u|/|u|", base.max_w_omega, fine.max_w_omega) + "; " +
               grid_note("max |OWp-p|/|p|", base.max_omega_w, fine.max_omega_w);
    if (!base.failure.empty()) r.detail += "; base: " + base.failure;
    if (!fine.failure.empty()) r.detail += "; fine: " + fine.failure;
    r.ok = ok;
    r.pass = ok && r.seconds < r.time_limit;
    return r;
}

CheckResult check_membership(const SuiteRun& fine, const CheckSettings& s) {
    CheckResult r{7, "range membership", false, false, 0, 0, "", {}};
    auto t0 = Clock::now();
    auto g = make_set(s.physics, s.s_x_max, s.s_n_x, s.n_theta, s.q_max);
    std::mt19937_64 rng(s.seed + 1000);
    FieldState u = random_state(*g, rng, suite_options());
    FieldState v = omega_inf_plus(u, s.s_push, *g, s.cfl);
    double nv = enorm(v, NormKind::InfPlus, *g);
    double s_mid = s_diagnostic(v, 1.5 * s.s_push, *g, 1.0, s.cfl) / nv;
    double s_end = s_diagnostic(v, 2 * s.s_push, *g, 1.0, s.cfl) / nv;
    r.metrics = {{"max_psi_ratio", fine.max_psi}, {"s_diag_mid", s_mid}, {"s_diag", s_end}};
    r.detail = "max |Psi(O+-u)|/|O+-u| " + fmt("%.2e", fine.max_psi) + ", S/|v| " + fmt("%.2e", s_mid) + " -> " +
               fmt("%.2e", s_end) + " (push t=" + fmt("%.0f", s.s_push) + ")";
    finish(r, t0, fine.max_psi < 1e-3 && s_end < 1e-3 && s_end <= s_mid);
    return r;
}

CheckResult check_goursat(const SuiteRun& base, const SuiteRun& fine) {
    CheckResult r{8, "Goursat problem", false, false, base.trace_seconds + fine.trace_seconds, 1200.0, "", {}};
    double dc = rel_err(fine.c_lower, base.c_lower), dC = rel_err(fine.c_upper, base.c_upper);
    r.metrics = {{"trace_gap_base", base.max_trace_gap}, {"trace_gap_fine", fine.max_trace_gap},
                 {"goursat_base", base.max_goursat},     {"goursat_fine", fine.max_goursat},
                 {"c_base", base.c_lower},               {"c_fine", fine.c_lower},
                 {"C_base", base.c_upper},               {"C_fine", fine.c_upper}};
    bool ok = base.converged && fine.converged && base.max_trace_gap < 1e-3 && fine.max_trace_gap < 1e-3 &&
              base.max_goursat < 1e-3 && fine.max_goursat < 1e-3 && dc < 0.2 && dC < 0.2;
    r.detail = grid_note("max |FTu-Ou|/|Ou|", base.max_trace_gap, fine.max_trace_gap) + "; " +
               grid_note("max Goursat err", base.max_goursat, fine.max_goursat) + "; c " +
               fmt("%.4f", base.c_lower) + "/" + fmt("%.4f", fine.c_lower) + ", C " + fmt("%.4f", base.c_upper) +
               "/" + fmt("%.4f", fine.c_upper);
    r.ok = ok;
    r.pass = ok && r.seconds < r.time_limit;
    return r;
}

CheckResult check_hardy(std::uint64_t seed) {
    CheckResult r{9, "Hardy inequality", false, false, 0, 5.0, "", {}};
    auto t0 = Clock::now();
    SpacetimeParams p = physics(0.05, 1);
    struct Bump {
        double xc, w, k;
        cplx amp;
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0, 1);
    std::vector<std::vector<Bump>> funcs(100);
    for (auto& f : funcs) {
        int nb = 1 + static_cast<int>(3 * unit(rng));
        for (int b = 0; b < nb; ++b)
            f.push_back({40 * (2 * unit(rng) - 1), 0.5 + 7.5 * unit(rng), 2 * (2 * unit(rng) - 1),
                         std::polar(0.2 + unit(rng), 2 * M_PI * unit(rng))});
    }
    auto fitted = [&](int nx, double& bound) {
        RadialChart c = build_background(p, 120, nx);
        double q2 = 0;
        for (int j = 0; j < c.size(); ++j) q2 += c.h * c.q[j] * c.q[j] * (1 + std::abs(c.x[j]));
        bound = std::sqrt(3 * q2);
        double worst = 0;
        for (const auto& f : funcs) {
            double qu = 0, du = 0, loc = 0;
            for (int j = 0; j < c.size(); ++j) {
                const double x = c.x[j];
                cplx u = 0, d = 0;
                for (const Bump& b : f) {
                    double s = (x - b.xc) / b.w;
                    cplx e = b.amp * std::exp(-0.5 * s * s) * std::polar(1.0, b.k * (x - b.xc));
                    u += e;
                    d += e * cplx(-s / b.w, b.k);
                }
                qu += c.h * std::norm(c.q[j] * u);
                du += c.h * std::norm(d);
                if (std::abs(x) <= 1) loc += c.h * std::norm(u);
            }
            worst = std::max(worst, std::sqrt(qu) / (std::sqrt(du) + std::sqrt(loc)));
        }
        return worst;
    };
    double b1 = 0, b2 = 0;
    double c1 = fitted(1024, b1), c2 = fitted(2048, b2);
    double drift = rel_err(c2, c1);
    r.metrics = {{"C_coarse", c1}, {"C_fine", c2}, {"C_bound", b2}, {"refinement_drift", drift}};
    r.detail = "fitted C " + fmt("%.4f", c1) + " / " + fmt("%.4f", c2) + " (refined), bound " + fmt("%.3f", b2) +
               ", drift " + fmt("%.1e", drift);
    finish(r, t0, c1 <= b1 && c2 <= b2 && drift < 0.2);
    return r;
}

CheckResult check_negative_control() {
    CheckResult r{10, "negative control", false, false, 0, 1.0, "", {}};
    auto t0 = Clock::now();
    auto fails = [](const SpacetimeParams& p) {
        try {
            build_background(p, 40, 256);
        } catch (const NoHorizonGap&) {
            return true;
        } catch (const Error&) {
            return false;
        }
        return false;
    };
    SpacetimeParams heavy = physics(0, 1);
    heavy.lambda_c = 1.0 / 9.0 + 1e-3;
    SpacetimeParams edge = heavy;
    edge.lambda_c = 1.0 / 9.0;
    SpacetimeParams spin = physics(2.0, 1);
    bool a = fails(heavy), b = fails(edge), c = fails(spin);
    r.metrics = {{"heavy", double(a)}, {"extremal", double(b)}, {"large_a", double(c)}};
    r.detail = std::string("9*Lambda*M^2 > 1: ") + (a ? "NoHorizonGap" : "accepted") +
               ", = 1: " + (b ? "NoHorizonGap" : "accepted") + ", a = 2: " + (c ? "NoHorizonGap" : "accepted");
    finish(r, t0, a && b && c);
    return r;
}

std::string format_line(const CheckResult& r) {
    std::ostringstream os;
    os << (r.pass ? "PASS" : "FAIL") << "  criterion " << r.id << " (" << r.name << "): " << r.detail << " ["
       << fmt("%.1f", r.seconds) << " s";
    if (r.time_limit > 0) os << ", limit " << fmt("%.0f", r.time_limit) << " s";
    os << "]";
    return os.str();
}

} // namespace dsk
