#include "dsk/horizons.hpp"
#include "dsk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dsk {

const char* to_string(Horizon h) { return h == Horizon::FuturePlus ? "future_plus" : "future_minus"; }

Side side_of(Horizon h) { return h == Horizon::FuturePlus ? Side::Plus : Side::Minus; }

namespace {

// Plus: *t = -x, so the profile is the frame value read backwards. Minus: t* = x.
cmat reindex(const cmat& v, Horizon which) {
    if (which == Horizon::FutureMinus) return v;
    return v.colwise().reverse();
}

void require_rows(const cmat& v, const GeneratorSet& g) {
    if (v.rows() != g.nx || v.cols() != g.nq) throw ShapeError("profile does not match generator grid");
}

TransportKind transport_of(Side s) { return s == Side::Plus ? TransportKind::WPlus : TransportKind::WMinus; }

} // namespace

double horizon_norm(const cmat& values, Horizon which, const GeneratorSet& g) {
    require_rows(values, g);
    const double l = g.l_side(side_of(which));
    cmat d = g.derivative(values) + cplx(0, l) * values;
    return 2.0 * l2_sq(d, g.h);
}

double horizon_norm(const HorizonProfile& p, const GeneratorSet& g) { return horizon_norm(p.values, p.which, g); }

HorizonProfile make_profile(const cmat& values, Horizon which, const GeneratorSet& g) {
    require_rows(values, g);
    HorizonProfile p;
    p.which = which;
    p.t_nodes = g.chart.x;
    p.theta_nodes = g.basis.theta;
    p.values = values;
    p.energy = horizon_norm(values, which, g);
    return p;
}

FieldState lift_profile(const HorizonProfile& p, const GeneratorSet& g) {
    require_rows(p.values, g);
    Side s = side_of(p.which);
    return outgoing_state(g.from_frame(reindex(p.values, p.which), s), s, g);
}

HorizonProfile project_profile(const FieldState& u, Horizon which, const GeneratorSet& g, double rel_tol) {
    require_rows(u.u0, g);
    Side s = side_of(which);
    NormKind k = s == Side::Plus ? NormKind::TPlus : NormKind::TMinus;
    double nu = std::sqrt(std::max(0.0, energy_norm(u, k, g)));
    double psi = std::sqrt(l2_sq(psi_functional(u, s, g), g.h));
    if (psi > rel_tol * nu)
        throw MembershipError(std::string("state is not outgoing for ") + to_string(s) + " (relative defect " +
                              std::to_string(nu > 0 ? psi / nu : psi) + ")");
    return make_profile(reindex(g.to_frame(u.u0, s), which), which, g);
}

namespace {

struct TraceSweep {
    Horizon which;
    std::vector<std::pair<double, cmat>> late;
    cmat current;
};

void finish_trace(TraceResult& r, TraceSweep& w, double t_final, const GeneratorSet& g, const TraceOptions& o) {
    r.t_final = t_final;
    const double scale = max_abs(w.current);
    double res = 0;
    for (const auto& tf : w.late) res = std::max(res, max_abs(tf.second - w.current));
    r.residual = scale > 0 ? res / scale : 0;
    r.stabilized = r.residual < o.tol;
    r.profile = make_profile(reindex(g.to_frame(w.current, side_of(w.which)), w.which), w.which, g);
    if (!r.stabilized && o.strict)
        throw NoStabilization(std::string(to_string(w.which)) + " trace still changes by " +
                              std::to_string(r.residual) + " late in the run to t=" + std::to_string(t_final) +
                              " (tol " + std::to_string(o.tol) + ")");
}

void trace_sweep(const FieldState& u, const GeneratorSet& g, const TraceOptions& o, TraceResult* rm,
                 TraceResult* rp) {
    if (u.nx() != g.nx || u.nq() != g.nq) throw ShapeError("state does not match generator grid");
    const double budget = causal_budget(g, data_radius(u, g.chart));
    double t_max = o.t_max <= 0 ? budget : o.t_max;
    if (t_max > budget + 1e-12)
        throw GridError("trace extraction: t_max " + std::to_string(t_max) + " exceeds the causal budget " +
                        std::to_string(budget));
    const int K = static_cast<int>(std::floor(t_max / o.sample_dt + 1e-9));
    const double t_end = K * o.sample_dt;
    // the window always holds the previous sample
    const double t_late = t_end - std::max(0.1 * t_end, o.sample_dt) - 1e-9;

    TraceSweep wm{Horizon::FutureMinus, {}, {}}, wp{Horizon::FuturePlus, {}, {}};
    auto sample = [&](TraceSweep& w, const FieldState& state, double t) {
        Side s = side_of(w.which);
        w.current = exact_transport(apply_cutoff(state, s, 1, g).u0, -t, transport_of(s), g);
        if (t >= t_late) w.late.emplace_back(t, w.current);
    };

    check_guard_band(u, 1e-10, "trace extraction (initial data)");
    EvolveOptions eo;
    eo.cfl = o.cfl;
    eo.guard_initial = eo.guard_running;
    eo.monitor_every = 1 << 30;
    FieldState state = u;
    if (rm) sample(wm, state, 0);
    if (rp) sample(wp, state, 0);
    for (int k = 1; k <= K; ++k) {
        state = evolve(state, o.sample_dt, Generator::Full, g, eo);
        if (rm) sample(wm, state, k * o.sample_dt);
        if (rp) sample(wp, state, k * o.sample_dt);
    }
    if (rm) finish_trace(*rm, wm, t_end, g, o);
    if (rp) finish_trace(*rp, wp, t_end, g, o);
}

} // namespace

TraceResult extract_trace(const FieldState& u, Horizon which, const GeneratorSet& g, const TraceOptions& o) {
    TraceResult r;
    if (which == Horizon::FuturePlus)
        trace_sweep(u, g, o, nullptr, &r);
    else
        trace_sweep(u, g, o, &r, nullptr);
    return r;
}

TracePair extract_traces(const FieldState& u, const GeneratorSet& g, const TraceOptions& o) {
    TracePair r;
    trace_sweep(u, g, o, &r.minus, &r.plus);
    return r;
}

WaveOpResult goursat_solve(const HorizonProfile& p_minus, const HorizonProfile& p_plus, const GeneratorSet& g,
                           const ScatterOptions& o) {
    if (p_minus.which != Horizon::FutureMinus || p_plus.which != Horizon::FuturePlus)
        throw ShapeError("goursat_solve expects (future_minus, future_plus) profiles");
    return global_W(lift_profile(p_minus, g), lift_profile(p_plus, g), g, o);
}

void write_profile_csv(const HorizonProfile& p, const GeneratorSet& g, std::ostream& os) {
    cmat nodal = modal_to_nodal(p.values, g.basis);
    os << (p.which == Horizon::FuturePlus ? "star_t" : "t_star") << ",theta,re,im\n";
    os.precision(17);
    for (size_t j = 0; j < p.t_nodes.size(); ++j)
        for (Eigen::Index i = 0; i < nodal.cols(); ++i)
            os << p.t_nodes[j] << ',' << p.theta_nodes[size_t(i)] << ',' << nodal(Eigen::Index(j), i).real() << ','
               << nodal(Eigen::Index(j), i).imag() << '\n';
}

} // namespace dsk
