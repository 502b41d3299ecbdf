#include "dsk/checks.hpp"
#include "dsk/config.hpp"
#include "dsk/evolution.hpp"
#include "dsk/geometry.hpp"
#include "dsk/scattering.hpp"
#include "dsk/errors.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <set>

using namespace dsk;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    Config cfg;
    fs::path out;
    std::string command;
    json results = json::object();
};

std::ofstream open_out(const Run& r, const std::string& name) {
    std::ofstream f(r.out / name);
    if (!f) throw ConfigError("cannot write " + (r.out / name).string());
    return f;
}

double data_radius_hint() { return support_radius(suite_options()); }

std::unique_ptr<GeneratorSet> generators(const Config& c) {
    RadialChart chart = build_background(c.physics, c.resolved_x_max(data_radius_hint()), c.grid.n_x, c.grid.window);
    AngularBasis b = spectrum_P(assemble_P_n(c.physics, c.grid.n_theta), c.grid.q_max);
    return std::make_unique<GeneratorSet>(c.physics, chart, b);
}

ScatterOptions scatter_options(const Config& c) {
    ScatterOptions o;
    o.tol = c.scattering.tol;
    o.cfl = c.grid.cfl;
    o.sample_dt = c.scattering.sample_dt;
    o.t_max = 0;
    o.strict = false;
    return o;
}

double enorm(const FieldState& u, NormKind k, const GeneratorSet& g) {
    return std::sqrt(std::max(0.0, energy_norm(u, k, g)));
}

json history_summary(const WaveOpResult& r) {
    return json{{"converged", r.converged}, {"t_final", r.t_final}, {"rho", r.rho},
                {"tail", r.tail},           {"rate", r.rate},        {"samples", r.history.size()}};
}

void cmd_background(Run& r) {
    RadialChart c = build_background(r.cfg.physics, r.cfg.resolved_x_max(data_radius_hint()), r.cfg.grid.n_x,
                                     r.cfg.grid.window);
    auto f = open_out(r, "chart.csv");
    write_chart_csv(c, f);
    const int N = c.size();
    std::vector<double> xr, gr, xl, gl;
    for (int j = 3 * N / 4; j < N; ++j) {
        xr.push_back(c.x[j]);
        gr.push_back(c.dp[j]);
    }
    for (int j = 0; j < N / 4; ++j) {
        xl.push_back(-c.x[j]);
        gl.push_back(c.dm[j]);
    }
    r.results = {{"r_minus", c.roots.r_minus},
                 {"r_plus", c.roots.r_plus},
                 {"kappa_minus", c.kappa_minus},
                 {"kappa_plus", c.kappa_plus},
                 {"kappa_minus_fit", fit_decay_rate(xl, gl, 0, static_cast<int>(xl.size()))},
                 {"kappa_plus_fit", fit_decay_rate(xr, gr, 0, static_cast<int>(xr.size()))},
                 {"l_minus", c.l_minus},
                 {"l_plus", c.l_plus},
                 {"x_max", c.x_max},
                 {"h", c.h}};
}

void cmd_spectrum(Run& r) {
    AngularBasis b = spectrum_P(assemble_P_n(r.cfg.physics, r.cfg.grid.n_theta), r.cfg.grid.q_max);
    auto f = open_out(r, "spectrum.csv");
    write_spectrum_csv(b, f);
    r.results = {{"eigenvalues", std::vector<double>(b.eigenvalues.data(), b.eigenvalues.data() + b.q_count())}};
}

FieldState seeded_state(const Run& r, const GeneratorSet& g) {
    std::mt19937_64 rng(r.cfg.seed);
    return random_state(g, rng, suite_options());
}

void cmd_evolve(Run& r, double t) {
    auto g = generators(r.cfg);
    FieldState u = seeded_state(r, *g);
    EvolveOptions eo;
    eo.cfl = r.cfg.grid.cfl;
    eo.monitor_every = 10;
    std::vector<NormSample> hist;
    evolve(u, t, Generator::Full, *g, eo, &hist);
    auto f = open_out(r, "evolve_history.csv");
    f << "t,norm_full_inhom\n";
    f.precision(17);
    for (const auto& s : hist) f << s.t << ',' << s.norm << '\n';
    auto [A, B] = fit_growth(hist);
    r.results = {{"t", t}, {"growth_A", A}, {"growth_B", B}, {"samples", hist.size()}};
}

void cmd_scatter(Run& r) {
    auto g = generators(r.cfg);
    FieldState u = seeded_state(r, *g);
    ScatterOptions o = scatter_options(r.cfg);
    GlobalOmega om = global_omega(u, *g, o);
    WaveOpResult w = global_W(om.minus.limit, om.plus.limit, *g, o);
    for (auto [name, res] : {std::pair<const char*, const WaveOpResult*>{"omega_minus", &om.minus},
                             {"omega_plus", &om.plus},
                             {"w", &w}}) {
        auto f = open_out(r, std::string(name) + "_history.csv");
        write_history_csv(res->history, f);
        r.results[name] = history_summary(*res);
    }
    r.results["w_omega_rel_err"] =
        enorm(w.limit - u, NormKind::FullHom, *g) / enorm(u, NormKind::FullHom, *g);
}

void cmd_trace(Run& r) {
    auto g = generators(r.cfg);
    FieldState u = seeded_state(r, *g);
    TraceOptions to;
    to.tol = r.cfg.scattering.tol;
    to.cfl = r.cfg.grid.cfl;
    to.sample_dt = r.cfg.scattering.sample_dt;
    to.strict = false;
    TracePair tr = extract_traces(u, *g, to);
    for (const TraceResult* t : {&tr.minus, &tr.plus}) {
        std::string name = to_string(t->profile.which);
        auto f = open_out(r, "trace_" + name + ".csv");
        write_profile_csv(t->profile, *g, f);
        r.results[name] = {{"stabilized", t->stabilized},
                           {"residual", t->residual},
                           {"t_final", t->t_final},
                           {"horizon_energy", t->profile.energy}};
    }
    r.results["data_energy"] = energy_norm(u, NormKind::FullHom, *g);
}

CheckSettings settings_from(const Config& c) {
    CheckSettings s;
    s.physics = c.physics;
    s.n_theta = c.grid.n_theta;
    s.q_max = c.grid.q_max;
    s.cfl = c.grid.cfl;
    s.sample_dt = c.scattering.sample_dt;
    s.seed = c.seed;
    s.suite_size = c.scattering.suite_size;
    const double x = c.resolved_x_max(data_radius_hint());
    s.fine = {x, c.grid.n_x, c.scattering.tol};
    s.base = {x * 5.0 / 6.0, 2 * static_cast<int>(std::lround(c.grid.n_x * 5.0 / 12.0)), 10 * c.scattering.tol};
    return s;
}

json suite_json(const SuiteRun& s) {
    return json{{"max_w_omega", s.max_w_omega},   {"max_omega_w", s.max_omega_w},
                {"max_psi", s.max_psi},           {"energy_constant", s.energy_constant},
                {"bound_constant", s.bound_constant}, {"max_trace_gap", s.max_trace_gap},
                {"max_goursat", s.max_goursat},   {"c_lower", s.c_lower},
                {"c_upper", s.c_upper},           {"converged", s.converged},
                {"failure", s.failure}};
}

void cmd_roundtrip(Run& r) {
    CheckSettings s = settings_from(r.cfg);
    SuiteRun run = run_suite(s, s.fine, true);
    r.results = suite_json(run);
}

json check_json(const CheckResult& c) {
    json m = json::object();
    for (const auto& [k, v] : c.metrics) m[k] = v;
    return json{{"id", c.id}, {"name", c.name}, {"pass", c.ok}, {"detail", c.detail}, {"metrics", m}};
}

int cmd_verify(Run& r, const std::vector<int>& only) {
    std::set<int> want(only.begin(), only.end());
    auto on = [&](int id) { return want.empty() || want.count(id); };
    CheckSettings s = settings_from(r.cfg);
    std::vector<CheckResult> out;
    auto run = [&](int id, auto&& fn) {
        if (!on(id)) return;
        try {
            out.push_back(fn());
        } catch (const Error& e) {
            CheckResult c;
            c.id = id;
            c.name = "error";
            c.detail = e.what();
            out.push_back(c);
        }
        std::cerr << format_line(out.back()) << '\n';
    };
    run(1, check_geometry);
    run(2, check_angular);
    run(3, check_evolution);
    run(4, check_transport);
    run(5, check_wave_operator_rate);
    if (on(6) || on(7) || on(8)) {
        SuiteRun base = run_suite(s, s.base, on(8)), fine = run_suite(s, s.fine, on(8));
        r.results["suite_base"] = suite_json(base);
        r.results["suite_fine"] = suite_json(fine);
        run(6, [&] { return check_inversion(base, fine); });
        run(7, [&] { return check_membership(fine, s); });
        run(8, [&] { return check_goursat(base, fine); });
    }
    run(9, [&] { return check_hardy(r.cfg.seed); });
    run(10, check_negative_control);
    json checks = json::array();
    int failed = 0;
    for (const auto& c : out) {
        checks.push_back(check_json(c));
        if (!c.ok) ++failed;
    }
    r.results["checks"] = checks;
    r.results["failed"] = failed;
    return failed ? 1 : 0;
}

void write_summary(const Run& r) {
    json j{{"command", r.command}, {"version", DSK_VERSION}, {"config", r.cfg.to_json()}, {"results", r.results}};
    auto f = open_out(r, "summary.json");
    f << j.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Klein-Gordon scattering on De Sitter-Kerr at fixed n"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "dsk_out";
    std::int64_t seed = -1;
    int threads = 0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--threads", threads, "OpenMP threads");

    double evolve_t = 20;
    std::vector<int> only;
    auto* background = app.add_subcommand("background", "chart tables and surface-gravity fits");
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of P at fixed n");
    auto* evolve_cmd = app.add_subcommand("evolve", "norm history of a seeded state");
    evolve_cmd->add_option("--t", evolve_t, "evolution time");
    auto* scatter = app.add_subcommand("scatter", "wave-operator convergence histories");
    auto* trace = app.add_subcommand("trace", "horizon profiles of a seeded state");
    auto* roundtrip = app.add_subcommand("roundtrip", "W∘Ω and Ω∘W residuals and trace agreement");
    auto* verify = app.add_subcommand("verify", "acceptance criteria with pass/fail summary");
    verify->add_option("--only", only, "criterion ids to run");

    CLI11_PARSE(app, argc, argv);

    Run r;
    try {
        r.cfg = config_path.empty() ? Config{} : Config::load(config_path);
        if (seed >= 0) r.cfg.seed = static_cast<std::uint64_t>(seed);
        if (threads > 0) r.cfg.threads = threads;
        r.cfg.validate();
#ifdef _OPENMP
        omp_set_num_threads(r.cfg.threads);
#endif
        r.out = out_dir;
        fs::create_directories(r.out);
        int code = 0;
        if (*background) {
            r.command = "background";
            cmd_background(r);
        } else if (*spectrum) {
            r.command = "spectrum";
            cmd_spectrum(r);
        } else if (*evolve_cmd) {
            r.command = "evolve";
            cmd_evolve(r, evolve_t);
        } else if (*scatter) {
            r.command = "scatter";
            cmd_scatter(r);
        } else if (*trace) {
            r.command = "trace";
            cmd_trace(r);
        } else if (*roundtrip) {
            r.command = "roundtrip";
            cmd_roundtrip(r);
        } else if (*verify) {
            r.command = "verify";
            code = cmd_verify(r, only);
        }
        write_summary(r);
        return code;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << r.command << ": " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << r.command << ": " << e.what() << '\n';
        return 4;
    }
}
