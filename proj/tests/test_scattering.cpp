#include "doctest.h"
#include "support.hpp"

#include "dsk/errors.hpp"
#include "dsk/sampling.hpp"
#include "dsk/scattering.hpp"

#include <sstream>

using namespace testing;

namespace {

SampleOptions suite() {
    SampleOptions so;
    so.center_spread = 3.0;
    so.width_min = 1.0;
    so.width_max = 1.5;
    so.modes = 2;
    return so;
}

// Converging wave operators need a long causal budget; share one grid across cases.
const GeneratorSet& wide() {
    static auto g = make_set(params(0.05, 1), 200, 1280, 10, 3);
    return *g;
}

ScatterOptions loose(double tol = 1e-4) {
    ScatterOptions o;
    o.tol = tol;
    return o;
}

double norm(const FieldState& u, NormKind k, const GeneratorSet& g) { return std::sqrt(energy_norm(u, k, g)); }

double psi_ratio(const FieldState& u, Side s, const GeneratorSet& g) {
    NormKind k = s == Side::Plus ? NormKind::TPlus : NormKind::TMinus;
    return std::sqrt(l2_sq(psi_functional(u, s, g), g.h)) / norm(u, k, g);
}

} // namespace

TEST_CASE("zero data gives zero limits") {
    auto g = make_set(params(0.05, 1), 40, 256, 10, 3);
    FieldState z = FieldState::zeros(g->nx, g->nq, 1);
    for (Side s : {Side::Plus, Side::Minus}) {
        WaveOpResult a = inverse_wave_op(z, s, *g), b = direct_wave_op(z, s, *g);
        CHECK(a.converged);
        CHECK(b.converged);
        CHECK(a.history.empty());
        CHECK(a.limit.u0.isZero(0));
        CHECK(b.limit.u1.isZero(0));
    }
    GlobalOmega o = global_omega(z, *g);
    CHECK(o.plus.limit.u0.isZero(0));
    CHECK(global_W(z, z, *g).limit.u0.isZero(0));
    CHECK(s_diagnostic(z, 10, *g) == 0.0);
}

TEST_CASE("W after Omega returns the data; ranges satisfy the side relations") {
    const GeneratorSet& g = wide();
    std::mt19937_64 rng(21);
    FieldState u = random_state(g, rng, suite());
    ScatterOptions o = loose();
    GlobalOmega om = global_omega(u, g, o);
    CHECK(om.plus.converged);
    CHECK(om.minus.converged);
    CHECK(psi_ratio(om.plus.limit, Side::Plus, g) < 10 * o.tol);
    CHECK(psi_ratio(om.minus.limit, Side::Minus, g) < 10 * o.tol);

    WaveOpResult w = global_W(om.minus.limit, om.plus.limit, g, o);
    CHECK(w.converged);
    double err = norm(w.limit - u, NormKind::FullHom, g) / norm(u, NormKind::FullHom, g);
    CHECK(err < 1e-3);

    double ratio = norm(u, NormKind::FullHom, g) / profile_norm(om.minus.limit, om.plus.limit, g);
    CHECK(std::isfinite(ratio));
    CHECK(ratio > 0.1);
    CHECK(ratio < 10);
}

TEST_CASE("Omega after W: identity on the matching side, zero across") {
    const GeneratorSet& g = wide();
    std::mt19937_64 rng(22);
    ScatterOptions o = loose();
    FieldState ur = outgoing_state(random_profile(g, rng, suite()), Side::Plus, g);
    FieldState ul = outgoing_state(random_profile(g, rng, suite()), Side::Minus, g);

    WaveOpResult wr = direct_wave_op(ur, Side::Plus, g, o);
    WaveOpResult back = inverse_wave_op(wr.limit, Side::Plus, g, o);
    CHECK(norm(back.limit - ur, NormKind::TPlus, g) < 10 * o.tol * norm(ur, NormKind::TPlus, g));

    WaveOpResult wl = direct_wave_op(ul, Side::Minus, g, o);
    ScatterOptions lax = o;
    lax.strict = false;
    WaveOpResult cross = inverse_wave_op(wl.limit, Side::Plus, g, lax);
    CHECK(norm(cross.limit, NormKind::TPlus, g) < 10 * o.tol * norm(ul, NormKind::TMinus, g));
}

TEST_CASE("single and squared cutoffs give the same limit") {
    const GeneratorSet& g = wide();
    std::mt19937_64 rng(23);
    FieldState u = random_state(g, rng, suite());
    ScatterOptions o = loose();
    WaveOpResult a = inverse_wave_op(u, Side::Plus, g, o);
    o.cutoff_power = 1;
    WaveOpResult b = inverse_wave_op(u, Side::Plus, g, o);
    CHECK(norm(a.limit - b.limit, NormKind::TPlus, g) < 10 * o.tol * norm(a.limit, NormKind::TPlus, g));
}

TEST_CASE("S diagnostic") {
    const GeneratorSet& w = wide();
    std::mt19937_64 rng(24);
    FieldState u = random_state(w, rng, suite());
    const double t = 45;
    FieldState v = omega_inf_plus(u, t, w, 0.2);
    double nv = norm(v, NormKind::InfPlus, w);
    double s1 = s_diagnostic(v, t, w, 1.0, 0.2), s2 = s_diagnostic(v, 1.5 * t, w, 1.0, 0.2),
           s3 = s_diagnostic(v, 2 * t, w, 1.0, 0.2);
    CHECK(s2 < s1);
    CHECK(s3 < s2);
    CHECK(s3 < 0.05 * nv);

    auto g = make_set(params(0.05, 1), 120, 768, 10, 3);

    // incoming data far left keeps moving left under the comparison flow
    SampleOptions far = suite();
    far.center_spread = 0.5;
    cmat f = random_profile(*g, rng, far);
    cmat shifted = exact_transport(f, 40, TransportKind::WMinus, *g);
    FieldState left = outgoing_state(shifted, Side::Minus, *g);
    double nl = norm(left, NormKind::InfPlus, *g);
    CHECK(s_diagnostic(left, 20, *g, 1.0, 0.2) == doctest::Approx(nl).epsilon(0.05));
}

TEST_CASE("cutoff partition at finite times") {
    auto g = make_set(params(0.05, 1), 60, 384, 10, 3);
    std::mt19937_64 rng(25);
    FieldState u = random_state(*g, rng, suite());
    for (const PartitionSample& s : partition_check(u, {2.0, 8.0, 20.0}, *g, 0.2)) {
        CHECK(s.defect < 1e-8);
        CHECK(s.reversal < 1e-3);
    }
}

TEST_CASE("budget, strictness and history export") {
    auto g = make_set(params(0.05, 1), 40, 256, 10, 3);
    std::mt19937_64 rng(26);
    FieldState u = random_state(*g, rng, suite());
    ScatterOptions o;
    o.t_max = 100;
    CHECK_THROWS_AS(inverse_wave_op(u, Side::Plus, *g, o), GridError);
    o.t_max = 6;
    CHECK_THROWS_AS(inverse_wave_op(u, Side::Plus, *g, o), NoConvergence);
    o.strict = false;
    WaveOpResult r = inverse_wave_op(u, Side::Plus, *g, o);
    CHECK_FALSE(r.converged);
    CHECK(r.history.size() == 3);

    std::ostringstream os;
    write_history_csv(r.history, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,cauchy_diff,norm");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);

    FieldState bad = FieldState::zeros(64, 3, 1);
    CHECK_THROWS_AS(inverse_wave_op(bad, Side::Plus, *g), ShapeError);
}
