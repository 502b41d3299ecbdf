#include "doctest.h"
#include "support.hpp"

#include "dsk/errors.hpp"
#include "dsk/sampling.hpp"
#include "dsk/transport.hpp"

using namespace testing;

namespace {

SampleOptions compact(double spread = 3.0) {
    SampleOptions so;
    so.center_spread = spread;
    so.width_min = 1.0;
    so.width_max = 2.0;
    so.modes = 3;
    return so;
}

FieldState incoming_state(const cmat& u0, Side s, const GeneratorSet& g) {
    std::vector<double> b = g.beta(s);
    const double l = g.l_side(s);
    for (double& x : b) x = -(l - x);
    return FieldState{u0, g.side_multiplier(u0, s, b), g.params.n};
}

FieldState admissible_random(const GeneratorSet& g, std::mt19937_64& rng, Side s, double spread = 3.0) {
    return make_admissible(random_state(g, rng, compact(spread)), s, g).state;
}

NormKind t_norm(Side s) { return s == Side::Plus ? NormKind::TPlus : NormKind::TMinus; }

} // namespace

TEST_CASE("transports are unitary and form a group") {
    auto g = make_set(params(0.1, 1), 40, 256, 10, 3);
    std::mt19937_64 rng(1);
    cmat f = random_profile(*g, rng, compact());
    for (TransportKind k : {TransportKind::WPlus, TransportKind::WTildeMinus, TransportKind::WMinus,
                            TransportKind::WTildePlus}) {
        cmat a = exact_transport(f, 3.5, k, *g);
        CHECK(rel(l2_sq(a, g->h), l2_sq(f, g->h)) < 1e-13);
        cmat b = exact_transport(exact_transport(f, 1.25, k, *g), 2.25, k, *g);
        CHECK((a - b).norm() < 1e-12 * f.norm());
        CHECK((exact_transport(a, -3.5, k, *g) - f).norm() < 1e-12 * f.norm());
    }
}

TEST_CASE("a = 0 transports are translations") {
    auto g = make_set(params(0, 1), 40, 256, 10, 2);
    const double w = 1.5, t = 7.3;
    auto gauss = [&](double shift) {
        cmat f = cmat::Zero(g->nx, g->nq);
        for (int j = 0; j < g->nx; ++j) f(j, 0) = std::exp(-0.5 * std::pow((g->chart.x[j] - shift) / w, 2));
        return f;
    };
    cmat f = gauss(0);
    CHECK((exact_transport(f, t, TransportKind::WPlus, *g) - gauss(t)).norm() < 1e-10 * f.norm());
    CHECK((exact_transport(f, t, TransportKind::WTildePlus, *g) - gauss(t)).norm() < 1e-10 * f.norm());
    CHECK((exact_transport(f, t, TransportKind::WMinus, *g) - gauss(-t)).norm() < 1e-10 * f.norm());
    CHECK((exact_transport(f, t, TransportKind::WTildeMinus, *g) - gauss(-t)).norm() < 1e-10 * f.norm());
}

TEST_CASE("tilde u1 against closed forms at a = 0") {
    auto g = make_set(params(0, 1), 40, 512, 10, 2);
    const double w = 1.3;
    FieldState u = FieldState::zeros(g->nx, g->nq, 1);
    for (int j = 0; j < g->nx; ++j) {
        double x = g->chart.x[j];
        u.u1(j, 0) = cplx(0, 1) * (-x / (w * w)) * std::exp(-0.5 * x * x / (w * w));
        u.u1(j, 1) = std::exp(-0.5 * x * x / (w * w));
    }
    for (Side s : {Side::Plus, Side::Minus}) {
        cmat v = tilde_u1(u, s, *g);
        double err0 = 0, err1 = 0;
        for (int j = 0; j < g->nx; ++j) {
            double x = g->chart.x[j];
            if (std::abs(x) > 30) continue;
            double gx = std::exp(-0.5 * x * x / (w * w));
            // plus: ∂v = -i u1 from the left; minus: -∂v = -i u1 from the right
            double sg = s == Side::Plus ? 1.0 : -1.0;
            cplx e0 = sg * gx;
            double phi = 0.5 * std::erfc(-sg * x / (w * std::sqrt(2.0)));
            cplx e1 = cplx(0, -1) * sg * sg * std::sqrt(2 * M_PI) * w * phi;
            err0 = std::max(err0, std::abs(v(j, 0) - e0));
            err1 = std::max(err1, std::abs(v(j, 1) - e1));
        }
        CHECK(err0 < 1e-10);
        CHECK(err1 < 1e-9);
    }
}

TEST_CASE("tilde u1 solves its transport equation on admissible data") {
    auto g = make_set(params(0.1, 1), 40, 256, 10, 3);
    std::mt19937_64 rng(8);
    for (Side s : {Side::Plus, Side::Minus}) {
        FieldState u = admissible_random(*g, rng, s);
        cmat v = tilde_u1(u, s, *g);
        std::vector<double> b = g->beta(s);
        std::vector<cplx> sym(b.size());
        for (size_t k = 0; k < b.size(); ++k) sym[k] = cplx(0, b[k]);
        cmat lhs = g->side_multiplier(v, s, sym);
        cmat rhs = cplx(0, -1) * (u.u1 + g->l_side(s) * u.u0);
        CHECK((lhs - rhs).norm() < 1e-10 * rhs.norm());
    }
}

TEST_CASE("make_admissible removes the phased integral") {
    auto g = make_set(params(0.1, 2, 0.01), 40, 256, 14, 3);
    std::mt19937_64 rng(4);
    for (Side s : {Side::Plus, Side::Minus}) {
        FieldState u = random_state(*g, rng, compact());
        Eigen::VectorXcd c = phased_integral(u, s, *g);
        AdmissibleState a = make_admissible(u, s, *g);
        CHECK(phased_integral(a.state, s, *g).norm() < 1e-12 * c.norm());
        double psi = std::sqrt(l2_sq(admissibility_bump(*g, s), g->h));
        CHECK(a.correction_l2 == doctest::Approx(c.norm() * psi).epsilon(1e-12));
        CHECK((a.state.u0 - u.u0).norm() == 0.0);
        CHECK_THROWS_AS(split_left_right(u, s, *g), AdmissibilityError);
        CHECK_NOTHROW(split_left_right(a.state, s, *g));
    }
}

TEST_CASE("comparison propagator against the dense exponential") {
    auto g = make_set(params(0.1, 1), 8, 48, 10, 2);
    std::mt19937_64 rng(6);
    SampleOptions so = compact(1);
    so.width_min = 0.8;
    so.width_max = 1.2;
    const int m = g->nx * g->nq;
    for (Side s : {Side::Plus, Side::Minus}) {
        Eigen::MatrixXcd HT = dense_map([&](const cmat& f) { return g->apply_h_T(f, s); }, g->nx, g->nq);
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * m, 2 * m);
        M.topRightCorner(m, m).setIdentity();
        M.bottomLeftCorner(m, m) = HT;
        M.bottomRightCorner(m, m) = -2 * g->l_side(s) * Eigen::MatrixXcd::Identity(m, m);
        FieldState u = random_state(*g, rng, so);
        const double t = 2.7;
        Eigen::VectorXcd exact = (cplx(0, t) * M).exp() * flatten(u);
        CHECK((flatten(comparison_evolve(u, t, s, *g)) - exact).norm() < 1e-10 * exact.norm());
    }
}

TEST_CASE("Kirchhoff formula agrees with the comparison propagator") {
    auto g = make_set(params(0.1, 1, 0.01), 60, 512, 10, 3);
    std::mt19937_64 rng(12);
    for (Side s : {Side::Plus, Side::Minus}) {
        FieldState u = admissible_random(*g, rng, s);
        for (double t : {-4.0, 5.0, 12.0}) {
            FieldState a = kirchhoff_evolve(u, t, s, *g), b = comparison_evolve(u, t, s, *g);
            CHECK((flatten(a) - flatten(b)).norm() < 1e-10 * flatten(b).norm());
            CHECK(rel(energy_norm(b, t_norm(s), *g), energy_norm(u, t_norm(s), *g)) < 1e-12);
        }
    }
}

TEST_CASE("outgoing data is transported by w") {
    auto g = make_set(params(0.1, 1), 60, 512, 10, 3);
    std::mt19937_64 rng(13);
    for (Side s : {Side::Plus, Side::Minus}) {
        cmat f = random_profile(*g, rng, compact());
        FieldState out = outgoing_state(f, s, *g);
        TransportKind k = s == Side::Plus ? TransportKind::WPlus : TransportKind::WMinus;
        for (double t : {3.0, 9.0}) {
            FieldState v = comparison_evolve(out, t, s, *g);
            FieldState expect = outgoing_state(exact_transport(f, t, k, *g), s, *g);
            CHECK((flatten(v) - flatten(expect)).norm() < 1e-10 * flatten(expect).norm());
            CHECK(psi_functional(v, s, *g).norm() < 1e-10 * v.u1.norm());
        }
    }
}

TEST_CASE("left/right split: reconstruction, orthogonality, constructive oracle") {
    auto g = make_set(params(0.1, 1), 60, 512, 10, 3);
    std::mt19937_64 rng(14);
    for (Side s : {Side::Plus, Side::Minus}) {
        FieldState u = admissible_random(*g, rng, s);
        LeftRightSplit sp = split_left_right(u, s, *g);
        CHECK((flatten(sp.left) + flatten(sp.right) - flatten(u)).norm() < 1e-12 * flatten(u).norm());
        double e = energy_norm(u, t_norm(s), *g);
        double el = energy_norm(sp.left, t_norm(s), *g), er = energy_norm(sp.right, t_norm(s), *g);
        CHECK(rel(el + er, e) < 1e-10);
        CHECK(psi_functional(sp.outgoing(), s, *g).norm() < 1e-10 * sp.outgoing().u1.norm());
        CHECK(psi_conjugate(sp.incoming(), s, *g).norm() < 1e-10 * sp.incoming().u1.norm());

        cmat f = random_profile(*g, rng, compact()), h = random_profile(*g, rng, compact());
        FieldState out = outgoing_state(f, s, *g), in = incoming_state(h, s, *g);
        FieldState sum{out.u0 + in.u0, out.u1 + in.u1, out.n};
        LeftRightSplit sp2 = split_left_right(sum, s, *g);
        CHECK((flatten(sp2.outgoing()) - flatten(out)).norm() < 1e-10 * flatten(out).norm());
        CHECK((flatten(sp2.incoming()) - flatten(in)).norm() < 1e-10 * flatten(in).norm());
    }
}
