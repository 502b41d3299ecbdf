#include "doctest.h"
#include "support.hpp"

#include "dsk/errors.hpp"
#include "dsk/sampling.hpp"
#include "dsk/transport.hpp"

using namespace testing;

namespace {

FieldState gaussian_state(const GeneratorSet& g, double xc, double w, double k) {
    FieldState u = FieldState::zeros(g.nx, g.nq, g.params.n);
    for (int j = 0; j < g.nx; ++j) {
        double s = (g.chart.x[j] - xc) / w;
        u.u0(j, 0) = std::exp(-0.5 * s * s) * std::polar(1.0, k * g.chart.x[j]);
        u.u1(j, 0) = cplx(0.3, -0.2) * std::exp(-0.5 * s * s * 1.3);
        if (g.nq > 1) u.u0(j, 1) = 0.5 * std::exp(-0.5 * s * s * 0.8);
    }
    return u;
}

} // namespace

TEST_CASE("a = 0: k vanishes and h_T is -D^2") {
    auto g = make_set(params(0, 1), 10, 64, 12, 3);
    std::mt19937_64 rng(1);
    SampleOptions so;
    so.center_spread = 3;
    so.width_min = 1.5;
    so.width_max = 2;
    FieldState u = random_state(*g, rng, so);
    CHECK(g->apply_k(u.u0).norm() == 0.0);
    Eigen::MatrixXd D = naive_derivative_matrix(g->nx, g->h);
    for (Side s : {Side::Plus, Side::Minus}) {
        cmat ref = -(D * D).cast<cplx>() * u.u0;
        CHECK((g->apply_h_T(u.u0, s) - ref).norm() < 1e-10 * ref.norm());
    }
}

TEST_CASE("h at a = 0 is -d2 + r''/r + potential") {
    auto g = make_set(params(0, 1, 0.02), 60, 1024, 12, 3);
    const RadialChart& c = g->chart;
    const int Q = g->nq;
    for (int j = 100; j < 924; j += 37) {
        double rpp = (c.r[j + 1] - 2 * c.r[j] + c.r[j - 1]) / (c.h * c.h);
        double r = c.r[j];
        for (int q = 0; q < Q; ++q) {
            double expect = rpp / r + c.delta_r[j] * g->basis.eigenvalues(q) / (r * r * r * r) +
                            0.02 * c.delta_r[j] / (r * r);
            double got = g->loc_blk[(size_t(j) * Q + q) * Q + q];
            CHECK(got == doctest::Approx(expect).epsilon(2e-3));
        }
    }
}

TEST_CASE("h0 is symmetric and positive semidefinite") {
    auto g = make_set(params(0.1, 1, 0.01), 8, 48, 10, 4);
    std::mt19937_64 rng(3);
    SampleOptions so;
    so.center_spread = 2;
    so.width_min = 1;
    so.width_max = 1.5;
    so.modes = 4;
    double worst = 0;
    for (int t = 0; t < 50; ++t) {
        cmat u = random_profile(*g, rng, so), v = random_profile(*g, rng, so);
        cplx a = l2_inner(g->apply_h0(u), v, g->h), b = l2_inner(u, g->apply_h0(v), g->h);
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    CHECK(worst < 1e-10);
    Eigen::MatrixXcd H0 = dense_map([&](const cmat& u) { return g->apply_h0(u); }, g->nx, g->nq);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H0 + H0.adjoint()));
    CHECK(es.eigenvalues().minCoeff() > -1e-10 * es.eigenvalues().cwiseAbs().maxCoeff());
    Eigen::MatrixXcd HT = dense_map([&](const cmat& u) { return g->apply_h_T(u, Side::Plus); }, g->nx, g->nq);
    HT += g->chart.l_plus * g->chart.l_plus * Eigen::MatrixXcd::Identity(HT.rows(), HT.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> et(0.5 * (HT + HT.adjoint()));
    CHECK(et.eigenvalues().minCoeff() > -1e-10 * et.eigenvalues().cwiseAbs().maxCoeff());
}

TEST_CASE("comparison constants k = -l_pm") {
    auto g = make_set(params(0.1, 1), 140, 1024, 12, 4);
    double rp = g->chart.roots.r_plus;
    CHECK(-g->l_side(Side::Plus) == doctest::Approx(-0.1 / (rp * rp + 0.01)).epsilon(1e-14));
}

TEST_CASE("energy norms: zero state, u0 = 0, dense T_plus form") {
    auto g = make_set(params(0.1, 1), 10, 64, 10, 3);
    FieldState z = FieldState::zeros(g->nx, g->nq, 1);
    for (NormKind k : {NormKind::FullHom, NormKind::FullInhom, NormKind::TPlus, NormKind::TMinus,
                       NormKind::InfPlus, NormKind::InfMinus})
        CHECK(energy_norm(z, k, *g) == 0.0);
    FieldState u = gaussian_state(*g, 0, 1.5, 0.4);
    FieldState v = u;
    v.u0.setZero();
    CHECK(energy_norm(v, NormKind::FullHom, *g) == doctest::Approx(l2_sq(v.u1, g->h)).epsilon(1e-14));

    Eigen::MatrixXcd HT = dense_map([&](const cmat& f) { return g->apply_h_T(f, Side::Plus); }, g->nx, g->nq);
    const double lp = g->chart.l_plus;
    Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(u.u0.data(), u.u0.size());
    double form = g->h * std::real(x.dot(HT * x)) + lp * lp * g->h * x.squaredNorm();
    double expect = form + l2_sq(u.u1 + lp * u.u0, g->h);
    CHECK(rel(energy_norm(u, NormKind::TPlus, *g), expect) < 1e-10);
}

TEST_CASE("B_plus gauge form agrees with the physical form on smooth data") {
    auto g = make_set(params(0.1, 2), 30, 512, 14, 3);
    FieldState u = gaussian_state(*g, 1.0, 2.0, 0.2);
    std::vector<double> b = g->beta(Side::Plus);
    std::vector<cplx> sym(b.size());
    for (size_t k = 0; k < b.size(); ++k) sym[k] = cplx(0, b[k]);
    cmat gauge_form = g->side_multiplier(u.u0, Side::Plus, sym);
    cmat phys = g->derivative(u.u0);
    for (int q = 0; q < g->nq; ++q)
        for (int j = 0; j < g->nx; ++j) phys(j, q) += cplx(0, g->chart.l[j] - g->chart.l_plus) * u.u0(j, q);
    CHECK((gauge_form - phys).norm() < 1e-9 * phys.norm());
}

TEST_CASE("Psi functional identities") {
    auto g = make_set(params(0.1, 1), 30, 256, 10, 3);
    std::mt19937_64 rng(11);
    SampleOptions so;
    so.center_spread = 3;
    so.modes = 3;
    for (Side s : {Side::Plus, Side::Minus}) {
        FieldState out = outgoing_state(random_profile(*g, rng, so), s, *g);
        CHECK(psi_functional(out, s, *g).norm() < 1e-12 * out.u1.norm());
        FieldState v = random_state(*g, rng, so);
        v.u0.setZero();
        CHECK((psi_functional(v, s, *g) - v.u1).norm() == 0.0);
        FieldState u = random_state(*g, rng, so);
        double lhs = l2_sq(psi_functional(u, s, *g), g->h) + l2_sq(psi_conjugate(u, s, *g), g->h);
        double rhs = 2 * energy_norm(u, s == Side::Plus ? NormKind::TPlus : NormKind::TMinus, *g);
        CHECK(rel(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("h_{0,T} has no kernel on compactly supported data") {
    auto g = make_set(params(0, 1), 30, 256, 10, 2);
    std::mt19937_64 rng(5);
    SampleOptions so;
    so.center_spread = 5;
    for (int t = 0; t < 20; ++t) {
        FieldState u = random_state(*g, rng, so);
        u.u1 = -g->l_side(Side::Plus) * u.u0;
        CHECK(energy_norm(u, NormKind::TPlus, *g) > 1e-3 * l2_sq(u.u0, g->h));
    }
}

TEST_CASE("delta' eight-term expression") {
    auto g = make_set(params(0.1, 1, 0.01), 60, 1024, 10, 3);
    const RadialChart& c = g->chart;
    auto bump = [&](double xc, double w) {
        Eigen::VectorXcd f(g->nx);
        for (int j = 0; j < g->nx; ++j) {
            double s = (c.x[j] - xc) / w;
            f(j) = std::exp(-0.5 * s * s) * std::polar(1.0, 0.3 * c.x[j]);
        }
        return f;
    };
    // against i(i+ h_inf - h_T i+) assembled from the generator pieces
    for (int q = 0; q < 2; ++q) {
        Eigen::VectorXcd f = bump(2.0, 1.5);
        cmat F = cmat::Zero(g->nx, g->nq), IF = F;
        F.col(q) = f;
        for (int j = 0; j < g->nx; ++j) IF(j, q) = c.i_plus[j] * f(j);
        cmat a = g->apply_h_inf(F, Side::Plus), b = g->apply_h_T(IF, Side::Plus);
        Eigen::VectorXcd ref(g->nx);
        for (int j = 0; j < g->nx; ++j) ref(j) = cplx(0, 1) * (c.i_plus[j] * a(j, q) - b(j, q));
        Eigen::VectorXcd got = delta_prime_apply(f, q, *g);
        CHECK((got - ref).norm() < 1e-8 * ref.norm());
    }
    // vanishes where i+ = 0
    CHECK(delta_prime_apply(bump(-30, 1.5), 0, *g).norm() < 1e-12);
    // coefficient decay towards the outer grid
    double r1 = delta_prime_apply(bump(20, 1.5), 0, *g).norm() / bump(20, 1.5).norm();
    double r2 = delta_prime_apply(bump(40, 1.5), 0, *g).norm() / bump(40, 1.5).norm();
    CHECK(r2 / r1 < 10 * std::exp(-c.kappa_plus * 20));
}

TEST_CASE("delta' weighted inequality holds with a finite constant") {
    auto g = make_set(params(0.1, 1), 60, 1024, 10, 3);
    const RadialChart& c = g->chart;
    std::mt19937_64 rng(21);
    SampleOptions so;
    so.center_spread = 30;
    so.width_min = 0.8;
    so.width_max = 3;
    so.modes = 1;
    auto ratio = [&](const cmat& f) {
        Eigen::VectorXcd u0 = f.col(0);
        Eigen::VectorXcd d = delta_prime_apply(u0, 0, *g);
        cmat v = cmat::Zero(g->nx, g->nq);
        for (int j = 0; j < g->nx; ++j) v(j, 0) = std::sqrt(c.q[j]) * u0(j);
        FieldState s{v, -g->l_side(Side::Plus) * v, 1};
        return d.squaredNorm() * g->h / energy_norm(s, NormKind::InfPlus, *g);
    };
    double cfit = 0;
    for (int t = 0; t < 50; ++t) cfit = std::max(cfit, ratio(random_profile(*g, rng, so)));
    CHECK(std::isfinite(cfit));
    CHECK(cfit > 0);
    CHECK(cfit < 1e3);
}

TEST_CASE("U transform") {
    auto g = make_set(params(0.1, 1), 60, 512, 12, 4);
    const RadialChart& c = g->chart;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    cmat f(g->nx, g->basis.n_theta());
    for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = cplx(nd(rng), nd(rng));
    cmat back = u_transform(u_transform(f, UDirection::FromAnalysis, *g), UDirection::ToAnalysis, *g);
    CHECK((back - f).cwiseAbs().maxCoeff() < 1e-14 * f.cwiseAbs().maxCoeff());

    auto g0 = make_set(params(0, 1), 60, 512, 12, 4);
    cmat ones = cmat::Ones(g0->nx, g0->basis.n_theta());
    cmat U = u_transform(ones, UDirection::ToAnalysis, *g0);
    for (int j : {50, 256, 400}) CHECK(U(j, 3).real() == doctest::Approx(g0->chart.r[j]).epsilon(1e-13));

    // ‖Uf‖ in dx dμ against ‖f‖ in σ²/(Δ_rΔ_θ) dr dμ with an independent r-quadrature
    const double rc = 4.0, wr = 0.35;
    auto fr = [&](double r, double mu) { return std::exp(-0.5 * std::pow((r - rc) / wr, 2)) * (1 + 0.3 * mu); };
    cmat nod(g->nx, g->basis.n_theta());
    for (int j = 0; j < g->nx; ++j)
        for (int k = 0; k < g->basis.n_theta(); ++k) nod(j, k) = fr(c.r[j], g->basis.mu[k]);
    cmat Uf = u_transform(nod, UDirection::ToAnalysis, *g);
    double lhs = 0;
    for (int j = 0; j < g->nx; ++j)
        for (int k = 0; k < g->basis.n_theta(); ++k) lhs += g->h * g->basis.weights[k] * std::norm(Uf(j, k));
    GaussLegendre gr = gauss_legendre(200);
    double rhs = 0, r0 = rc - 9 * wr, r1 = rc + 9 * wr;
    for (size_t i = 0; i < gr.nodes.size(); ++i) {
        double r = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gr.nodes[i];
        for (int k = 0; k < g->basis.n_theta(); ++k) {
            double mu = g->basis.mu[k];
            auto m = eval_metric_functions(g->params, r, std::acos(mu));
            rhs += 0.5 * (r1 - r0) * gr.weights[i] * g->basis.weights[k] * m.sigma2 / (m.delta_r * m.delta_theta) *
                   std::pow(fr(r, mu), 2);
        }
    }
    CHECK(rel(lhs, rhs) < 1e-8);
}

TEST_CASE("modal and nodal representations round trip") {
    auto g = make_set(params(0.1, 1), 20, 128, 14, 6);
    std::mt19937_64 rng(4);
    SampleOptions so;
    so.modes = 6;
    cmat m = random_profile(*g, rng, so);
    CHECK((nodal_to_modal(modal_to_nodal(m, g->basis), g->basis) - m).norm() < 1e-12 * m.norm());
}

TEST_CASE("mismatched shapes are rejected") {
    auto g = make_set(params(0, 1), 20, 128, 12, 3);
    FieldState u = FieldState::zeros(64, 3, 1);
    CHECK_THROWS_AS(energy_norm(u, NormKind::FullHom, *g), ShapeError);
    RadialChart c = build_background(params(0, 1), 20, 128);
    AngularBasis b = spectrum_P(assemble_P_n(params(0, 2), 12), 3);
    CHECK_THROWS_AS(GeneratorSet(params(0, 1), c, b), ShapeError);
}
