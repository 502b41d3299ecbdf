#include "dsk/operators.hpp"
#include "dsk/errors.hpp"

#include <cmath>

namespace dsk {

const char* to_string(Side s) { return s == Side::Plus ? "plus" : "minus"; }

const char* to_string(NormKind k) {
    switch (k) {
    case NormKind::FullHom: return "full_hom";
    case NormKind::FullInhom: return "full_inhom";
    case NormKind::TPlus: return "T_plus";
    case NormKind::TMinus: return "T_minus";
    case NormKind::InfPlus: return "inf_plus";
    case NormKind::InfMinus: return "inf_minus";
    }
    return "?";
}

GeneratorSet::GeneratorSet(const SpacetimeParams& p, const RadialChart& c, const AngularBasis& b)
    : params(p), chart(c), basis(b), fft(c.size(), c.h), nx(c.size()), nq(b.q_count()), h(c.h),
      decoupled(p.spin == 0) {
    if (b.n != p.n) throw ShapeError("angular basis built for n=" + std::to_string(b.n) + ", params have n=" +
                                     std::to_string(p.n));
    if (c.params.lambda_c != p.lambda_c || c.params.mass != p.mass || c.params.spin != p.spin)
        throw ShapeError("chart built from different parameters");

    const int Q = nq, NT = b.n_theta();
    const double a = p.spin, a2 = a * a, lam = c.lambda, lc = p.lambda_c;
    const double n = p.n;
    g_blk.assign(size_t(nx) * Q * Q, 0.0);
    h0loc_blk.assign(size_t(nx) * Q * Q, 0.0);
    loc_blk.assign(size_t(nx) * Q * Q, 0.0);
    k_blk.assign(size_t(nx) * Q * Q, 0.0);
    v_inf.assign(size_t(nx) * Q, 0.0);
    gauge.resize(nx);

#pragma omp parallel for schedule(static)
    for (int j = 0; j < nx; ++j) {
        const double r = c.r[j], dr = c.delta_r[j], R = r * r + a2;
        const double drp = delta_r_prime(p, r);
        const double F = dr / (lam * R);
        const double Fp = (drp * R - 2 * r * dr) / (lam * R * R);
        const double vs = F * (a2 * F / (R * R) + r * Fp / R);
        gauge[j] = std::polar(1.0, n * c.A[j]);
        for (int q = 0; q < Q; ++q)
            v_inf[size_t(j) * Q + q] = dr * b.eigenvalues(q) / (lam * lam * R * R) + dr * p.m2;

        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(Q, Q), H0 = G, K = G;
        Eigen::VectorXd wg(NT), wn(NT), wk(NT), wt(NT);
        Eigen::MatrixXd dgz(NT, Q);
        for (int k = 0; k < NT; ++k) {
            const double mu = b.mu[k], s2 = 1 - mu * mu, wq = b.weights[k];
            const double dth = 1 + lc * a2 * mu * mu / 3.0;
            const double dth_mu = 2 * lc * a2 * mu / 3.0;
            const double sig2 = R * R * dth - a2 * dr * s2;
            const double sig2_mu = R * R * dth_mu + 2 * a2 * dr * mu;
            const double rho2 = r * r + a2 * mu * mu;
            const double gk = R * std::sqrt(dth / sig2);
            const double gth = std::sqrt(dr * dth / sig2) / lam;
            const double gth_mu = gth * 0.5 * (dth_mu / dth - sig2_mu / sig2);
            wg(k) = wq * gk;
            wn(k) = wq * (n * n * dr * dth * rho2 * rho2 / (s2 * sig2 * sig2) +
                          rho2 * dr * dth * p.m2 / (lam * lam * sig2) + gk * gk * vs);
            wk(k) = wq * n * a * (dr - R * dth) / sig2;
            wt(k) = wq * s2 * dth;
            for (int qq = 0; qq < Q; ++qq) dgz(k, qq) = gth_mu * b.Z(k, qq) + gth * b.dZ(k, qq);
        }
        G = b.Z.transpose() * wg.asDiagonal() * b.Z;
        H0 = b.Z.transpose() * wn.asDiagonal() * b.Z + dgz.transpose() * wt.asDiagonal() * dgz;
        K = b.Z.transpose() * wk.asDiagonal() * b.Z;
        Eigen::MatrixXd L = H0 - K * K;
        for (int pp = 0; pp < Q; ++pp)
            for (int qq = 0; qq < Q; ++qq) {
                size_t idx = (size_t(j) * Q + pp) * Q + qq;
                g_blk[idx] = 0.5 * (G(pp, qq) + G(qq, pp));
                h0loc_blk[idx] = 0.5 * (H0(pp, qq) + H0(qq, pp));
                loc_blk[idx] = 0.5 * (L(pp, qq) + L(qq, pp));
                k_blk[idx] = 0.5 * (K(pp, qq) + K(qq, pp));
            }
    }
}

cmat GeneratorSet::multiply_blocks(const std::vector<double>& blk, const cmat& u) const {
    const int Q = nq;
    cmat out(nx, Q);
    if (decoupled) {
#pragma omp parallel for schedule(static)
        for (int q = 0; q < Q; ++q)
            for (int j = 0; j < nx; ++j) out(j, q) = blk[(size_t(j) * Q + q) * Q + q] * u(j, q);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (int j = 0; j < nx; ++j) {
        const double* B = &blk[size_t(j) * Q * Q];
        for (int p = 0; p < Q; ++p) {
            cplx s = 0;
            for (int q = 0; q < Q; ++q) s += B[p * Q + q] * u(j, q);
            out(j, p) = s;
        }
    }
    return out;
}

cmat GeneratorSet::derivative(const cmat& u) const {
    cmat out(nx, nq);
#pragma omp parallel for schedule(static)
    for (int q = 0; q < nq; ++q) fft.derivative(u.col(q).data(), out.col(q).data());
    return out;
}

namespace {
cmat minus_laplacian(const Fourier& fft, const cmat& u) {
    const auto& k2 = fft.wavenumbers_sq();
    cmat out(u.rows(), u.cols());
#pragma omp parallel for schedule(static)
    for (int q = 0; q < static_cast<int>(u.cols()); ++q) fft.apply(u.col(q).data(), out.col(q).data(), k2.data());
    return out;
}
} // namespace

cmat GeneratorSet::apply_h(const cmat& u) const {
    if (decoupled) return minus_laplacian(fft, u) + multiply_blocks(loc_blk, u);
    cmat w = minus_laplacian(fft, multiply_blocks(g_blk, u));
    return multiply_blocks(g_blk, w) + multiply_blocks(loc_blk, u);
}

cmat GeneratorSet::apply_k(const cmat& u) const {
    if (decoupled) return cmat::Zero(nx, nq);
    return multiply_blocks(k_blk, u);
}

cmat GeneratorSet::apply_h0(const cmat& u) const {
    if (decoupled) return apply_h(u);
    return apply_h(u) + apply_k(apply_k(u));
}

cmat GeneratorSet::apply_h_inf(const cmat& u, Side s) const {
    const double l = l_side(s);
    cmat out = minus_laplacian(fft, u);
    for (int q = 0; q < nq; ++q)
        for (int j = 0; j < nx; ++j) out(j, q) += (v_inf[size_t(j) * nq + q] - l * l) * u(j, q);
    return out;
}

cmat GeneratorSet::to_frame(const cmat& u, Side s) const {
    cmat out(u.rows(), u.cols());
    for (Eigen::Index q = 0; q < u.cols(); ++q)
        for (int j = 0; j < nx; ++j) out(j, q) = (s == Side::Plus ? gauge[j] : std::conj(gauge[j])) * u(j, q);
    return out;
}

cmat GeneratorSet::from_frame(const cmat& u, Side s) const {
    return to_frame(u, s == Side::Plus ? Side::Minus : Side::Plus);
}

std::vector<double> GeneratorSet::beta(Side s) const {
    const auto& k = fft.wavenumbers();
    const double sg = s == Side::Plus ? 1.0 : -1.0, l = l_side(s);
    std::vector<double> b(k.size());
    for (size_t i = 0; i < k.size(); ++i) b[i] = sg * k[i] - l;
    return b;
}

cmat GeneratorSet::side_multiplier(const cmat& u, Side s, const std::vector<cplx>& symbol) const {
    cmat v = to_frame(u, s);
#pragma omp parallel for schedule(static)
    for (int q = 0; q < static_cast<int>(v.cols()); ++q) fft.apply(v.col(q).data(), v.col(q).data(), symbol.data());
    return from_frame(v, s);
}

cmat GeneratorSet::side_multiplier(const cmat& u, Side s, const std::vector<double>& symbol) const {
    cmat v = to_frame(u, s);
#pragma omp parallel for schedule(static)
    for (int q = 0; q < static_cast<int>(v.cols()); ++q) fft.apply(v.col(q).data(), v.col(q).data(), symbol.data());
    return from_frame(v, s);
}

cmat GeneratorSet::apply_h_T(const cmat& u, Side s) const {
    std::vector<double> b = beta(s);
    const double l = l_side(s);
    for (double& x : b) x = x * x - l * l;
    return side_multiplier(u, s, b);
}

double GeneratorSet::frame_energy(const cmat& u, Side s, const std::vector<double>& symbol) const {
    cmat v = to_frame(u, s);
    std::vector<cplx> buf(nx);
    double total = 0;
    for (Eigen::Index q = 0; q < v.cols(); ++q) {
        fft.forward(v.col(q).data(), buf.data());
        double acc = 0;
        for (int k = 0; k < nx; ++k) acc += symbol[k] * symbol[k] * std::norm(buf[k]);
        total += acc;
    }
    return total * h / nx;
}

namespace {

double block_form(const GeneratorSet& g, const std::vector<double>& blk, const cmat& u) {
    const int Q = g.nq;
    double total = 0;
    for (int j = 0; j < g.nx; ++j) {
        const double* B = &blk[size_t(j) * Q * Q];
        for (int p = 0; p < Q; ++p) {
            if (g.decoupled) {
                total += B[p * Q + p] * std::norm(u(j, p));
                continue;
            }
            cplx s = 0;
            for (int q = 0; q < Q; ++q) s += B[p * Q + q] * u(j, q);
            total += std::real(std::conj(u(j, p)) * s);
        }
    }
    return total * g.h;
}

double check_form(double value, const FieldState& u, double h, const char* what) {
    double scale = l2_sq(u.u0, h) + l2_sq(u.u1, h);
    if (value < -1e-10 * scale)
        throw NegativeQuadraticForm(std::string(what) + " evaluated to " + std::to_string(value));
    return value;
}

} // namespace

double energy_norm(const FieldState& u, NormKind kind, const GeneratorSet& g) {
    if (u.nx() != g.nx || u.nq() != g.nq) throw ShapeError("state does not match generator grid");
    const double h = g.h;
    const auto& kap = g.fft.wavenumbers();
    switch (kind) {
    case NormKind::FullHom:
    case NormKind::FullInhom: {
        cmat w = g.decoupled ? u.u0 : g.multiply_blocks(g.g_blk, u.u0);
        double form = g.frame_energy(g.from_frame(w, Side::Plus), Side::Plus, kap) +
                      block_form(g, g.h0loc_blk, u.u0);
        check_form(form, u, h, "<h0 u0, u0>");
        double e = form + l2_sq(u.u1 - g.apply_k(u.u0), h);
        if (kind == NormKind::FullInhom) e += l2_sq(u.u0, h);
        return e;
    }
    case NormKind::TPlus:
    case NormKind::TMinus: {
        Side s = kind == NormKind::TPlus ? Side::Plus : Side::Minus;
        double form = g.frame_energy(u.u0, s, g.beta(s));
        return form + l2_sq(u.u1 + g.l_side(s) * u.u0, h);
    }
    case NormKind::InfPlus:
    case NormKind::InfMinus: {
        Side s = kind == NormKind::InfPlus ? Side::Plus : Side::Minus;
        double form = g.frame_energy(g.from_frame(u.u0, Side::Plus), Side::Plus, kap);
        double pot = 0;
        for (int q = 0; q < g.nq; ++q)
            for (int j = 0; j < g.nx; ++j) pot += g.v_inf[size_t(j) * g.nq + q] * std::norm(u.u0(j, q));
        form += pot * h;
        check_form(form, u, h, "<h_{0,inf} u0, u0>");
        return form + l2_sq(u.u1 + g.l_side(s) * u.u0, h);
    }
    }
    return 0;
}

cmat psi_functional(const FieldState& u, Side s, const GeneratorSet& g) {
    std::vector<double> b = g.beta(s);
    const double l = g.l_side(s);
    for (double& x : b) x += l;
    return g.side_multiplier(u.u0, s, b) + u.u1;
}

cmat psi_conjugate(const FieldState& u, Side s, const GeneratorSet& g) {
    std::vector<double> b = g.beta(s);
    const double l = g.l_side(s);
    for (double& x : b) x = l - x;
    return g.side_multiplier(u.u0, s, b) + u.u1;
}

Eigen::VectorXcd delta_prime_apply(const Eigen::VectorXcd& u0, int q, const GeneratorSet& g) {
    const RadialChart& c = g.chart;
    const int N = g.nx;
    Eigen::VectorXcd du(N);
    g.fft.derivative(u0.data(), du.data());
    const cplx I(0, 1);
    Eigen::VectorXcd out(N);
    for (int j = 0; j < N; ++j) {
        const double ip = c.i_plus[j], dip = c.di_plus[j], ddip = c.ddi_plus[j];
        const double L = c.l[j] - c.l_plus;
        cplx v = ip * g.v_inf[size_t(j) * g.nq + q] * u0(j) + ddip * u0(j) + 2.0 * dip * du(j) +
                 2.0 * dip * I * L * u0(j) + 2.0 * ip * I * L * du(j) + ip * I * c.dl[j] * u0(j) -
                 ip * L * L * u0(j);
        out(j) = I * v;
    }
    return out;
}

cmat u_transform(const cmat& nodal, UDirection d, const GeneratorSet& g) {
    const RadialChart& c = g.chart;
    const AngularBasis& b = g.basis;
    const double a2 = g.params.spin * g.params.spin, lc = g.params.lambda_c;
    cmat out(nodal.rows(), nodal.cols());
    for (Eigen::Index k = 0; k < nodal.cols(); ++k) {
        const double mu = b.mu[k];
        const double dth = 1 + lc * a2 * mu * mu / 3.0;
        for (Eigen::Index j = 0; j < nodal.rows(); ++j) {
            const double r = c.r[j], R = r * r + a2;
            const double sig = std::sqrt(R * R * dth - a2 * c.delta_r[j] * (1 - mu * mu));
            const double U = sig / std::sqrt(c.lambda * R * dth);
            out(j, k) = d == UDirection::ToAnalysis ? nodal(j, k) * U : nodal(j, k) / U;
        }
    }
    return out;
}

cmat modal_to_nodal(const cmat& modal, const AngularBasis& b) {
    return modal * b.Z.transpose().cast<cplx>();
}

cmat nodal_to_modal(const cmat& nodal, const AngularBasis& b) {
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(b.weights.data(), b.weights.size());
    return nodal * (w.asDiagonal() * b.Z).cast<cplx>();
}

} // namespace dsk
