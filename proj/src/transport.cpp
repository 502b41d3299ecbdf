#include "dsk/transport.hpp"
#include "dsk/errors.hpp"

#include <cmath>

namespace dsk {

namespace {

const cplx I(0, 1);

double sgn(Side s) { return s == Side::Plus ? 1.0 : -1.0; }

std::vector<cplx> propagator_symbol(const GeneratorSet& g, Side s, double t, bool outgoing) {
    std::vector<double> b = g.beta(s);
    const double l = g.l_side(s);
    std::vector<cplx> sym(b.size());
    for (size_t k = 0; k < b.size(); ++k) {
        double w = outgoing ? -l - b[k] : -l + b[k];
        sym[k] = std::polar(1.0, w * t);
    }
    return sym;
}

cmat gaussian_frame_bump(const GeneratorSet& g, Side s, double* nu) {
    const RadialChart& c = g.chart;
    const double sb = c.window / 64.0, l = g.l_side(s), sg = sgn(s);
    double total = 0;
    std::vector<double> nrm(g.nx);
    for (int j = 0; j < g.nx; ++j) {
        nrm[j] = std::exp(-0.5 * c.x[j] * c.x[j] / (sb * sb));
        total += nrm[j];
    }
    *nu = 1.0 / (g.h * total);
    cmat b(g.nx, 1);
    for (int j = 0; j < g.nx; ++j) b(j, 0) = std::polar(nrm[j] * *nu, sg * l * c.x[j]);
    return b;
}

} // namespace

const char* to_string(TransportKind k) {
    switch (k) {
    case TransportKind::WPlus: return "w_plus";
    case TransportKind::WTildeMinus: return "w_tilde_minus";
    case TransportKind::WMinus: return "w_minus";
    case TransportKind::WTildePlus: return "w_tilde_plus";
    }
    return "?";
}

cmat exact_transport(const cmat& f, double t, TransportKind kind, const GeneratorSet& g) {
    Side s = (kind == TransportKind::WPlus || kind == TransportKind::WTildeMinus) ? Side::Plus : Side::Minus;
    bool outgoing = kind == TransportKind::WPlus || kind == TransportKind::WMinus;
    return g.side_multiplier(f, s, propagator_symbol(g, s, t, outgoing));
}

Eigen::VectorXcd phased_integral(const FieldState& u, Side s, const GeneratorSet& g) {
    const double l = g.l_side(s), sg = sgn(s);
    cmat gf = g.to_frame(u.u1 + l * u.u0, s);
    Eigen::VectorXcd c(u.nq());
    for (int q = 0; q < u.nq(); ++q) {
        cplx acc = 0;
        for (int j = 0; j < g.nx; ++j) acc += std::polar(1.0, -sg * l * g.chart.x[j]) * gf(j, q);
        c(q) = g.h * acc;
    }
    return c;
}

cmat admissibility_bump(const GeneratorSet& g, Side s) {
    double nu;
    cmat b = gaussian_frame_bump(g, s, &nu);
    return g.from_frame(b, s);
}

cmat tilde_u1(const FieldState& u, Side s, const GeneratorSet& g) {
    const RadialChart& c = g.chart;
    const double l = g.l_side(s), sg = sgn(s), sb = c.window / 64.0;
    const int N = g.nx;
    Eigen::VectorXcd cint = phased_integral(u, s, g);
    double nu;
    cmat bump = gaussian_frame_bump(g, s, &nu);
    cmat rhs = g.to_frame(u.u1 + l * u.u0, s);
    for (int q = 0; q < u.nq(); ++q) rhs.col(q) -= cint(q) * bump.col(0);

    std::vector<double> b = g.beta(s);
    const double tiny = 1e-9 * 2 * M_PI / (N * g.h);
    std::vector<cplx> sym(N);
    for (int k = 0; k < N; ++k) sym[k] = std::abs(b[k]) > tiny ? cplx(-1.0 / b[k]) : cplx(0);
    cmat v(N, u.nq());
    for (int q = 0; q < u.nq(); ++q) g.fft.apply(rhs.col(q).data(), v.col(q).data(), sym.data());
    if (std::abs(l) <= tiny) {
        int j0 = s == Side::Plus ? 0 : N - 1;
        for (int q = 0; q < u.nq(); ++q) {
            cplx c0 = v(j0, q);
            v.col(q).array() -= c0;
        }
    }
    for (int j = 0; j < N; ++j) {
        double phi = 0.5 * std::erfc(-sg * c.x[j] / (sb * std::sqrt(2.0)));
        cplx vb = -I * nu * sb * std::sqrt(2 * M_PI) * std::polar(phi, sg * l * c.x[j]);
        for (int q = 0; q < u.nq(); ++q) v(j, q) += cint(q) * vb;
    }
    return g.from_frame(v, s);
}

AdmissibleState make_admissible(const FieldState& u, Side s, const GeneratorSet& g) {
    Eigen::VectorXcd cint = phased_integral(u, s, g);
    cmat psi = admissibility_bump(g, s);
    AdmissibleState out{u, 0.0};
    cmat corr(g.nx, u.nq());
    for (int q = 0; q < u.nq(); ++q) corr.col(q) = cint(q) * psi.col(0);
    out.state.u1 -= corr;
    out.correction_l2 = std::sqrt(l2_sq(corr, g.h));
    return out;
}

FieldState kirchhoff_evolve(const FieldState& u, double t, Side s, const GeneratorSet& g) {
    cmat ut = tilde_u1(u, s, g);
    cmat a = u.u0 + ut, b = u.u0 - ut;
    std::vector<double> beta = g.beta(s);
    const double l = g.l_side(s);
    const int N = g.nx;
    std::vector<cplx> sa0(N), sb0(N), sa1(N), sb1(N);
    for (int k = 0; k < N; ++k) {
        cplx ep = std::polar(1.0, (-l - beta[k]) * t);
        cplx em = std::polar(1.0, (-l + beta[k]) * t);
        sa0[k] = 0.5 * ep;
        sb0[k] = 0.5 * em;
        sa1[k] = -0.5 * (beta[k] + l) * ep;
        sb1[k] = -0.5 * (l - beta[k]) * em;
    }
    FieldState out;
    out.n = u.n;
    out.u0 = g.side_multiplier(a, s, sa0) + g.side_multiplier(b, s, sb0);
    out.u1 = g.side_multiplier(a, s, sa1) + g.side_multiplier(b, s, sb1);
    return out;
}

FieldState comparison_evolve(const FieldState& u, double t, Side s, const GeneratorSet& g) {
    if (u.nx() != g.nx || u.nq() != g.nq) throw ShapeError("state does not match generator grid");
    const int N = g.nx, Q = u.nq();
    const double l = g.l_side(s);
    std::vector<double> beta = g.beta(s);
    std::vector<double> cs(N), sn(N);
    for (int k = 0; k < N; ++k) {
        double bt = beta[k] * t;
        cs[k] = std::cos(bt);
        sn[k] = std::abs(bt) > 1e-8 ? std::sin(bt) / beta[k] : t * (1 - bt * bt / 6.0);
    }
    const cplx ph = std::polar(1.0 / N, -l * t);
    cmat a = g.to_frame(u.u0, s), b = g.to_frame(u.u1, s);
    FieldState out = FieldState::zeros(N, Q, u.n);
#pragma omp parallel for schedule(static)
    for (int q = 0; q < Q; ++q) {
        std::vector<cplx> ah(N), bh(N), na(N), nb(N);
        g.fft.forward(a.col(q).data(), ah.data());
        g.fft.forward(b.col(q).data(), bh.data());
        for (int k = 0; k < N; ++k) {
            cplx A = ah[k], B = bh[k];
            double bb = beta[k];
            na[k] = ph * (cs[k] * A + I * sn[k] * (l * A + B));
            nb[k] = ph * (cs[k] * B + I * sn[k] * ((bb * bb - l * l) * A - l * B));
        }
        g.fft.backward(na.data(), out.u0.col(q).data());
        g.fft.backward(nb.data(), out.u1.col(q).data());
    }
    out.u0 = g.from_frame(out.u0, s);
    out.u1 = g.from_frame(out.u1, s);
    return out;
}

FieldState comparison_discrete(const FieldState& u, double dt, int steps, Side s, const GeneratorSet& g) {
    if (u.nx() != g.nx || u.nq() != g.nq) throw ShapeError("state does not match generator grid");
    const int N = g.nx, Q = u.nq();
    const double l = g.l_side(s);
    std::vector<double> beta = g.beta(s);
    std::vector<Eigen::Matrix2cd> prop(N);
    for (int k = 0; k < N; ++k) {
        Eigen::Matrix2cd z;
        z << 0, 1, beta[k] * beta[k] - l * l, -2 * l;
        z *= cplx(0, dt);
        Eigen::Matrix2cd I2 = Eigen::Matrix2cd::Identity();
        Eigen::Matrix2cd R = I2 + z * (I2 + z / 2.0 * (I2 + z / 3.0 * (I2 + z / 4.0)));
        if (steps < 0) R = R.inverse().eval();
        Eigen::Matrix2cd P = I2;
        for (unsigned n = static_cast<unsigned>(std::abs(steps)); n; n >>= 1) {
            if (n & 1u) P = (P * R).eval();
            R = (R * R).eval();
        }
        prop[k] = P / double(N);
    }
    cmat a = g.to_frame(u.u0, s), b = g.to_frame(u.u1, s);
    FieldState out = FieldState::zeros(N, Q, u.n);
#pragma omp parallel for schedule(static)
    for (int q = 0; q < Q; ++q) {
        std::vector<cplx> ah(N), bh(N), na(N), nb(N);
        g.fft.forward(a.col(q).data(), ah.data());
        g.fft.forward(b.col(q).data(), bh.data());
        for (int k = 0; k < N; ++k) {
            na[k] = prop[k](0, 0) * ah[k] + prop[k](0, 1) * bh[k];
            nb[k] = prop[k](1, 0) * ah[k] + prop[k](1, 1) * bh[k];
        }
        g.fft.backward(na.data(), out.u0.col(q).data());
        g.fft.backward(nb.data(), out.u1.col(q).data());
    }
    out.u0 = g.from_frame(out.u0, s);
    out.u1 = g.from_frame(out.u1, s);
    return out;
}

LeftRightSplit split_left_right(const FieldState& u, Side s, const GeneratorSet& g) {
    Eigen::VectorXcd cint = phased_integral(u, s, g);
    const double l = g.l_side(s);
    cmat gf = u.u1 + l * u.u0;
    for (int q = 0; q < u.nq(); ++q) {
        double scale = g.h * gf.col(q).cwiseAbs().sum();
        if (std::abs(cint(q)) > 1e-8 * std::max(scale, 1e-300))
            throw AdmissibilityError("phased integral " + std::to_string(std::abs(cint(q))) + " on mode " +
                                     std::to_string(q) + " (relative " +
                                     std::to_string(std::abs(cint(q)) / scale) + ")");
    }
    cmat ut = tilde_u1(u, s, g);
    cmat a = u.u0 + ut, b = u.u0 - ut;
    std::vector<double> beta = g.beta(s);
    std::vector<double> wa(beta.size()), wb(beta.size());
    for (size_t k = 0; k < beta.size(); ++k) {
        wa[k] = -0.5 * (beta[k] + l);
        wb[k] = -0.5 * (l - beta[k]);
    }
    FieldState out_part{0.5 * a, g.side_multiplier(a, s, wa), u.n};
    FieldState in_part{0.5 * b, g.side_multiplier(b, s, wb), u.n};
    LeftRightSplit sp;
    sp.side = s;
    if (s == Side::Plus) {
        sp.right = out_part;
        sp.left = in_part;
    } else {
        sp.left = out_part;
        sp.right = in_part;
    }
    return sp;
}

FieldState outgoing_state(const cmat& u0, Side s, const GeneratorSet& g) {
    std::vector<double> beta = g.beta(s);
    const double l = g.l_side(s);
    for (double& b : beta) b = -(b + l);
    return FieldState{u0, g.side_multiplier(u0, s, beta), g.params.n};
}

} // namespace dsk
