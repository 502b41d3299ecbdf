#pragma once

#include "dsk/angular.hpp"
#include "dsk/geometry.hpp"
#include "dsk/operators.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <functional>
#include <memory>
#include <random>

namespace testing {

using namespace dsk;

inline SpacetimeParams params(double a, int n, double m2 = 0.0) {
    SpacetimeParams p;
    p.lambda_c = 0.05;
    p.mass = 1;
    p.spin = a;
    p.n = n;
    p.m2 = m2;
    return p;
}

inline std::unique_ptr<GeneratorSet> make_set(const SpacetimeParams& p, double x_max, int nx, int n_theta, int q_max,
                                              double window = 40.0) {
    RadialChart c = build_background(p, x_max, nx, window);
    AngularBasis b = spectrum_P(assemble_P_n(p, n_theta), q_max);
    return std::make_unique<GeneratorSet>(p, c, b);
}

inline Eigen::VectorXcd flatten(const FieldState& u) {
    const Eigen::Index m = u.u0.size();
    Eigen::VectorXcd v(2 * m);
    v.head(m) = Eigen::Map<const Eigen::VectorXcd>(u.u0.data(), m);
    v.tail(m) = Eigen::Map<const Eigen::VectorXcd>(u.u1.data(), m);
    return v;
}

inline FieldState unflatten(const Eigen::VectorXcd& v, int nx, int nq, int n) {
    FieldState u = FieldState::zeros(nx, nq, n);
    const Eigen::Index m = Eigen::Index(nx) * nq;
    u.u0 = Eigen::Map<const cmat>(v.data(), nx, nq);
    u.u1 = Eigen::Map<const cmat>(v.data() + m, nx, nq);
    return u;
}

/// Dense matrix of a linear map on states, column by column.
inline Eigen::MatrixXcd dense_state_map(const std::function<FieldState(const FieldState&)>& f, int nx, int nq, int n) {
    const Eigen::Index dim = 2 * Eigen::Index(nx) * nq;
    Eigen::MatrixXcd M(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
        e(i) = 1;
        M.col(i) = flatten(f(unflatten(e, nx, nq, n)));
    }
    return M;
}

/// Dense matrix of a linear map on single-component grid functions.
inline Eigen::MatrixXcd dense_map(const std::function<cmat(const cmat&)>& f, int nx, int nq) {
    const Eigen::Index dim = Eigen::Index(nx) * nq;
    Eigen::MatrixXcd M(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        cmat e = cmat::Zero(nx, nq);
        e(i % nx, i / nx) = 1;
        cmat r = f(e);
        M.col(i) = Eigen::Map<const Eigen::VectorXcd>(r.data(), dim);
    }
    return M;
}

/// Naive DFT spectral differentiation matrix, independent of the FFT path.
inline Eigen::MatrixXd naive_derivative_matrix(int n, double h) {
    const double L = n * h;
    Eigen::MatrixXcd F(n, n), Fi(n, n);
    Eigen::VectorXcd sym(n);
    for (int k = 0; k < n; ++k) {
        int kk = (k <= n / 2) ? k : k - n;
        if (n % 2 == 0 && k == n / 2) kk = 0;
        sym(k) = cplx(0, 2 * M_PI * kk / L);
        for (int j = 0; j < n; ++j) {
            F(k, j) = std::polar(1.0, -2 * M_PI * double(k) * j / n);
            Fi(j, k) = std::polar(1.0 / n, 2 * M_PI * double(k) * j / n);
        }
    }
    return (Fi * sym.asDiagonal() * F).real();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace testing
