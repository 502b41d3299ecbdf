#pragma once

#include <Eigen/Dense>
#include <complex>

namespace dsk {

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;

/// First-order state (u0, u1); rows are x nodes, columns are retained P eigenmodes.
struct FieldState {
    cmat u0, u1;
    int n = 0;

    static FieldState zeros(int nx, int nq, int n);
    int nx() const { return static_cast<int>(u0.rows()); }
    int nq() const { return static_cast<int>(u0.cols()); }

    FieldState& operator+=(const FieldState& o);
    FieldState& operator-=(const FieldState& o);
    FieldState& operator*=(cplx s);
};

FieldState operator+(FieldState a, const FieldState& b);
FieldState operator-(FieldState a, const FieldState& b);
FieldState operator*(cplx s, FieldState a);

void check_shape(const FieldState& a, const FieldState& b);

/// h Σ |u|² with a fixed summation order.
double l2_sq(const cmat& u, double h);
cplx l2_inner(const cmat& u, const cmat& v, double h);
double max_abs(const cmat& u);

} // namespace dsk
