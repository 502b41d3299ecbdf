#include "dsk/field.hpp"
#include "dsk/errors.hpp"

#include <algorithm>
#include <string>

namespace dsk {

FieldState FieldState::zeros(int nx, int nq, int n) {
    FieldState s;
    s.u0 = cmat::Zero(nx, nq);
    s.u1 = cmat::Zero(nx, nq);
    s.n = n;
    return s;
}

void check_shape(const FieldState& a, const FieldState& b) {
    if (a.nx() != b.nx() || a.nq() != b.nq() || a.u1.rows() != b.u1.rows() || a.u1.cols() != b.u1.cols())
        throw ShapeError("state shapes differ: " + std::to_string(a.nx()) + "x" + std::to_string(a.nq()) +
                         " vs " + std::to_string(b.nx()) + "x" + std::to_string(b.nq()));
}

FieldState& FieldState::operator+=(const FieldState& o) {
    check_shape(*this, o);
    u0 += o.u0;
    u1 += o.u1;
    return *this;
}

FieldState& FieldState::operator-=(const FieldState& o) {
    check_shape(*this, o);
    u0 -= o.u0;
    u1 -= o.u1;
    return *this;
}

FieldState& FieldState::operator*=(cplx s) {
    u0 *= s;
    u1 *= s;
    return *this;
}

FieldState operator+(FieldState a, const FieldState& b) { return a += b; }
FieldState operator-(FieldState a, const FieldState& b) { return a -= b; }
FieldState operator*(cplx s, FieldState a) { return a *= s; }

double l2_sq(const cmat& u, double h) {
    double s = 0;
    for (Eigen::Index q = 0; q < u.cols(); ++q)
        for (Eigen::Index j = 0; j < u.rows(); ++j) s += std::norm(u(j, q));
    return h * s;
}

cplx l2_inner(const cmat& u, const cmat& v, double h) {
    cplx s = 0;
    for (Eigen::Index q = 0; q < u.cols(); ++q)
        for (Eigen::Index j = 0; j < u.rows(); ++j) s += std::conj(u(j, q)) * v(j, q);
    return h * s;
}

double max_abs(const cmat& u) {
    double m = 0;
    for (Eigen::Index q = 0; q < u.cols(); ++q)
        for (Eigen::Index j = 0; j < u.rows(); ++j) m = std::max(m, std::abs(u(j, q)));
    return m;
}

} // namespace dsk
