#include "dsk/angular.hpp"
#include "dsk/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iomanip>
#include <ostream>

namespace dsk {

GaussLegendre gauss_legendre(int n) {
    GaussLegendre g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1;
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        g.nodes[n - 1 - i] = x;
        g.weights[n - 1 - i] = 2.0 / ((1 - x * x) * dp * dp);
    }
    return g;
}

void normalized_legendre(int m, int count, double mu, double* value, double* sd) {
    double s2 = 1 - mu * mu;
    double c = 0.5 * (2 * m + 1);
    for (int k = 1; k <= m; ++k) c *= (2.0 * k - 1) / (2.0 * k);
    double pmm = std::sqrt(c) * std::pow(s2, 0.5 * m);
    if (count <= 0) return;
    value[0] = pmm;
    if (count > 1) value[1] = std::sqrt(2.0 * m + 3) * mu * pmm;
    for (int k = 2; k < count; ++k) {
        int l = m + k;
        double al = std::sqrt((4.0 * l * l - 1) / (double(l) * l - double(m) * m));
        double al1 = std::sqrt((4.0 * (l - 1) * (l - 1) - 1) / (double(l - 1) * (l - 1) - double(m) * m));
        value[k] = al * (mu * value[k - 1] - value[k - 2] / al1);
    }
    for (int k = 0; k < count; ++k) {
        int l = m + k;
        double v = -l * mu * value[k];
        if (k > 0) v += std::sqrt((2.0 * l + 1) * (double(l) * l - double(m) * m) / (2.0 * l - 1)) * value[k - 1];
        sd[k] = v;
    }
}

AngularOperator assemble_P_n(const SpacetimeParams& p, int n_theta) {
    const int m = std::abs(p.n);
    if (n_theta < 2 * m + 8)
        throw GridError("N_theta=" + std::to_string(n_theta) + " below 2|n|+8=" + std::to_string(2 * m + 8));
    AngularOperator op;
    op.params = p;
    op.n_theta = n_theta;
    op.quad = gauss_legendre(n_theta);
    const int mb = n_theta - m;
    op.phi.resize(n_theta, mb);
    op.dphi.resize(n_theta, mb);
    std::vector<double> v(mb), d(mb);
    for (int k = 0; k < n_theta; ++k) {
        double mu = op.quad.nodes[k];
        normalized_legendre(m, mb, mu, v.data(), d.data());
        for (int b = 0; b < mb; ++b) {
            op.phi(k, b) = v[b];
            op.dphi(k, b) = d[b] / (1 - mu * mu);
        }
    }
    const double lam = p.lambda(), a2 = p.spin * p.spin;
    Eigen::VectorXd w1(n_theta), w2(n_theta);
    for (int k = 0; k < n_theta; ++k) {
        double mu = op.quad.nodes[k], s2 = 1 - mu * mu;
        double dth = 1 + p.lambda_c * a2 * mu * mu / 3.0;
        w1(k) = op.quad.weights[k] * lam * double(p.n) * p.n / s2;
        w2(k) = op.quad.weights[k] * dth * s2;
    }
    op.matrix = op.phi.transpose() * w1.asDiagonal() * op.phi + op.dphi.transpose() * w2.asDiagonal() * op.dphi;
    op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
    return op;
}

AngularBasis spectrum_P(const AngularOperator& op, int q_max) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver failed for P_n");
    const int mb = static_cast<int>(op.matrix.rows());
    const int q = std::min(q_max, mb);
    AngularBasis b;
    b.n = op.params.n;
    b.mu = op.quad.nodes;
    b.weights = op.quad.weights;
    b.theta.resize(b.mu.size());
    for (size_t k = 0; k < b.mu.size(); ++k) b.theta[k] = std::acos(b.mu[k]);
    b.all_eigenvalues = es.eigenvalues();
    b.eigenvalues = es.eigenvalues().head(q);
    b.coeffs = es.eigenvectors().leftCols(q);
    for (int j = 0; j < q; ++j) {
        Eigen::Index imax;
        b.coeffs.col(j).cwiseAbs().maxCoeff(&imax);
        if (b.coeffs(imax, j) < 0) b.coeffs.col(j) *= -1;
    }
    b.Z = op.phi * b.coeffs;
    b.dZ = op.dphi * b.coeffs;
    return b;
}

void write_spectrum_csv(const AngularBasis& b, std::ostream& os) {
    os << "q,lambda_q\n" << std::setprecision(15);
    for (int j = 0; j < b.q_count(); ++j) os << j << ',' << b.eigenvalues(j) << '\n';
}

} // namespace dsk
