#pragma once

#include "dsk/geometry.hpp"

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace dsk {

struct GaussLegendre {
    std::vector<double> nodes;    // ascending in (-1, 1)
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

/// Orthonormal associated Legendre functions on [-1, 1] (measure dμ), degrees m..m+count-1.
/// `value[k]` = P̄_{m+k}^m(μ), `scaled_derivative[k]` = (1 - μ²) dP̄/dμ.
void normalized_legendre(int m, int count, double mu, double* value, double* scaled_derivative);

/// Galerkin matrix of P_n = λn²/(1-μ²) - d/dμ (1-μ²)Δ_θ d/dμ in the P̄_ℓ^{|n|} basis.
struct AngularOperator {
    SpacetimeParams params;
    int n_theta = 0;
    GaussLegendre quad;
    Eigen::MatrixXd phi;   // basis values at nodes (N_θ × M_b)
    Eigen::MatrixXd dphi;  // dφ/dμ at nodes
    Eigen::MatrixXd matrix;
};

AngularOperator assemble_P_n(const SpacetimeParams& p, int n_theta);

struct AngularBasis {
    int n = 0;
    std::vector<double> mu, theta, weights;  // quadrature in μ = cos θ, ∫ dμ
    Eigen::VectorXd eigenvalues;             // retained, ascending
    Eigen::MatrixXd coeffs;                  // basis coefficients, one column per eigenpair
    Eigen::MatrixXd Z;                       // eigenfunction values at nodes (N_θ × Q)
    Eigen::MatrixXd dZ;                      // dZ/dμ at nodes
    Eigen::VectorXd all_eigenvalues;         // full Galerkin spectrum

    int q_count() const { return static_cast<int>(eigenvalues.size()); }
    int n_theta() const { return static_cast<int>(mu.size()); }
};

AngularBasis spectrum_P(const AngularOperator& op, int q_max);

void write_spectrum_csv(const AngularBasis& b, std::ostream& os);

} // namespace dsk
