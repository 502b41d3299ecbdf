#pragma once

#include "dsk/angular.hpp"
#include "dsk/field.hpp"
#include "dsk/fourier.hpp"
#include "dsk/geometry.hpp"

#include <vector>

namespace dsk {

enum class Side { Plus, Minus };
enum class NormKind { FullHom, FullInhom, TPlus, TMinus, InfPlus, InfMinus };

const char* to_string(Side s);
const char* to_string(NormKind k);

/// Discrete generators at fixed n. Angular dependence enters through per-node Q×Q Galerkin blocks.
class GeneratorSet {
public:
    GeneratorSet(const SpacetimeParams& p, const RadialChart& chart, const AngularBasis& basis);

    SpacetimeParams params;
    RadialChart chart;
    AngularBasis basis;
    Fourier fft;
    int nx, nq;
    double h;
    bool decoupled;  // a = 0: every block is diagonal

    // per-node blocks, row-major Q×Q, node-major
    std::vector<double> g_blk;      // g = (r²+a²)√Δ_θ/σ
    std::vector<double> h0loc_blk;  // Θ + N₀ + mass + g² s''/s
    std::vector<double> loc_blk;    // h0loc - K·K
    std::vector<double> k_blk;      // n a (Δ_r - (r²+a²)Δ_θ)/σ²
    std::vector<double> v_inf;      // Δ_r λ_q/(λ²(r²+a²)²) + Δ_r m², node-major nx×nq
    std::vector<cplx> gauge;        // e^{i n A(x)}

    double l_side(Side s) const { return s == Side::Plus ? chart.l_plus : chart.l_minus; }

    cmat apply_h(const cmat& u) const;
    cmat apply_k(const cmat& u) const;
    cmat apply_h0(const cmat& u) const;
    cmat apply_h_inf(const cmat& u, Side s) const;
    cmat apply_h_T(const cmat& u, Side s) const;

    /// Frame of side s: multiply by e^{iσnA}, σ = ±1. In that frame B_s has symbol iβ(κ), β = σκ - l_s.
    cmat to_frame(const cmat& u, Side s) const;
    cmat from_frame(const cmat& u, Side s) const;
    std::vector<double> beta(Side s) const;
    /// u ↦ G_s* F⁻¹[symbol · F(G_s u)], column by column.
    cmat side_multiplier(const cmat& u, Side s, const std::vector<cplx>& symbol) const;
    cmat side_multiplier(const cmat& u, Side s, const std::vector<double>& symbol) const;

    cmat derivative(const cmat& u) const;
    /// Σ over columns of h/N Σ_k |symbol_k|² |û_k|² for u in the frame of s.
    double frame_energy(const cmat& u, Side s, const std::vector<double>& symbol) const;

    cmat multiply_blocks(const std::vector<double>& blk, const cmat& u) const;
};

/// Quadratic-form energies (squared norms).
double energy_norm(const FieldState& u, NormKind kind, const GeneratorSet& g);

/// Ψ(u) = (w/i)u₀ + u₁ with w = w₊ (plus) or w₋ (minus); vanishes on 𝓔^r_{T,+} / 𝓔^l_{T,−}.
cmat psi_functional(const FieldState& u, Side s, const GeneratorSet& g);
/// Conjugate functional (w̃/i)u₀ + u₁ with w̃ = w̃₋ (plus) or w̃₊ (minus).
cmat psi_conjugate(const FieldState& u, Side s, const GeneratorSet& g);

/// The eight-term expression for δ′₂,₁ u₀ = i(i₊h_{+∞} - h_{T,+}i₊)u₀ on P-mode q.
Eigen::VectorXcd delta_prime_apply(const Eigen::VectorXcd& u0, int q, const GeneratorSet& g);

enum class UDirection { ToAnalysis, FromAnalysis };
/// Pointwise multiplication by σ/√(λ(r²+a²)Δ_θ) on nodal data (N_x × N_θ).
cmat u_transform(const cmat& nodal, UDirection d, const GeneratorSet& g);

cmat modal_to_nodal(const cmat& modal, const AngularBasis& b);
cmat nodal_to_modal(const cmat& nodal, const AngularBasis& b);

} // namespace dsk
