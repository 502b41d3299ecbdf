#pragma once

#include "dsk/operators.hpp"

namespace dsk {

enum class TransportKind { WPlus, WTildeMinus, WMinus, WTildePlus };

const char* to_string(TransportKind k);

/// e^{-t w} f for the four first-order transport generators (exact flow of the discrete derivative).
cmat exact_transport(const cmat& f, double t, TransportKind kind, const GeneratorSet& g);

/// Per-mode phased integral ∫ e^{-i∫_s^0 (l - l_s)} (u₁ + l_s u₀)(s) ds (trapezoid on the periodic grid).
Eigen::VectorXcd phased_integral(const FieldState& u, Side s, const GeneratorSet& g);

/// The fixed bump ψ with unit phased integral (Gaussian, σ = window/64, centered at 0).
cmat admissibility_bump(const GeneratorSet& g, Side s);

/// Causal solution of (w - i l_s) ũ₁ = -i (u₁ + l_s u₀), from -∞ (plus) or +∞ (minus).
cmat tilde_u1(const FieldState& u, Side s, const GeneratorSet& g);

struct AdmissibleState {
    FieldState state;
    double correction_l2 = 0;
};

AdmissibleState make_admissible(const FieldState& u, Side s, const GeneratorSet& g);

/// e^{itH_{T,s}} through the Kirchhoff formula (ũ₁ and the two transports).
FieldState kirchhoff_evolve(const FieldState& u, double t, Side s, const GeneratorSet& g);

/// e^{itH_{T,s}} by per-wavenumber diagonalization in the gauge frame; exact for any data.
FieldState comparison_evolve(const FieldState& u, double t, Side s, const GeneratorSet& g);

/// The RK4 step of the comparison generator with step dt, applied `steps` times (negative: inverse), computed
/// exactly per wavenumber. Matches the time discretization of evolve() where the full generator reduces to H_{T,s}.
FieldState comparison_discrete(const FieldState& u, double dt, int steps, Side s, const GeneratorSet& g);

/// Outgoing part (𝓔^r_{T,+} or 𝓔^l_{T,-}) and incoming part of admissible data.
struct LeftRightSplit {
    FieldState left, right;
    Side side = Side::Plus;
    const FieldState& outgoing() const { return side == Side::Plus ? right : left; }
    const FieldState& incoming() const { return side == Side::Plus ? left : right; }
};

LeftRightSplit split_left_right(const FieldState& u, Side s, const GeneratorSet& g);

/// Outgoing state (u₀, i w u₀) of the given side.
FieldState outgoing_state(const cmat& u0, Side s, const GeneratorSet& g);

} // namespace dsk
