#pragma once

#include <array>
#include <iosfwd>
#include <vector>

namespace dsk {

struct SpacetimeParams {
    double lambda_c = 0.05;
    double mass = 1.0;
    double spin = 0.05;
    int n = 1;
    double m2 = 0.0;

    double lambda() const { return 1.0 + lambda_c * spin * spin / 3.0; }
    // throws ConfigError naming the first violated invariant
    void validate() const;
};

struct MetricFunctions {
    double delta_r;
    double delta_theta;
    double rho2;
    double sigma2;
    double lambda;
};

MetricFunctions eval_metric_functions(const SpacetimeParams& p, double r, double theta);

double delta_r(const SpacetimeParams& p, double r);
double delta_r_prime(const SpacetimeParams& p, double r);

/// Roots of Δ_r: the gap (r_minus, r_plus) plus the two remaining roots of the quartic.
struct HorizonRoots {
    double r_minus = 0, r_plus = 0;
    double r_inner = 0;   // root below r_minus (0 when a = 0)
    double r_negative = 0;
};

HorizonRoots find_horizons(const SpacetimeParams& p);

/// Smoothstep s(t) = E(t)/(E(t)+E(1-t)), E(t) = exp(-1/t), with i = sqrt(s) and its derivatives.
struct CutoffValue {
    double i_plus, i_minus;
    double di_plus, ddi_plus;  // derivatives in x
    double di_minus, ddi_minus;
};

CutoffValue cutoff(double x, double center, double width);

struct RadialChart {
    SpacetimeParams params;
    HorizonRoots roots;
    double r0 = 0, lambda = 1;
    double kappa_plus = 0, kappa_minus = 0;
    double l_plus = 0, l_minus = 0;
    double x_max = 0, h = 0, window = 40;
    double cutoff_center = 0, cutoff_width = 10;

    // partial-fraction residues for dT/dr and dA/dr, ordered (r_minus, r_plus, r_inner, r_negative)
    std::array<double, 4> res_t{}, res_a{};
    double t_base = 0, a_base = 0;

    std::vector<double> x, r;
    std::vector<double> dm, dp;  // r - r_minus, r_plus - r
    std::vector<double> delta_r, l, dl, A;
    std::vector<double> i_plus, i_minus, di_plus, ddi_plus, di_minus, ddi_minus;
    std::vector<double> w, q;

    int size() const { return static_cast<int>(x.size()); }
};

/// Nodes x_j = (j - (N-1)/2) h with h = 2 X_max / N (periodic cell of length 2 X_max).
RadialChart build_background(const SpacetimeParams& p, double x_max, int n_x, double window = 40.0);

/// Smallest half-width satisfying max(exp(-kappa_pm X)) < 1e-10.
double truncation_half_width(const SpacetimeParams& p);

double T_of_r(const RadialChart& c, double r);
double A_of_r(const RadialChart& c, double r);
/// Same as T_of_r / A_of_r with the horizon distances supplied directly (accurate near r_pm).
double T_of_gaps(const RadialChart& c, double dm, double dp);
double A_of_gaps(const RadialChart& c, double dm, double dp);

/// r(x) for arbitrary x by interpolation of log-gap tables (inverse of T).
double r_of_x(const RadialChart& c, double x);

struct Event {
    double t, r, theta, phi;
};

struct PointMaps {
    Event star_kerr;   // (*t, r, θ, *φ)
    Event kerr_star;   // (t*, r, θ, φ*)
    Event f_plus;      // point on the future cosmological horizon, *Kerr coordinates
    Event f_minus;     // point on the future black-hole horizon, Kerr* coordinates
};

PointMaps horizon_point_maps(const RadialChart& c, const Event& e);
Event star_kerr_inverse(const RadialChart& c, const Event& e);
/// Σ₀ point (t = 0) reached from a horizon point by following the outgoing / incoming congruence.
Event f_plus_inverse(const RadialChart& c, const Event& horizon_point);
Event f_minus_inverse(const RadialChart& c, const Event& horizon_point);

double fit_decay_rate(const std::vector<double>& x, const std::vector<double>& y, int begin, int end);

void write_chart_csv(const RadialChart& c, std::ostream& os);

} // namespace dsk
