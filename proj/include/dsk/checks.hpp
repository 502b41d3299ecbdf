#pragma once

#include "dsk/horizons.hpp"
#include "dsk/sampling.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dsk {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;  // ok and within the time limit
    bool ok = false;    // numerical criterion alone
    double seconds = 0;
    double time_limit = 0;  // seconds, 0: none
    std::string detail;
    std::vector<std::pair<std::string, double>> metrics;
};

/// One grid of a refinement pair for the scattering criteria.
struct ScatterGrid {
    double x_max;
    int n_x;
    double tol;
};

struct CheckSettings {
    SpacetimeParams physics;  // scattering and trace criteria
    int n_theta = 10;
    int q_max = 3;
    double cfl = 0.1;
    double sample_dt = 2;
    std::uint64_t seed = 1;
    int suite_size = 10;
    ScatterGrid base{200, 1280, 1e-4};
    ScatterGrid fine{240, 1536, 1e-5};
    // S diagnostic on Ω_{+∞}-type states
    double s_x_max = 320;
    int s_n_x = 2048;
    double s_push = 90;
};

SampleOptions suite_options();

CheckResult check_geometry();
CheckResult check_angular();
CheckResult check_evolution();
CheckResult check_transport();
CheckResult check_wave_operator_rate();
CheckResult check_hardy(std::uint64_t seed = 7);
CheckResult check_negative_control();

struct SuiteRun {
    double seconds = 0;
    double max_w_omega = 0;  // max relative ‖WΩu − u‖
    double max_omega_w = 0;  // max relative ‖ΩWp − p‖ in the profile norm
    double max_psi = 0;      // max relative Ψ defect of Ω±u
    double energy_constant = 0;  // max ‖u‖ / (‖Ω₋u‖ + ‖Ω₊u‖)
    double bound_constant = 0;   // max (‖Ω₋u‖ + ‖Ω₊u‖) / ‖u‖
    double max_trace_gap = 0;    // max relative ‖𝓕𝒯u − Ωu‖
    double max_goursat = 0;      // max relative reconstruction error from traces
    double c_lower = 0, c_upper = 0;  // two-sided trace constants
    double trace_seconds = 0;
    bool converged = true;
    std::string failure;
};

/// Inversion suite on one grid; the trace part is optional.
SuiteRun run_suite(const CheckSettings& s, const ScatterGrid& grid, bool traces);

CheckResult check_inversion(const SuiteRun& base, const SuiteRun& fine);
CheckResult check_membership(const SuiteRun& fine, const CheckSettings& s);
CheckResult check_goursat(const SuiteRun& base, const SuiteRun& fine);

std::string format_line(const CheckResult& r);

} // namespace dsk
