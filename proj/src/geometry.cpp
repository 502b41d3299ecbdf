#include "dsk/geometry.hpp"
#include "dsk/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace dsk {

namespace {

namespace odeint = boost::numeric::odeint;
using State1 = std::array<double, 1>;

std::string num(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

double product_derivative(double lambda_c, const std::array<double, 4>& roots, int i) {
    double p = -lambda_c / 3.0;
    for (int j = 0; j < 4; ++j)
        if (j != i) p *= roots[i] - roots[j];
    return p;
}

double refine_root(const SpacetimeParams& p, double lo, double hi) {
    double flo = delta_r(p, lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = delta_r(p, mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        double d = delta_r_prime(p, r);
        if (d == 0) break;
        double step = delta_r(p, r) / d;
        r -= step;
        if (std::abs(step) < 1e-13 * r) break;
    }
    return r;
}

// i = (1 + e^phi)^(-1/2) and its first two derivatives in t
void half_logistic(double phi, double dphi, double ddphi, double& v, double& dv, double& ddv) {
    if (phi > 700) {
        v = dv = ddv = 0;
        return;
    }
    double sig = 1.0 / (1.0 + std::exp(-phi));
    v = 1.0 / std::sqrt(1.0 + std::exp(phi));
    dv = -0.5 * v * sig * dphi;
    ddv = -0.5 * (dv * sig * dphi + v * sig * (1 - sig) * dphi * dphi + v * sig * ddphi);
}

} // namespace

void SpacetimeParams::validate() const {
    if (!(lambda_c > 0)) throw ConfigError("lambda_c must be > 0 (got " + num(lambda_c) + ")");
    if (!(mass > 0)) throw ConfigError("mass must be > 0 (got " + num(mass) + ")");
    if (!(m2 >= 0)) throw ConfigError("m2 must be >= 0 (got " + num(m2) + ")");
    if (n == 0 && !(m2 > 0)) throw ConfigError("n = 0 requires m2 > 0");
    if (!std::isfinite(spin)) throw ConfigError("spin must be finite");
}

double delta_r(const SpacetimeParams& p, double r) {
    double a2 = p.spin * p.spin;
    return -(p.lambda_c / 3.0) * r * r * r * r + (1.0 - p.lambda_c * a2 / 3.0) * r * r - 2.0 * p.mass * r + a2;
}

double delta_r_prime(const SpacetimeParams& p, double r) {
    double a2 = p.spin * p.spin;
    return -(4.0 * p.lambda_c / 3.0) * r * r * r + 2.0 * (1.0 - p.lambda_c * a2 / 3.0) * r - 2.0 * p.mass;
}

MetricFunctions eval_metric_functions(const SpacetimeParams& p, double r, double theta) {
    if (!(r > 0)) throw DomainError("r must be positive (got " + num(r) + ")");
    double a2 = p.spin * p.spin;
    double mu = std::cos(theta);
    double s2 = 1.0 - mu * mu;
    MetricFunctions m;
    m.delta_r = delta_r(p, r);
    m.delta_theta = 1.0 + p.lambda_c * a2 * mu * mu / 3.0;
    m.rho2 = r * r + a2 * mu * mu;
    m.sigma2 = (r * r + a2) * (r * r + a2) * m.delta_theta - a2 * m.delta_r * s2;
    m.lambda = p.lambda();
    return m;
}

HorizonRoots find_horizons(const SpacetimeParams& p) {
    if (!(p.lambda_c > 0) || !(p.mass > 0)) throw ConfigError("lambda_c and mass must be positive");
    const double r_hi = 1.01 * std::sqrt(3.0 / p.lambda_c) + 1.0;
    const int n_scan = 20000;
    struct Crossing { double lo, hi; bool rising; };
    std::vector<Crossing> cross;
    double r_prev = r_hi * 1e-9;
    double f_prev = delta_r(p, r_prev);
    for (int k = 1; k <= n_scan; ++k) {
        double r = r_hi * k / n_scan;
        double f = delta_r(p, r);
        if ((f > 0) != (f_prev > 0) && f != 0) cross.push_back({r_prev, r, f > 0});
        r_prev = r;
        f_prev = f;
    }
    if (cross.size() < 2 || cross.back().rising || !cross[cross.size() - 2].rising) {
        throw NoHorizonGap("Delta_r has no positive interval between two simple roots (Lambda=" +
                           num(p.lambda_c) + ", M=" + num(p.mass) + ", a=" + num(p.spin) + ")");
    }
    HorizonRoots h;
    h.r_minus = refine_root(p, cross[cross.size() - 2].lo, cross[cross.size() - 2].hi);
    h.r_plus = refine_root(p, cross.back().lo, cross.back().hi);
    for (double rr : {h.r_minus, h.r_plus}) {
        if (std::abs(delta_r_prime(p, rr)) < 1e-10 * std::max(1.0, rr))
            throw NoHorizonGap("degenerate root of Delta_r at r=" + num(rr));
    }
    double b = h.r_minus + h.r_plus;
    double c = -3.0 * p.spin * p.spin / (p.lambda_c * h.r_minus * h.r_plus);
    double disc = std::sqrt(b * b - 4.0 * c);
    h.r_inner = -2.0 * c / (b + disc);
    h.r_negative = -(b + disc) / 2.0;
    if (h.r_inner >= h.r_minus) throw NoHorizonGap("root ordering broken: inner root above r_minus");
    return h;
}

CutoffValue cutoff(double x, double center, double width) {
    CutoffValue c{};
    double t = (x - center) / width + 0.5;
    if (t <= 0) {
        c.i_plus = 0;
        c.i_minus = 1;
        return c;
    }
    if (t >= 1) {
        c.i_plus = 1;
        c.i_minus = 0;
        return c;
    }
    double phi = 1.0 / t - 1.0 / (1.0 - t);
    double dphi = -1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t));
    double ddphi = 2.0 / (t * t * t) - 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
    double v, dv, ddv;
    half_logistic(phi, dphi, ddphi, v, dv, ddv);
    c.i_plus = v;
    c.di_plus = dv / width;
    c.ddi_plus = ddv / (width * width);
    half_logistic(-phi, -dphi, -ddphi, v, dv, ddv);
    c.i_minus = v;
    c.di_minus = dv / width;
    c.ddi_minus = ddv / (width * width);
    return c;
}

double truncation_half_width(const SpacetimeParams& p) {
    HorizonRoots h = find_horizons(p);
    double a2 = p.spin * p.spin;
    double kp = std::abs(delta_r_prime(p, h.r_plus)) / (p.lambda() * (h.r_plus * h.r_plus + a2));
    double km = std::abs(delta_r_prime(p, h.r_minus)) / (p.lambda() * (h.r_minus * h.r_minus + a2));
    return std::log(1e10) / std::min(kp, km);
}

double T_of_gaps(const RadialChart& c, double dm, double dp) {
    double r = dm < dp ? c.roots.r_minus + dm : c.roots.r_plus - dp;
    double v = c.res_t[0] * std::log(dm) + c.res_t[1] * std::log(dp);
    if (c.res_t[2] != 0) v += c.res_t[2] * std::log(std::abs(r - c.roots.r_inner));
    v += c.res_t[3] * std::log(r - c.roots.r_negative);
    return v - c.t_base;
}

double A_of_gaps(const RadialChart& c, double dm, double dp) {
    if (c.params.spin == 0) return 0;
    double r = dm < dp ? c.roots.r_minus + dm : c.roots.r_plus - dp;
    double v = c.res_a[0] * std::log(dm) + c.res_a[1] * std::log(dp) +
               c.res_a[2] * std::log(std::abs(r - c.roots.r_inner)) +
               c.res_a[3] * std::log(r - c.roots.r_negative);
    return v - c.a_base;
}

double T_of_r(const RadialChart& c, double r) {
    return T_of_gaps(c, r - c.roots.r_minus, c.roots.r_plus - r);
}

double A_of_r(const RadialChart& c, double r) {
    return A_of_gaps(c, r - c.roots.r_minus, c.roots.r_plus - r);
}

RadialChart build_background(const SpacetimeParams& p, double x_max, int n_x, double window) {
    p.validate();
    if (n_x < 16) throw GridError("N_x must be >= 16 (got " + std::to_string(n_x) + ")");
    if (!(x_max > 0)) throw GridError("X_max must be positive");

    RadialChart c;
    c.params = p;
    c.roots = find_horizons(p);
    c.lambda = p.lambda();
    const double a = p.spin, a2 = a * a;
    const double rm = c.roots.r_minus, rp = c.roots.r_plus;
    c.r0 = 0.5 * (rm + rp);
    c.kappa_plus = std::abs(delta_r_prime(p, rp)) / (c.lambda * (rp * rp + a2));
    c.kappa_minus = std::abs(delta_r_prime(p, rm)) / (c.lambda * (rm * rm + a2));
    c.l_plus = a * p.n / (a2 + rp * rp);
    c.l_minus = a * p.n / (a2 + rm * rm);
    c.x_max = x_max;
    c.h = 2.0 * x_max / n_x;
    c.window = window;
    c.cutoff_center = 0;
    c.cutoff_width = window / 4.0;

    double kmax = std::max(c.kappa_plus, c.kappa_minus);
    if (c.h * kmax > 1.0 / 8.0)
        throw GridError("grid spacing " + num(c.h) + " gives fewer than 8 nodes per e-folding (kappa=" +
                        num(kmax) + ")");

    std::array<double, 4> roots{rm, rp, c.roots.r_inner, c.roots.r_negative};
    for (int i = 0; i < 4; ++i) {
        double dprime = product_derivative(p.lambda_c, roots, i);
        c.res_t[i] = c.lambda * (roots[i] * roots[i] + a2) / dprime;
        c.res_a[i] = c.lambda * a / dprime;
    }
    c.t_base = 0;
    c.a_base = 0;
    double half = 0.5 * (rp - rm);
    c.t_base = T_of_gaps(c, half, half);
    c.a_base = A_of_gaps(c, half, half);

    const int N = n_x;
    c.x.resize(N);
    for (int j = 0; j < N; ++j) c.x[j] = (j - 0.5 * (N - 1)) * c.h;
    c.dm.resize(N);
    c.dp.resize(N);

    const double lc = p.lambda_c, lam = c.lambda;
    const double r3 = c.roots.r_inner, r4 = c.roots.r_negative;
    const double gap = rp - rm;
    auto stepper = odeint::make_dense_output(1e-14, 1e-14, odeint::runge_kutta_dopri5<State1>());

    // x >= 0: y = ln(r_plus - r)
    {
        std::vector<double> times{0.0};
        std::vector<int> idx;
        for (int j = 0; j < N; ++j)
            if (c.x[j] >= 0) {
                if (c.x[j] > 0) times.push_back(c.x[j]);
                idx.push_back(j);
            }
        auto rhs = [&](const State1& y, State1& dy, double) {
            double r = rp - std::exp(y[0]);
            dy[0] = -(lc / 3.0) * (r - rm) * (r - r3) * (r - r4) / (lam * (r * r + a2));
        };
        State1 y{std::log(half)};
        std::vector<double> ys;
        odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3,
                                [&](const State1& s, double) { ys.push_back(s[0]); });
        int off = (c.x[idx.front()] > 0) ? 1 : 0;
        for (size_t k = 0; k < idx.size(); ++k) {
            double dp = std::exp(ys[k + off]);
            c.dp[idx[k]] = dp;
            c.dm[idx[k]] = gap - dp;
        }
    }
    // x < 0: y = ln(r - r_minus), integrated in s = -x
    {
        std::vector<double> times{0.0};
        std::vector<int> idx;
        for (int j = N - 1; j >= 0; --j)
            if (c.x[j] < 0) {
                times.push_back(-c.x[j]);
                idx.push_back(j);
            }
        auto rhs = [&](const State1& y, State1& dy, double) {
            double r = rm + std::exp(y[0]);
            dy[0] = -(lc / 3.0) * (rp - r) * (r - r3) * (r - r4) / (lam * (r * r + a2));
        };
        State1 y{std::log(half)};
        std::vector<double> ys;
        odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3,
                                [&](const State1& s, double) { ys.push_back(s[0]); });
        for (size_t k = 0; k < idx.size(); ++k) {
            double dm = std::exp(ys[k + 1]);
            c.dm[idx[k]] = dm;
            c.dp[idx[k]] = gap - dm;
        }
    }

    c.r.resize(N);
    c.delta_r.resize(N);
    c.l.resize(N);
    c.dl.resize(N);
    c.A.resize(N);
    c.i_plus.resize(N);
    c.i_minus.resize(N);
    c.di_plus.resize(N);
    c.ddi_plus.resize(N);
    c.di_minus.resize(N);
    c.ddi_minus.resize(N);
    c.w.resize(N);
    c.q.resize(N);
    for (int j = 0; j < N; ++j) {
        double dm = c.dm[j], dp = c.dp[j];
        double r = dm < dp ? rm + dm : rp - dp;
        double R = r * r + a2;
        double dr = (lc / 3.0) * dp * dm * (r - r3) * (r - r4);
        c.r[j] = r;
        c.delta_r[j] = dr;
        c.l[j] = a * p.n / R;
        c.dl[j] = -2.0 * a * p.n * r * dr / (lam * R * R * R);
        c.A[j] = A_of_gaps(c, dm, dp);
        CutoffValue cv = cutoff(c.x[j], c.cutoff_center, c.cutoff_width);
        c.i_plus[j] = cv.i_plus;
        c.i_minus[j] = cv.i_minus;
        c.di_plus[j] = cv.di_plus;
        c.ddi_plus[j] = cv.ddi_plus;
        c.di_minus[j] = cv.di_minus;
        c.ddi_minus[j] = cv.ddi_minus;
        c.q[j] = std::sqrt(dm * dp);
        c.w[j] = 1.0 / c.q[j];
    }
    return c;
}

double r_of_x(const RadialChart& c, double x) {
    const double rm = c.roots.r_minus, rp = c.roots.r_plus, gap = rp - rm;
    const bool right = x >= 0;
    // initial guess from the log-gap table, then Newton on T(y) = x
    double y;
    const int N = c.size();
    double pos = x / c.h + 0.5 * (N - 1);
    int j = static_cast<int>(std::floor(pos));
    if (j >= 1 && j + 2 < N) {
        double s = pos - j;
        double v[4];
        for (int k = 0; k < 4; ++k) v[k] = std::log(right ? c.dp[j - 1 + k] : c.dm[j - 1 + k]);
        y = v[1] + 0.5 * s * (v[2] - v[0] + s * (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3] +
                                                 s * (3 * (v[1] - v[2]) + v[3] - v[0])));
    } else {
        double k = right ? c.kappa_plus : c.kappa_minus;
        y = std::log(0.5 * gap) - k * std::abs(x);
    }
    y = std::min(y, std::log(gap) - 1e-12);
    for (int it = 0; it < 50; ++it) {
        double g = std::exp(y);
        double dm = right ? gap - g : g;
        double dp = right ? g : gap - g;
        double r = dm < dp ? rm + dm : rp - dp;
        double R = r * r + c.params.spin * c.params.spin;
        double dr = (c.params.lambda_c / 3.0) * dp * dm * (r - c.roots.r_inner) * (r - c.roots.r_negative);
        double f = T_of_gaps(c, dm, dp) - x;
        double dfdy = c.lambda * R / dr * (right ? -g : g);
        double step = f / dfdy;
        double ynew = y - step;
        if (ynew >= std::log(gap)) ynew = 0.5 * (y + std::log(gap));
        y = ynew;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(y))) break;
    }
    double g = std::exp(y);
    return right ? rp - g : rm + g;
}

PointMaps horizon_point_maps(const RadialChart& c, const Event& e) {
    if (!(e.r > c.roots.r_minus && e.r < c.roots.r_plus))
        throw DomainError("r=" + num(e.r) + " outside (r_minus, r_plus)");
    double T = T_of_r(c, e.r), A = A_of_r(c, e.r);
    PointMaps m;
    m.star_kerr = {e.t - T, e.r, e.theta, e.phi - A};
    m.kerr_star = {e.t + T, e.r, e.theta, e.phi + A};
    m.f_plus = {e.t - T, c.roots.r_plus, e.theta, e.phi - A};
    m.f_minus = {e.t + T, c.roots.r_minus, e.theta, e.phi + A};
    return m;
}

Event star_kerr_inverse(const RadialChart& c, const Event& e) {
    return {e.t + T_of_r(c, e.r), e.r, e.theta, e.phi + A_of_r(c, e.r)};
}

Event f_plus_inverse(const RadialChart& c, const Event& hp) {
    double r = r_of_x(c, -hp.t);
    return {0.0, r, hp.theta, hp.phi + A_of_r(c, r)};
}

Event f_minus_inverse(const RadialChart& c, const Event& hp) {
    double r = r_of_x(c, hp.t);
    return {0.0, r, hp.theta, hp.phi - A_of_r(c, r)};
}

double fit_decay_rate(const std::vector<double>& x, const std::vector<double>& y, int begin, int end) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = end - begin;
    for (int j = begin; j < end; ++j) {
        double ly = std::log(y[j]);
        sx += x[j];
        sy += ly;
        sxx += x[j] * x[j];
        sxy += x[j] * ly;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return -slope;
}

void write_chart_csv(const RadialChart& c, std::ostream& os) {
    os << "x,r,delta_r,l,A,i_plus,i_minus,w\n";
    os << std::setprecision(15);
    for (int j = 0; j < c.size(); ++j) {
        os << c.x[j] << ',' << c.r[j] << ',' << c.delta_r[j] << ',' << c.l[j] << ',' << c.A[j] << ','
           << c.i_plus[j] << ',' << c.i_minus[j] << ',' << c.w[j] << '\n';
    }
}

} // namespace dsk
