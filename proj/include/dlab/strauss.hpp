#pragma once

#include <functional>
#include <string>
#include <vector>

namespace dlab {

struct CriticalExponents {
    double s_c = 0;
    double s_d = 0;
    double p_conf = 0;
    double p_c = 0;
    double q = 0;        // time exponent of the solution space L^{qp}_t L^p_{|x|}
    std::string branch;  // "local" (p <= p_c) or "global" (p > p_c)
};

CriticalExponents exponents(int n, double p);

// box u = coef sign(u)|u|^p, radial data u(0) = eps A phi(r/R0), u_t(0) = g_amp eps A phi(r/R0),
// phi(s) = (1 - s^2)^3 on [0,1].
struct StraussConfig {
    int n = 3;
    double p = 2.2;
    double eps = 0.1;
    double amplitude = 10;
    double width = 1;  // R0
    double g_amp = 0;
    double coef = 1;
    int max_iter = 60;
    double tol = 1e-8;
    double ball = 2;         // contraction ball radius in units of the homogeneous S norm
    double ceiling = 1e6;    // blow-up ceiling, same units
    double resolution = 1;   // grid refinement factor
    double max_cells = 4e7;  // n = 2 space-time cell budget
};

struct RadialSolution {
    std::vector<double> t, r;
    std::vector<double> u;  // t-major
    double at(size_t ti, size_t ri) const { return u[ti * r.size() + ri]; }
};

struct PicardResult {
    bool converged = false;
    std::string reason;
    int iterations = 0;
    double s_norm = 0;
    double hom_norm = 0;
    std::vector<double> norms;  // S norm of each iterate
    std::vector<double> diffs;  // S norm of successive differences
    RadialSolution sample;      // 17 times on [0,T] x 65 radii on [0,T+R0]
};

PicardResult picard_solve(const StraussConfig& cfg, double T);

// Zero-data solution of box w = h on [0,T], sampled as in PicardResult.
RadialSolution duhamel(const StraussConfig& cfg, const std::function<double(double, double)>& h, double T);

// S norm of the free solution with the configured data.
double homogeneous_norm(const StraussConfig& cfg, double T);

struct LifespanResult {
    double eps = 0;
    double T = 0;  // largest T with a verified contraction
    double lo = 0, hi = 0;
    int iterations = 0;
    int solves = 0;
};

struct LifespanOptions {
    double T_start = 1;
    double T_min = 1e-3;
    double T_max = 1e7;
    double rel = 0.05;
};

LifespanResult lifespan(const StraussConfig& cfg, const LifespanOptions& opt = {});

// Least-squares slope of log y against log x, and Pearson correlation.
double log_slope(const std::vector<double>& x, const std::vector<double>& y);
double correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dlab
