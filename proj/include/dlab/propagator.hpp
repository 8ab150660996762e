#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dlab/decompose.hpp"

namespace dlab {

struct DispersionLaw {
    double a = 1;

    static DispersionLaw wave() { return {1}; }
    static DispersionLaw schrodinger() { return {2}; }
    std::string tag() const;
};

// Radii with quadrature weights for r^{n-1} dr.
struct RadialGrid {
    std::vector<double> r, w;
};

RadialGrid radial_grid_uniform(int n, double r0, double r1, int steps);
RadialGrid radial_grid_gl(int n, double r0, double r1, int panels, int order = 16);

struct PhysicalField {
    int n = 3;
    std::vector<double> times;
    RadialGrid radii;
    std::vector<std::pair<int, int>> channels;  // (k,l)
    std::vector<cplx> data;                     // [channel][time][radius]
    double self_error = 0;                      // node-doubling difference, relative to max |a|

    size_t index(size_t ch, size_t ti, size_t ri) const { return (ch * times.size() + ti) * radii.r.size() + ri; }
    cplx at(size_t ch, size_t ti, size_t ri) const { return data[index(ch, ti, ri)]; }
    // (sum_{k,l} int |a|^2 r^{n-1} dr)^{1/2} at time index ti
    double l2_at(size_t ti) const;
    // (sum_{k,l} |a(t,r)|^2)^{1/2}, the L^2_omega norm on the sphere of radius r
    double angular_l2(size_t ti, size_t ri) const;
};

struct EvolveOptions {
    double tol = 1e-7;
    int max_doublings = 4;
    bool check = true;
    int order = 16;
    long max_nodes = 1L << 17;  // per block
};

using Multiplier = std::function<cplx(double t, double rho)>;

// a_{k,l}(t,r) = i^{-k} r^{-(n-2)/2} int c(rho) m(t,rho) J_{k+(n-2)/2}(r rho) rho^{1/2} drho.
// The node-spacing rule assumes |d arg m / d rho| <= |t| a rho^{a-1}.
PhysicalField synthesize(const SpectralField& f, const std::vector<double>& times, const RadialGrid& radii,
                         const Multiplier& m, double a, const EvolveOptions& opt = {});

PhysicalField evolve(const SpectralField& f, const std::vector<double>& times, const RadialGrid& radii,
                     const DispersionLaw& law, const EvolveOptions& opt = {});

// Inverse Hankel step: profile of time slice ti on the given panel layout, one block per channel.
SpectralField analyze_physical(const PhysicalField& u, size_t ti, double lo, double hi, int panels, int order = 12);

struct RadialWave {
    PhysicalField u;
    // parts carrying e^{+i r rho} and e^{-i r rho} (Hankel split of J), [time][radius];
    // NaN where r * rho_min < 1
    std::vector<cplx> i_plus, i_minus;
};

RadialWave evolve_radial_wave(const SpectralField& f, const std::vector<double>& times, const RadialGrid& radii,
                              const EvolveOptions& opt = {});

// Slope of log max_r |u(t,r)| against log t for the half-wave evolution.
double decay_exponent_fit(const SpectralField& f, const std::vector<double>& times, double window = 20);

// u(t) = cos(tD) f + D^{-1} sin(tD) g
PhysicalField wave_cauchy(const SpectralField& f, const SpectralField& g, const std::vector<double>& times,
                          const RadialGrid& radii, const EvolveOptions& opt = {});
// u_t(t) = -D sin(tD) f + cos(tD) g
PhysicalField wave_cauchy_dt(const SpectralField& f, const SpectralField& g, const std::vector<double>& times,
                             const RadialGrid& radii, const EvolveOptions& opt = {});
// ||D u(t)||^2 + ||u_t(t)||^2 from the physical-space coefficients
std::vector<double> wave_energy(const SpectralField& f, const SpectralField& g, const std::vector<double>& times,
                                const RadialGrid& radii, const EvolveOptions& opt = {});

struct PsiKernelSpec {
    int variant = 1;
    int n = 3;
    int k = 0;
};

// alpha(rho) = rho^{n/2} eta(rho), inverse transform (2 pi)^{-1} int alpha e^{i s rho}
cplx alpha_check(int n, double s);

// Tabulates psi(m, r) on an m grid; shares the inner integrals over m.
std::vector<cplx> psi_kernel_many(const PsiKernelSpec& spec, const std::vector<double>& m, double r);
cplx psi_kernel(const PsiKernelSpec& spec, double m, double r);

struct PsiBound {
    double norm = 0;
    double tail = 0;  // |norm(2M) - norm(M)| / norm(2M)
    double m_max = 0;
};

// || psi(m,r) <m>^{(n-1)/2} r^{-(n-2)/2} ||_{L^2_m}
PsiBound psi_bound_norm(const PsiKernelSpec& spec, double r);

// (k+n-1)...(k+(n+1)/2) / (2^k (k+(n-3)/2)!), n odd
double psi3_factorial_ratio(int n, int k);

}  // namespace dlab
