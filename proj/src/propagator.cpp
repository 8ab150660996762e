#include "dlab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>

#include "dlab/errors.hpp"
#include "dlab/quadrature.hpp"
#include "dlab/specfun.hpp"

namespace dlab {

namespace {

const double kPi = std::acos(-1.0);

cplx i_pow_neg(int k)
{
    switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, -1};
    case 2: return {-1, 0};
    default: return {0, 1};
    }
}

// r^{-(n-2)/2} J_nu(r rho), nu = k + (n-2)/2
double radial_kernel(int n, int k, double r, double rho)
{
    const double nu = k + 0.5 * (n - 2);
    const double y = r * rho;
    if (y < 1e-3) {
        const double lead = std::pow(rho, 0.5 * (n - 2)) * std::pow(y, k) * std::pow(2.0, -nu) / std::tgamma(nu + 1);
        return lead * (1 - y * y / (4 * (nu + 1)));
    }
    return std::pow(r, -0.5 * (n - 2)) * bessel_j(nu, y);
}

struct Nodes {
    std::vector<double> rho, w;
};

Nodes refine(const RadialProfile& p, int sub, int order)
{
    const Rule& g = gauss_legendre(order);
    Nodes out;
    const double hp = (p.hi - p.lo) / p.panels, h = hp / sub;
    out.rho.reserve(static_cast<size_t>(p.panels) * sub * order);
    for (int i = 0; i < p.panels * sub; ++i)
        for (int q = 0; q < order; ++q) {
            out.rho.push_back(p.lo + (i + 0.5 + 0.5 * g.x[q]) * h);
            out.w.push_back(0.5 * h * g.w[q]);
        }
    return out;
}

std::vector<std::pair<int, int>> channel_list(const SpectralField& f)
{
    std::vector<std::pair<int, int>> ch;
    for (const Block& b : f.blocks) ch.emplace_back(b.k, b.l);
    std::sort(ch.begin(), ch.end());
    ch.erase(std::unique(ch.begin(), ch.end()), ch.end());
    return ch;
}

// accumulate one block into out (channel ch) using sub-panel factor sub
void add_block(const Block& b, int n, const std::vector<double>& times, const RadialGrid& radii, const Multiplier& m,
               int sub, int order, size_t ch, PhysicalField& out)
{
    const Nodes nd = refine(b.prof, sub, order);
    const size_t N = nd.rho.size(), T = times.size(), R = radii.r.size();
    Eigen::MatrixXd K(N, R);
    for (size_t q = 0; q < N; ++q)
        for (size_t j = 0; j < R; ++j) K(q, j) = radial_kernel(n, b.k, radii.r[j], nd.rho[q]);
    Eigen::MatrixXd Mr(T, N), Mi(T, N);
    for (size_t q = 0; q < N; ++q) {
        const cplx v = nd.w[q] * b.prof(nd.rho[q]) * std::sqrt(nd.rho[q]);
        for (size_t i = 0; i < T; ++i) {
            const cplx z = v * m(times[i], nd.rho[q]);
            Mr(i, q) = z.real();
            Mi(i, q) = z.imag();
        }
    }
    const Eigen::MatrixXd Ar = Mr * K, Ai = Mi * K;
    const cplx ph = i_pow_neg(b.k);
    for (size_t i = 0; i < T; ++i)
        for (size_t j = 0; j < R; ++j) out.data[out.index(ch, i, j)] += ph * cplx(Ar(i, j), Ai(i, j));
}

int required_sub(const RadialProfile& p, double tmax, double a, double rmax, int order)
{
    const double speed = a * std::max(std::pow(std::max(p.lo, 1e-12), a - 1), std::pow(p.hi, a - 1));
    const double drho = kPi / (4 * (tmax * speed + rmax));
    const double hp = (p.hi - p.lo) / p.panels;
    return std::max(1, static_cast<int>(std::ceil(hp / (order * drho))));
}

PhysicalField synthesize_at(const SpectralField& f, const std::vector<double>& times, const RadialGrid& radii,
                            const Multiplier& m, const std::vector<int>& subs, int order)
{
    PhysicalField out;
    out.n = f.n;
    out.times = times;
    out.radii = radii;
    out.channels = channel_list(f);
    out.data.assign(out.channels.size() * times.size() * radii.r.size(), cplx(0));
    for (size_t bi = 0; bi < f.blocks.size(); ++bi) {
        const Block& b = f.blocks[bi];
        const size_t ch = std::lower_bound(out.channels.begin(), out.channels.end(), std::make_pair(b.k, b.l)) - out.channels.begin();
        add_block(b, f.n, times, radii, m, subs[bi], order, ch, out);
    }
    return out;
}

}  // namespace

std::string DispersionLaw::tag() const
{
    if (a == 1) return "wave";
    if (a == 2) return "schrodinger";
    return "general";
}

RadialGrid radial_grid_uniform(int n, double r0, double r1, int steps)
{
    if (steps < 2 || !(r1 > r0) || r0 < 0) throw DomainError("radial grid: need r1 > r0 >= 0 and steps >= 2");
    RadialGrid g;
    g.r = linspace(r0, r1, steps);
    g.w = trapezoid_weights(g.r);
    for (size_t i = 0; i < g.r.size(); ++i) g.w[i] *= std::pow(g.r[i], n - 1);
    return g;
}

RadialGrid radial_grid_gl(int n, double r0, double r1, int panels, int order)
{
    if (panels < 1 || !(r1 > r0) || r0 < 0) throw DomainError("radial grid: need r1 > r0 >= 0 and panels >= 1");
    const Rule& g = gauss_legendre(order);
    RadialGrid out;
    const double h = (r1 - r0) / panels;
    for (int p = 0; p < panels; ++p)
        for (int q = 0; q < order; ++q) {
            const double r = r0 + (p + 0.5 + 0.5 * g.x[q]) * h;
            out.r.push_back(r);
            out.w.push_back(0.5 * h * g.w[q] * std::pow(r, n - 1));
        }
    return out;
}

double PhysicalField::l2_at(size_t ti) const
{
    double acc = 0;
    for (size_t ch = 0; ch < channels.size(); ++ch)
        for (size_t j = 0; j < radii.r.size(); ++j) acc += radii.w[j] * std::norm(at(ch, ti, j));
    return std::sqrt(acc);
}

double PhysicalField::angular_l2(size_t ti, size_t ri) const
{
    double acc = 0;
    for (size_t ch = 0; ch < channels.size(); ++ch) acc += std::norm(at(ch, ti, ri));
    return std::sqrt(acc);
}

PhysicalField synthesize(const SpectralField& f, const std::vector<double>& times, const RadialGrid& radii,
                         const Multiplier& m, double a, const EvolveOptions& opt)
{
    if (radii.r.size() != radii.w.size()) throw DomainError("synthesize: radius/weight size mismatch");
    for (size_t i = 1; i < radii.r.size(); ++i)
        if (!(radii.r[i] > radii.r[i - 1])) throw DomainError("synthesize: radii must be strictly increasing");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("synthesize: times must be strictly increasing");
    for (const Block& b : f.blocks)
        if (b.prof.lo < 0) throw DomainError("synthesize: profile support must be in [0, inf)");
    double tmax = 0, rmax = radii.r.empty() ? 0 : radii.r.back();
    for (double t : times) tmax = std::max(tmax, std::fabs(t));
    std::vector<int> subs;
    for (const Block& b : f.blocks) {
        const int s = required_sub(b.prof, tmax, a, rmax, opt.order);
        const long nodes = static_cast<long>(s) * b.prof.panels * opt.order * (opt.check ? 2 : 1);
        if (nodes > opt.max_nodes)
            throw ResolutionError("synthesize: node-spacing rule needs " + std::to_string(nodes) +
                                  " frequency nodes for one block (limit " + std::to_string(opt.max_nodes) + ")");
        subs.push_back(s);
    }
    PhysicalField coarse = synthesize_at(f, times, radii, m, subs, opt.order);
    if (!opt.check) return coarse;
    for (int d = 0; d <= opt.max_doublings; ++d) {
        for (int& s : subs) s *= 2;
        PhysicalField fine = synthesize_at(f, times, radii, m, subs, opt.order);
        double diff = 0, scale = 0;
        for (size_t i = 0; i < fine.data.size(); ++i) {
            diff = std::max(diff, std::abs(fine.data[i] - coarse.data[i]));
            scale = std::max(scale, std::abs(fine.data[i]));
        }
        fine.self_error = scale > 0 ? diff / scale : 0;
        if (fine.self_error <= opt.tol) return fine;
        coarse = std::move(fine);
    }
    throw ConvergenceError("synthesize: node doubling did not reach " + std::to_string(opt.tol) + " (last " +
                           std::to_string(coarse.self_error) + ")");
}

PhysicalField evolve(const SpectralField& f, const std::vector<double>& times, const RadialGrid& radii,
                     const DispersionLaw& law, const EvolveOptions& opt)
{
    if (!(law.a > 0)) throw DomainError("evolve: dispersion exponent must be positive");
    const double a = law.a;
    Multiplier m = [a](double t, double rho) {
        const double ph = t * std::pow(rho, a);
        return cplx(std::cos(ph), std::sin(ph));
    };
    return synthesize(f, times, radii, m, a, opt);
}

SpectralField analyze_physical(const PhysicalField& u, size_t ti, double lo, double hi, int panels, int order)
{
    SpectralField out;
    out.n = u.n;
    const size_t R = u.radii.r.size();
    for (size_t ch = 0; ch < u.channels.size(); ++ch) {
        const auto [k, l] = u.channels[ch];
        const cplx ph = std::conj(i_pow_neg(k));
        Block b;
        b.k = k;
        b.l = l;
        b.j = static_cast<int>(std::lround(std::log2(std::max(hi, 1e-300)))) - 1;
        b.prof = make_profile(lo, hi, panels, order, [&](double rho) {
            cplx acc = 0;
            for (size_t j = 0; j < R; ++j) acc += u.radii.w[j] * u.at(ch, ti, j) * radial_kernel(u.n, k, u.radii.r[j], rho);
            return ph * std::sqrt(rho) * acc;
        });
        out.blocks.push_back(std::move(b));
    }
    return out;
}

RadialWave evolve_radial_wave(const SpectralField& f, const std::vector<double>& times, const RadialGrid& radii,
                              const EvolveOptions& opt)
{
    if (!f.radial()) throw DomainError("evolve_radial_wave: input has k > 0 blocks");
    RadialWave out;
    out.u = evolve(f, times, radii, DispersionLaw::wave(), opt);
    const size_t T = times.size(), R = radii.r.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.i_plus.assign(T * R, cplx(nan, nan));
    out.i_minus.assign(T * R, cplx(nan, nan));
    double tmax = 0;
    for (double t : times) tmax = std::max(tmax, std::fabs(t));
    double rho_min = 1e300;
    for (const Block& b : f.blocks) rho_min = std::min(rho_min, b.prof.lo);
    for (size_t j = 0; j < R; ++j) {
        const double r = radii.r[j];
        if (r * rho_min < 1) continue;
        for (size_t i = 0; i < T; ++i) {
            out.i_plus[i * R + j] = 0;
            out.i_minus[i * R + j] = 0;
        }
        for (const Block& b : f.blocks) {
            const int sub = 2 * required_sub(b.prof, tmax, 1, radii.r.back(), opt.order);
            const Nodes nd = refine(b.prof, sub, opt.order);
            for (size_t q = 0; q < nd.rho.size(); ++q) {
                const double y = r * nd.rho[q];
                // J = (H1 + H2)/2 with H1,2 = J +- iY = sqrt(2/(pi y)) e^{+-i phase} (m1 +- i m2)
                const double nu = 0.5 * (f.n - 2);
                const double jv = bessel_j(nu, y), yv = std::cyl_neumann(nu, y);
                const cplx v = nd.w[q] * b.prof(nd.rho[q]) * std::sqrt(nd.rho[q]) * std::pow(r, -0.5 * (f.n - 2)) * 0.5;
                const cplx kp(jv, yv), km(jv, -yv);
                for (size_t i = 0; i < T; ++i) {
                    const cplx e = std::polar(1.0, times[i] * nd.rho[q]);
                    out.i_plus[i * R + j] += v * e * kp;
                    out.i_minus[i * R + j] += v * e * km;
                }
            }
        }
    }
    return out;
}

double decay_exponent_fit(const SpectralField& f, const std::vector<double>& times, double window)
{
    if (times.size() < 2) throw DomainError("decay_exponent_fit: need at least two times");
    std::vector<double> x, y;
    EvolveOptions opt;
    opt.check = false;
    for (double t : times) {
        if (!(t > window)) throw DomainError("decay_exponent_fit: times must exceed the window");
        const RadialGrid g = radial_grid_uniform(f.n, t - window, t + window, static_cast<int>(40 * window) + 1);
        const PhysicalField u = evolve(f, {t}, g, DispersionLaw::wave(), opt);
        double peak = 0;
        for (size_t j = 0; j < g.r.size(); ++j) peak = std::max(peak, u.angular_l2(0, j));
        x.push_back(std::log(t));
        y.push_back(std::log(peak));
    }
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

namespace {

void check_low_frequency(const SpectralField& g)
{
    for (const Block& b : g.blocks)
        if (b.prof.lo <= 0 && std::abs(b.prof(0.0)) > 1e-12)
            throw DivergenceError("wave_cauchy: D^{-1} g diverges at zero frequency");
}

SpectralField times_rho(const SpectralField& f, double p)
{
    SpectralField out = f;
    for (Block& b : out.blocks)
        for (int i = 0; i < b.prof.size(); ++i) b.prof.c[i] *= std::pow(b.prof.node(i), p);
    return out;
}

PhysicalField combine(const PhysicalField& a, const PhysicalField& b)
{
    // same time/radius grid; channel union
    PhysicalField out;
    out.n = a.n;
    out.times = a.times;
    out.radii = a.radii;
    out.channels = a.channels;
    out.channels.insert(out.channels.end(), b.channels.begin(), b.channels.end());
    std::sort(out.channels.begin(), out.channels.end());
    out.channels.erase(std::unique(out.channels.begin(), out.channels.end()), out.channels.end());
    out.data.assign(out.channels.size() * out.times.size() * out.radii.r.size(), cplx(0));
    out.self_error = std::max(a.self_error, b.self_error);
    for (const PhysicalField* src : {&a, &b})
        for (size_t c = 0; c < src->channels.size(); ++c) {
            const size_t oc = std::lower_bound(out.channels.begin(), out.channels.end(), src->channels[c]) - out.channels.begin();
            for (size_t i = 0; i < out.times.size(); ++i)
                for (size_t j = 0; j < out.radii.r.size(); ++j) out.data[out.index(oc, i, j)] += src->at(c, i, j);
        }
    return out;
}

Multiplier mult_cos = [](double t, double rho) { return cplx(std::cos(t * rho), 0); };
Multiplier mult_sin = [](double t, double rho) { return cplx(std::sin(t * rho), 0); };

}  // namespace

PhysicalField wave_cauchy(const SpectralField& f, const SpectralField& g, const std::vector<double>& times,
                          const RadialGrid& radii, const EvolveOptions& opt)
{
    check_low_frequency(g);
    Multiplier sinc = [](double t, double rho) { return cplx(rho > 0 ? std::sin(t * rho) / rho : t, 0); };
    return combine(synthesize(f, times, radii, mult_cos, 1, opt), synthesize(g, times, radii, sinc, 1, opt));
}

PhysicalField wave_cauchy_dt(const SpectralField& f, const SpectralField& g, const std::vector<double>& times,
                             const RadialGrid& radii, const EvolveOptions& opt)
{
    return combine(synthesize(scale(times_rho(f, 1), -1), times, radii, mult_sin, 1, opt),
                   synthesize(g, times, radii, mult_cos, 1, opt));
}

std::vector<double> wave_energy(const SpectralField& f, const SpectralField& g, const std::vector<double>& times,
                                const RadialGrid& radii, const EvolveOptions& opt)
{
    // D u = cos(tD) D f + sin(tD) g
    const PhysicalField du = combine(synthesize(times_rho(f, 1), times, radii, mult_cos, 1, opt),
                                     synthesize(g, times, radii, mult_sin, 1, opt));
    const PhysicalField ut = wave_cauchy_dt(f, g, times, radii, opt);
    std::vector<double> e(times.size());
    for (size_t i = 0; i < times.size(); ++i) e[i] = std::pow(du.l2_at(i), 2) + std::pow(ut.l2_at(i), 2);
    return e;
}

// ---------------------------------------------------------------- psi kernels

cplx alpha_check(int n, double s)
{
    const int panels = 16 + static_cast<int>(std::ceil(std::fabs(s)));
    const Rule& g = gauss_legendre(16);
    const double lo = 0.25, hi = 2.0, h = (hi - lo) / panels;
    cplx acc = 0;
    for (int p = 0; p < panels; ++p)
        for (int q = 0; q < 16; ++q) {
            const double rho = lo + (p + 0.5 + 0.5 * g.x[q]) * h;
            acc += 0.5 * h * g.w[q] * std::pow(rho, 0.5 * n) * bump_eta(rho) * std::polar(1.0, s * rho);
        }
    return acc / (2 * kPi);
}

namespace {

struct PsiAmplitude {
    std::vector<double> rho, w;
    std::vector<cplx> amp;  // psi(m) = (2 pi)^{-1} sum w amp e^{i m rho}
    int panels = 0;
};

void check_psi(const PsiKernelSpec& spec, double r)
{
    if (spec.variant < 1 || spec.variant > 3) throw DomainError("psi_kernel: variant must be 1, 2 or 3");
    if (spec.n < 2 || spec.k < 0) throw DomainError("psi_kernel: need n >= 2 and k >= 0");
    if (!(r > 0)) throw DomainError("psi_kernel: r must be positive");
    if (spec.variant == 3 && (spec.n % 2 == 0 || r > 1)) throw DomainError("psi_kernel: variant 3 is for odd n and r <= 1");
}

PsiAmplitude psi_amplitude(const PsiKernelSpec& spec, double r, int panels)
{
    const int n = spec.n;
    const double nu = spec.k + 0.5 * (n - 2);
    const Rule& g = gauss_legendre(16);
    const double lo = 0.25, hi = 2.0, hr = (hi - lo) / panels;
    PsiAmplitude out;
    out.panels = panels;
    for (int p = 0; p < panels; ++p)
        for (int q = 0; q < 16; ++q) {
            out.rho.push_back(lo + (p + 0.5 + 0.5 * g.x[q]) * hr);
            out.w.push_back(0.5 * hr * g.w[q]);
        }
    const std::vector<double>& rho = out.rho;
    std::vector<cplx>& amp = out.amp;
    amp.assign(rho.size(), cplx(0));
    if (spec.variant == 2 && n % 2 == 0) return out;
    if (spec.variant == 1) {
        const int pt = 8 + static_cast<int>(std::ceil((2 * r + nu) * 2 * kPi / 6));
        const double ht = 2 * kPi / pt;
        const bool integer_order = n % 2 == 0;
        for (size_t i = 0; i < rho.size(); ++i) {
            const double e = bump_eta(rho[i]);
            if (e == 0) continue;
            cplx inner = 0;
            if (integer_order) {
                // periodic integrand: the integral is 2 pi i^nu J_nu(rho r)
                amp[i] = std::pow(rho[i], 0.5 * n) * e * 2 * kPi * std::conj(i_pow_neg(static_cast<int>(nu))) * bessel_j(nu, rho[i] * r);
                continue;
            }
            for (int p = 0; p < pt; ++p)
                for (int q = 0; q < 16; ++q) {
                    const double th = (p + 0.5 + 0.5 * g.x[q]) * ht;
                    inner += 0.5 * ht * g.w[q] * std::polar(1.0, rho[i] * r * std::cos(th) - nu * th);
                }
            amp[i] = std::pow(rho[i], 0.5 * n) * e * inner;
        }
    } else if (spec.variant == 2) {
        const double sgn = std::sin(nu * kPi);
        for (size_t i = 0; i < rho.size(); ++i) {
            const double e = bump_eta(rho[i]);
            if (e == 0) continue;
            const double x = rho[i] * r;
            const double U = std::min(std::asinh(45 / x), 45 / nu);
            auto h = [&](double u) { return std::exp(-nu * u - x * std::sinh(u)); };
            const double inner = integrate_doubling(h, 0, U, 1e-13, 1e-300, 16).value;
            amp[i] = sgn * std::pow(rho[i], 0.5 * n) * e * inner;
        }
    } else {
        const RuleL gj = gauss_jacobi(40, nu - 0.5L, nu - 0.5L);
        const double c = 2 * kPi / (std::pow(2.0, nu) * std::sqrt(kPi) * std::tgamma(nu + 0.5)) * std::pow(r, nu);
        for (size_t i = 0; i < rho.size(); ++i) {
            const double e = bump_eta(rho[i]);
            if (e == 0) continue;
            cplx inner = 0;
            for (size_t q = 0; q < gj.x.size(); ++q)
                inner += static_cast<double>(gj.w[q]) * std::polar(1.0, rho[i] * r * static_cast<double>(gj.x[q]));
            amp[i] = c * std::pow(rho[i], 0.5 * n + nu) * e * inner;
        }
    }
    return out;
}

int psi_panels(const PsiKernelSpec& spec, double r, double mmax)
{
    const double nu = spec.k + 0.5 * (spec.n - 2);
    return 48 + static_cast<int>(std::ceil((mmax + 2 * r + nu) * 1.75 / 3));
}

// sum_i C(j,i) int |A^{(i)}|^2 drho, derivatives by per-panel spectral differentiation
double sobolev_sum(const PsiAmplitude& a, int j)
{
    const int order = 16;
    const Rule& g = gauss_legendre(order);
    std::vector<double> lam(order);
    for (int i = 0; i < order; ++i) lam[i] = (i % 2 ? -1.0 : 1.0) * std::sqrt((1 - g.x[i] * g.x[i]) * g.w[i]);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(order, order);
    for (int i = 0; i < order; ++i) {
        for (int m = 0; m < order; ++m)
            if (m != i) {
                D(i, m) = lam[m] / lam[i] / (g.x[i] - g.x[m]);
                D(i, i) -= D(i, m);
            }
    }
    const double h = 1.75 / a.panels;
    D *= 2 / h;
    double total = 0;
    Eigen::VectorXcd v(order);
    for (int p = 0; p < a.panels; ++p) {
        for (int q = 0; q < order; ++q) v(q) = a.amp[p * order + q];
        double binom = 1;
        for (int i = 0; i <= j; ++i) {
            double acc = 0;
            for (int q = 0; q < order; ++q) acc += a.w[p * order + q] * std::norm(v(q));
            total += binom * acc;
            binom = binom * (j - i) / (i + 1);
            v = (D.cast<cplx>() * v).eval();
        }
    }
    return total;
}

}  // namespace

std::vector<cplx> psi_kernel_many(const PsiKernelSpec& spec, const std::vector<double>& m, double r)
{
    check_psi(spec, r);
    double mmax = 0;
    for (double v : m) mmax = std::max(mmax, std::fabs(v));
    const PsiAmplitude a = psi_amplitude(spec, r, psi_panels(spec, r, mmax));
    std::vector<cplx> out(m.size(), cplx(0));
    if (spec.variant == 2 && spec.n % 2 == 0) return out;
    for (size_t j = 0; j < m.size(); ++j) {
        cplx acc = 0;
        for (size_t i = 0; i < a.rho.size(); ++i)
            if (a.amp[i] != cplx(0)) acc += a.w[i] * a.amp[i] * std::polar(1.0, m[j] * a.rho[i]);
        out[j] = acc / (2 * kPi);
    }
    return out;
}

cplx psi_kernel(const PsiKernelSpec& spec, double m, double r) { return psi_kernel_many(spec, {m}, r)[0]; }

PsiBound psi_bound_norm(const PsiKernelSpec& spec, double r)
{
    check_psi(spec, r);
    const double wr = std::pow(r, -0.5 * (spec.n - 2));
    PsiBound b;
    if (spec.variant == 2 && spec.n % 2 == 0) return b;
    if (spec.n % 2 == 1) {
        // <m>^{n-1} is a polynomial in m^2: Plancherel against derivatives in rho
        const int j = (spec.n - 1) / 2;
        const int p0 = psi_panels(spec, r, 0);
        const double s1 = sobolev_sum(psi_amplitude(spec, r, p0), j);
        const double s2 = sobolev_sum(psi_amplitude(spec, r, 2 * p0), j);
        b.norm = wr * std::sqrt(s2 / (2 * kPi));
        b.tail = s2 > 0 ? std::fabs(std::sqrt(s1 / s2) - 1) : 0;
        b.m_max = std::numeric_limits<double>::infinity();
    } else {
        const double M = r + 240;
        const Rule& g = gauss_legendre(12);
        std::vector<double> m, w;
        const int panels = static_cast<int>(std::ceil(M));
        const double h = 2 * M / panels;
        for (int p = 0; p < panels; ++p)
            for (int q = 0; q < 12; ++q) {
                m.push_back(-M + (p + 0.5 + 0.5 * g.x[q]) * h);
                w.push_back(0.5 * h * g.w[q]);
            }
        const std::vector<cplx> psi = psi_kernel_many(spec, m, r);
        double inner = 0, all = 0;
        for (size_t i = 0; i < m.size(); ++i) {
            const double v = w[i] * std::norm(psi[i] * wr) * std::pow(1 + m[i] * m[i], 0.5 * (spec.n - 1));
            all += v;
            if (std::fabs(m[i]) <= 0.5 * M) inner += v;
        }
        b.norm = std::sqrt(all);
        b.m_max = M;
        // mass in the outer half bounds what lies beyond M for a decaying integrand
        b.tail = all > 0 ? (all - inner) / all : 0;
    }
    if (b.tail > 1e-3)
        throw ConvergenceError("psi_bound_norm: tail not under control (" + std::to_string(b.tail) + ")");
    return b;
}

double psi3_factorial_ratio(int n, int k)
{
    if (n % 2 == 0) throw DomainError("psi3_factorial_ratio: n must be odd");
    double num = 1;
    for (int j = 1; j <= (n - 1) / 2; ++j) num *= k + n - j;
    return num / (std::pow(2.0, k) * std::tgamma(k + 0.5 * (n - 1)));
}

}  // namespace dlab
