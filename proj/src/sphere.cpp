#include "dlab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dlab/errors.hpp"
#include "dlab/quadrature.hpp"
#include "dlab/rng.hpp"

namespace dlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::int64_t binom(std::int64_t a, std::int64_t b)
{
    if (b < 0 || b > a) return 0;
    b = std::min(b, a - b);
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
}

void check_n(int n)
{
    if (n != 2 && n != 3) throw DomainError("angular grids implemented for n = 2, 3 only (n=" + std::to_string(n) + ")");
}

// normalized associated Legendre P̄_k^m(x), k <= K, stored at k(k+1)/2 + m
void legendre_table(int K, double x, std::vector<double>& p)
{
    p.assign((K + 1) * (K + 2) / 2, 0.0);
    auto at = [](int k, int m) { return k * (k + 1) / 2 + m; };
    const double s = std::sqrt(std::max(0.0, 1 - x * x));
    double pmm = 1 / std::sqrt(4 * kPi);
    for (int m = 0; m <= K; ++m) {
        if (m > 0) pmm *= std::sqrt((2.0 * m + 1) / (2.0 * m)) * s;
        p[at(m, m)] = pmm;
        if (m + 1 <= K) p[at(m + 1, m)] = std::sqrt(2.0 * m + 3) * x * pmm;
        for (int k = m + 2; k <= K; ++k) {
            const double a = std::sqrt((4.0 * k * k - 1) / (double(k) * k - double(m) * m));
            const double b = std::sqrt((double(k - 1) * (k - 1) - double(m) * m) / (4.0 * (k - 1) * (k - 1) - 1));
            p[at(k, m)] = a * (x * p[at(k - 1, m)] - b * p[at(k - 2, m)]);
        }
    }
}

int legendre_at(int k, int m) { return k * (k + 1) / 2 + m; }

void check_resolution(const AngularGrid& g, int K)
{
    if (g.degree < 2 * K)
        throw ResolutionError("angular grid exactness " + std::to_string(g.degree) +
                              " too low for K=" + std::to_string(K) + "; need exactness >= " +
                              std::to_string(2 * K));
}

}  // namespace

std::int64_t dim_harmonic(int n, int k)
{
    if (n < 2 || k < 0) throw DomainError("dim_harmonic: need n >= 2, k >= 0");
    if (k == 0) return 1;
    return (2 * k + n - 2) * binom(n + k - 3, k - 1) / k;
}

std::int64_t channel_count(int n, int K)
{
    std::int64_t c = 0;
    for (int k = 0; k <= K; ++k) c += dim_harmonic(n, k);
    return c;
}

std::int64_t channel_index(int n, int k, int l)
{
    if (n == 2) return k == 0 ? 0 : 2 * k - 2 + l;
    if (n == 3) return std::int64_t(k) * k + l - 1;
    return channel_count(n, k - 1) + l - 1;
}

double sphere_area(int n) { return 2 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0); }

void sph_harmonics_all(int n, int K, const Point3& w, double* out)
{
    check_n(n);
    const double r2 = n == 2 ? w[0] * w[0] + w[1] * w[1] : w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    if (std::fabs(r2 - 1) > 2e-12) throw DomainError("sph_harmonic: point not on the unit sphere");
    const double phi = std::atan2(w[1], w[0]);
    if (n == 2) {
        out[0] = 1 / std::sqrt(2 * kPi);
        const double c = 1 / std::sqrt(kPi);
        for (int k = 1; k <= K; ++k) {
            out[2 * k - 1] = c * std::cos(k * phi);
            out[2 * k] = c * std::sin(k * phi);
        }
        return;
    }
    std::vector<double> p;
    legendre_table(K, std::clamp(w[2], -1.0, 1.0), p);
    for (int k = 0; k <= K; ++k) {
        double* o = out + std::int64_t(k) * k;
        o[0] = p[legendre_at(k, 0)];
        for (int m = 1; m <= k; ++m) {
            const double v = std::sqrt(2.0) * p[legendre_at(k, m)];
            o[2 * m - 1] = v * std::cos(m * phi);
            o[2 * m] = v * std::sin(m * phi);
        }
    }
}

double sph_harmonic(int n, int k, int l, const Point3& omega)
{
    check_n(n);
    if (k < 0 || l < 1 || l > dim_harmonic(n, k)) throw DomainError("sph_harmonic: invalid index");
    std::vector<double> all(channel_count(n, k));
    sph_harmonics_all(n, k, omega, all.data());
    return all[channel_index(n, k, l)];
}

AngularGrid make_angular_grid(int n, int degree)
{
    check_n(n);
    AngularGrid g;
    g.n = n;
    g.degree = std::max(degree, 0);
    const int nphi = g.degree + 1;
    g.phi.resize(nphi);
    for (int j = 0; j < nphi; ++j) g.phi[j] = 2 * kPi * j / nphi;
    if (n == 2) {
        for (int j = 0; j < nphi; ++j) {
            g.nodes.push_back({std::cos(g.phi[j]), std::sin(g.phi[j]), 0.0});
            g.weights.push_back(2 * kPi / nphi);
        }
        return g;
    }
    const int nth = g.degree / 2 + 1;
    const Rule& gl = gauss_legendre(nth);
    g.ct = gl.x;
    g.ct_w = gl.w;
    for (int i = 0; i < nth; ++i) {
        const double z = gl.x[i], s = std::sqrt(1 - z * z);
        for (int j = 0; j < nphi; ++j) {
            g.nodes.push_back({s * std::cos(g.phi[j]), s * std::sin(g.phi[j]), z});
            g.weights.push_back(gl.w[i] * 2 * kPi / nphi);
        }
    }
    return g;
}

AngularSpectrum make_spectrum(int n, int K)
{
    AngularSpectrum s;
    s.n = n;
    s.K = K;
    s.c.assign(channel_count(n, K), cplx(0, 0));
    return s;
}

std::vector<double> basis_matrix(const AngularGrid& g, int K)
{
    const std::int64_t nc = channel_count(g.n, K);
    std::vector<double> m(g.nodes.size() * nc);
    for (size_t i = 0; i < g.nodes.size(); ++i) sph_harmonics_all(g.n, K, g.nodes[i], m.data() + i * nc);
    return m;
}

AngularSpectrum analyze_angular(const AngularGrid& g, const std::vector<cplx>& f, int K)
{
    check_resolution(g, K);
    if (f.size() != g.nodes.size()) throw DomainError("analyze_angular: sample count does not match grid");
    AngularSpectrum s = make_spectrum(g.n, K);
    const int nphi = static_cast<int>(g.phi.size());
    const double wphi = 2 * kPi / nphi;
    if (g.n == 2) {
        for (int j = 0; j < nphi; ++j) s.c[0] += wphi * f[j] / std::sqrt(2 * kPi);
        for (int k = 1; k <= K; ++k) {
            cplx a = 0, b = 0;
            for (int j = 0; j < nphi; ++j) {
                a += f[j] * std::cos(k * g.phi[j]);
                b += f[j] * std::sin(k * g.phi[j]);
            }
            s.c[2 * k - 1] = a * wphi / std::sqrt(kPi);
            s.c[2 * k] = b * wphi / std::sqrt(kPi);
        }
        return s;
    }
    const int nth = static_cast<int>(g.ct.size());
    std::vector<double> p;
    std::vector<cplx> fc(K + 1), fs(K + 1);
    for (int i = 0; i < nth; ++i) {
        // azimuthal moments of ring i
        for (int m = 0; m <= K; ++m) {
            cplx a = 0, b = 0;
            for (int j = 0; j < nphi; ++j) {
                const cplx v = f[i * nphi + j];
                a += v * std::cos(m * g.phi[j]);
                b += v * std::sin(m * g.phi[j]);
            }
            fc[m] = a * wphi;
            fs[m] = b * wphi;
        }
        legendre_table(K, g.ct[i], p);
        const double w = g.ct_w[i];
        for (int k = 0; k <= K; ++k) {
            s.c[std::int64_t(k) * k] += w * p[legendre_at(k, 0)] * fc[0];
            for (int m = 1; m <= k; ++m) {
                const double v = w * std::sqrt(2.0) * p[legendre_at(k, m)];
                s.c[std::int64_t(k) * k + 2 * m - 1] += v * fc[m];
                s.c[std::int64_t(k) * k + 2 * m] += v * fs[m];
            }
        }
    }
    return s;
}

std::vector<cplx> synthesize_angular(const AngularSpectrum& s, const AngularGrid& g)
{
    const int K = s.K;
    const int nphi = static_cast<int>(g.phi.size());
    std::vector<cplx> f(g.nodes.size(), cplx(0, 0));
    if (g.n != s.n) throw DomainError("synthesize_angular: dimension mismatch");
    if (g.n == 2) {
        for (int j = 0; j < nphi; ++j) {
            cplx v = s.c[0] / std::sqrt(2 * kPi);
            for (int k = 1; k <= K; ++k)
                v += (s.c[2 * k - 1] * std::cos(k * g.phi[j]) + s.c[2 * k] * std::sin(k * g.phi[j])) / std::sqrt(kPi);
            f[j] = v;
        }
        return f;
    }
    const int nth = static_cast<int>(g.ct.size());
    std::vector<double> p;
    std::vector<cplx> ac(K + 1), as(K + 1);
    for (int i = 0; i < nth; ++i) {
        legendre_table(K, g.ct[i], p);
        std::fill(ac.begin(), ac.end(), cplx(0, 0));
        std::fill(as.begin(), as.end(), cplx(0, 0));
        for (int k = 0; k <= K; ++k) {
            ac[0] += p[legendre_at(k, 0)] * s.c[std::int64_t(k) * k];
            for (int m = 1; m <= k; ++m) {
                const double v = std::sqrt(2.0) * p[legendre_at(k, m)];
                ac[m] += v * s.c[std::int64_t(k) * k + 2 * m - 1];
                as[m] += v * s.c[std::int64_t(k) * k + 2 * m];
            }
        }
        for (int j = 0; j < nphi; ++j) {
            cplx v = ac[0];
            for (int m = 1; m <= K; ++m) v += ac[m] * std::cos(m * g.phi[j]) + as[m] * std::sin(m * g.phi[j]);
            f[i * nphi + j] = v;
        }
    }
    return f;
}

double lambda_omega_eigen(int n, int k) { return 1.0 + double(k) * (k + n - 2); }

AngularSpectrum lambda_omega_pow(const AngularSpectrum& s, double b)
{
    AngularSpectrum out = s;
    if (b == 0) return out;
    for (int k = 0; k <= s.K; ++k) {
        const double f = std::pow(lambda_omega_eigen(s.n, k), b / 2);
        const std::int64_t d = dim_harmonic(s.n, k);
        for (int l = 1; l <= d; ++l) out.c[channel_index(s.n, k, l)] *= f;
    }
    return out;
}

double spectral_cluster_ratio(int n, int k, double q)
{
    check_n(n);
    if (!(q >= 2)) throw DomainError("spectral_cluster_ratio: q must be >= 2");
    const double sigma = (n - 1) * (0.5 - 1 / q);
    const double denom = std::pow(lambda_omega_eigen(n, k), sigma / 2);
    const int deg = static_cast<int>(std::ceil(q * k)) + 4;
    // azimuthal factors int_0^{2pi} |cos m phi|^q dphi on an exact uniform rule
    const int nphi = deg + 1;
    auto phi_moment = [&](int m, bool sine) {
        double acc = 0;
        for (int j = 0; j < nphi; ++j) {
            const double ph = 2 * kPi * j / nphi;
            acc += std::pow(std::fabs(sine ? std::sin(m * ph) : std::cos(m * ph)), q);
        }
        return acc * 2 * kPi / nphi;
    };
    if (n == 2) {
        if (k == 0) return std::pow(2 * kPi, 1 / q) / std::sqrt(2 * kPi) / denom;
        const double c = std::pow(kPi, -0.5);
        const double nc = c * std::pow(phi_moment(k, false), 1 / q);
        const double ns = c * std::pow(phi_moment(k, true), 1 / q);
        return std::max(nc, ns) / denom;
    }
    const Rule& gl = gauss_legendre(deg / 2 + 2);
    std::vector<double> theta_moment(k + 1, 0.0), l2(k + 1, 0.0);
    std::vector<double> p;
    for (size_t i = 0; i < gl.x.size(); ++i) {
        legendre_table(k, gl.x[i], p);
        for (int m = 0; m <= k; ++m) {
            const double v = p[legendre_at(k, m)];
            theta_moment[m] += gl.w[i] * std::pow(std::fabs(v), q);
        }
    }
    double best = 0;
    for (int m = 0; m <= k; ++m) {
        double nq;
        if (m == 0) {
            nq = std::pow(theta_moment[0] * 2 * kPi, 1 / q);
        } else {
            const double amp = std::pow(std::sqrt(2.0), q) * theta_moment[m];
            nq = std::pow(amp * std::max(phi_moment(m, false), phi_moment(m, true)), 1 / q);
        }
        best = std::max(best, nq);
    }
    return best / denom;
}

double cluster_bump(double s)
{
    if (s <= 1 || s >= 2) return 0;
    return std::exp(4 - 1 / ((s - 1) * (2 - s)));
}

double lp_bernstein_ratio(int n, int lambda, double p, std::uint64_t seed)
{
    check_n(n);
    if (!(p >= 2)) throw DomainError("lp_bernstein_ratio: p must be >= 2");
    const int K = 2 * lambda + 2;
    const AngularGrid g = make_angular_grid(n, 4 * K + 8);
    const double lam = std::max(lambda, 1);
    auto norm_p = [&](const std::vector<cplx>& f) {
        double acc = 0;
        for (size_t i = 0; i < f.size(); ++i) acc += g.weights[i] * std::pow(std::abs(f[i]), p);
        return std::pow(acc, 1 / p);
    };
    auto project = [&](AngularSpectrum s) {
        for (int k = 0; k <= K; ++k) {
            const double m = cluster_bump(std::sqrt(double(k) * (k + n - 2)) / lam);
            for (int l = 1; l <= dim_harmonic(n, k); ++l) s.at(k, l) *= m;
        }
        return s;
    };
    auto ratio = [&](const AngularSpectrum& s) {
        const std::vector<cplx> f = synthesize_angular(s, g);
        const std::vector<cplx> sf = synthesize_angular(project(s), g);
        double sup = 0;
        for (const cplx& v : sf) sup = std::max(sup, std::abs(v));
        const double fp = norm_p(f);
        return fp > 0 ? sup / (std::pow(1 + lam, (n - 1) / p) * fp) : 0.0;
    };
    double best = 0;
    // constant
    {
        AngularSpectrum s = make_spectrum(n, K);
        s.at(0, 1) = 1;
        best = std::max(best, ratio(s));
    }
    // single harmonics in the cluster window
    for (int k = std::max(1, lambda); k <= std::min(K, 2 * lambda); k += std::max(1, lambda / 4)) {
        AngularSpectrum s = make_spectrum(n, K);
        s.at(k, 1) = 1;
        best = std::max(best, ratio(s));
    }
    // zonal kernel concentrated at a point: sum_k Z_k(omega . e)
    {
        AngularSpectrum s = make_spectrum(n, K);
        std::vector<double> y(channel_count(n, K));
        Point3 e = n == 2 ? Point3{1.0, 0.0, 0.0} : Point3{0.0, 0.0, 1.0};
        sph_harmonics_all(n, K, e, y.data());
        for (size_t i = 0; i < y.size(); ++i) s.c[i] = y[i];
        best = std::max(best, ratio(s));
    }
    // random band-limited
    CounterRng rng(seed, 0x5b);
    for (int t = 0; t < 4; ++t) {
        AngularSpectrum s = make_spectrum(n, K);
        for (auto& c : s.c) c = rng.normal();
        best = std::max(best, ratio(s));
    }
    return best;
}

}  // namespace dlab
