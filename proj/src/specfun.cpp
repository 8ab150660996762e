#include "dlab/specfun.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "dlab/errors.hpp"
#include "dlab/quadrature.hpp"

namespace dlab {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr double kPi = 3.141592653589793238462643383279502884;

std::string args(double nu, double y)
{
    std::ostringstream os;
    os.precision(17);
    os << "(nu=" << nu << ", y=" << y << ")";
    return os.str();
}

void check_domain(double nu, double y, const char* who)
{
    if (!std::isfinite(nu) || !std::isfinite(y) || nu < -0.5 || y < 0)
        throw DomainError(std::string(who) + ": outside domain " + args(nu, y));
}

bool is_integer(double nu) { return std::fabs(nu - std::round(nu)) < 1e-14; }

double large_argument(double nu, double y)
{
    if (nu >= 0) return std::cyl_bessel_j(nu, y);
    // -1/2 <= nu < 0: one step of the three-term recurrence downward
    const double j1 = std::cyl_bessel_j(nu + 1, y);
    const double j2 = std::cyl_bessel_j(nu + 2, y);
    return 2 * (nu + 1) / y * j1 - j2;
}

}  // namespace

std::string to_string(BesselMethod m)
{
    switch (m) {
    case BesselMethod::automatic: return "auto";
    case BesselMethod::series: return "series";
    case BesselMethod::lommel: return "lommel";
    case BesselMethod::schlafli: return "schlafli";
    case BesselMethod::large_argument: return "large-argument";
    }
    return "?";
}

BesselMethod bessel_method_from_string(const std::string& s)
{
    if (s == "auto") return BesselMethod::automatic;
    if (s == "series") return BesselMethod::series;
    if (s == "lommel") return BesselMethod::lommel;
    if (s == "schlafli") return BesselMethod::schlafli;
    throw ConfigError("unknown bessel method '" + s + "'");
}

double bessel_j_series(double nu, double y, double* sum_abs)
{
    check_domain(nu, y, "bessel_j_series");
    if (y == 0) {
        if (sum_abs) *sum_abs = (nu == 0) ? 1 : 0;
        if (nu == 0) return 1;
        if (nu > 0) return 0;
        throw DomainError("bessel_j_series: singular at y=0 " + args(nu, y));
    }
    const long double h = static_cast<long double>(y) / 2;
    const long double h2 = h * h;
    long double term = std::exp(nu * std::log(h) - std::lgamma(static_cast<long double>(nu) + 1));
    long double sum = term, sabs = std::fabs(term);
    for (int k = 1; k < 1000; ++k) {
        term *= -h2 / (k * (k + static_cast<long double>(nu)));
        sum += term;
        sabs += std::fabs(term);
        if (k > h && std::fabs(term) < 1e-21L * sabs) break;
    }
    if (sum_abs) *sum_abs = static_cast<double>(sabs);
    return static_cast<double>(sum);
}

double bessel_j_lommel(double nu, double y, double tol)
{
    check_domain(nu, y, "bessel_j_lommel");
    if (nu <= -0.5) throw DomainError("bessel_j_lommel: requires nu > -1/2 " + args(nu, y));
    const long double a = static_cast<long double>(nu) - 0.5L;
    long double pref;
    if (y == 0) {
        if (nu > 0) return 0;
        pref = 1 / std::exp(std::lgamma(0.5L) + 0.5L * std::log(kPiL));
    } else {
        pref = std::exp(nu * std::log(static_cast<long double>(y) / 2) -
                        std::lgamma(static_cast<long double>(nu) + 0.5L) - 0.5L * std::log(kPiL));
    }
    // floor: rounding in the weighted sum is magnified by the prefactor
    long double floor = 0;
    auto estimate = [&](int n) {
        const RuleL r = gauss_jacobi(n, a, a);
        long double s = 0, sa = 0;
        for (int i = 0; i < n; ++i) {
            const long double v = r.w[i] * std::cos(static_cast<long double>(y) * r.x[i]);
            s += v;
            sa += std::fabs(v);
        }
        floor = 256 * std::numeric_limits<long double>::epsilon() * pref * sa;
        return pref * s;
    };
    int n = 16 + static_cast<int>(y);
    long double prev = estimate(n);
    for (int it = 0; it < 5; ++it) {
        n *= 2;
        const long double cur = estimate(n);
        if (std::fabs(cur - prev) <= tol * (1 + std::fabs(cur)) + floor) return static_cast<double>(cur);
        prev = cur;
    }
    std::ostringstream os;
    os.precision(17);
    os << "bessel_j_lommel: node doubling did not converge " << args(nu, y)
       << ", last iterates " << static_cast<double>(prev) << " at n=" << n;
    throw ConvergenceError(os.str());
}

double bessel_j_schlafli(double nu, double y, double tol)
{
    check_domain(nu, y, "bessel_j_schlafli");
    if (y <= 0) throw DomainError("bessel_j_schlafli: requires y > 0 " + args(nu, y));
    if (is_integer(nu)) {
        // periodic trapezoid; sin(m pi) = 0 so the sinh tail is omitted
        const double m = std::round(nu);
        auto trap = [&](int n) {
            long double s = 0;
            for (int i = 0; i < n; ++i) {
                const long double th = 2 * kPiL * i / n;
                s += std::cos(y * std::cos(th) - m * th - m * kPiL / 2);
            }
            return s / n;
        };
        int n = 16;
        long double prev = trap(n);
        for (int it = 0; it < 14; ++it) {
            n *= 2;
            const long double cur = trap(n);
            if (std::fabs(cur - prev) <= tol * (1 + std::fabs(cur))) return static_cast<double>(cur);
            prev = cur;
        }
        throw ConvergenceError("bessel_j_schlafli: trapezoid did not converge " + args(nu, y));
    }
    // non-integer order: (1/pi) int_0^pi cos(nu t - y sin t) dt on Gauss-Legendre panels
    auto f1 = [&](double t) { return std::cos(nu * t - y * std::sin(t)); };
    const int p0 = 4 + static_cast<int>((y + std::fabs(nu)) / 4);
    AdaptiveResult r1 = integrate_doubling(f1, 0.0, kPi, tol, tol, p0, 1 << 12, 20);
    // sinh tail truncated where e^{-y sinh u} < 1e-18
    const double umax = std::asinh(std::log(1e18) / y);
    auto f2 = [&](double u) { return std::exp(-y * std::sinh(u) - nu * u); };
    AdaptiveResult r2 = integrate_doubling(f2, 0.0, umax, tol, tol, 8, 1 << 12, 20);
    return r1.value / kPi - std::sin(nu * kPi) / kPi * r2.value;
}

BesselValue bessel_j_eval(double nu, double y, BesselMethod method)
{
    check_domain(nu, y, "bessel_j");
    switch (method) {
    case BesselMethod::series: return {bessel_j_series(nu, y), method};
    case BesselMethod::lommel: return {bessel_j_lommel(nu, y), method};
    case BesselMethod::schlafli: return {bessel_j_schlafli(nu, y), method};
    case BesselMethod::large_argument: return {large_argument(nu, y), method};
    case BesselMethod::automatic: break;
    }
    if (y == 0) return {bessel_j_series(nu, y), BesselMethod::series};
    if (y <= std::max(8.0, 2 * nu)) {
        double sabs = 0;
        const double v = bessel_j_series(nu, y, &sabs);
        if (sabs <= 1e6) return {v, BesselMethod::series};
    }
    const double v = large_argument(nu, y);
    if (!std::isfinite(v)) throw DomainError("bessel_j: domain exceeded " + args(nu, y));
    return {v, BesselMethod::large_argument};
}

double bessel_j(double nu, double y) { return bessel_j_eval(nu, y).value; }

AsymptoticSplit bessel_asymptotic(int n, double y)
{
    if (n < 2) throw DomainError("bessel_asymptotic: n must be >= 2");
    if (!(y >= 1)) throw DomainError("bessel_asymptotic: y must be >= 1 (got " + std::to_string(y) + ")");
    const double nu = 0.5 * (n - 2);
    AsymptoticSplit s;
    s.phase = y - (n - 1) * kPi / 4;
    s.valid = true;

    // Hankel expansion: a_k = prod_{j<=k} (4nu^2 - (2j-1)^2) / (k! 8^k), term_k = a_k / y^k
    const double mu = 4 * nu * nu;
    double p = 1, q = 0, term = 1, bound = 0;
    int k = 1;
    for (; k <= 80; ++k) {
        const double next = term * (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k * y);
        if (next == 0) {
            bound = 0;
            break;
        }
        if (k > 6 && std::fabs(next) > std::fabs(term)) {
            bound = std::fabs(next);
            break;
        }
        term = next;
        // P collects even k with sign (-1)^{k/2}, Q odd k with sign (-1)^{(k-1)/2}
        if (k % 2 == 0)
            p += ((k / 2) % 2 ? -1 : 1) * term;
        else
            q += (((k - 1) / 2) % 2 ? -1 : 1) * term;
        bound = std::fabs(term);
        if (std::fabs(term) < 1e-18) break;
    }
    s.terms = k;
    s.truncation_bound = bound;
    if (bound <= 1e-9) {
        s.amplitude1 = p;
        s.amplitude2 = q;
        return s;
    }
    // exact amplitudes: P + iQ = Gamma(nu+1/2)^{-1} int e^{-u} u^{nu-1/2} (1 + iu/(2y))^{nu-1/2} du
    auto eval = [&](int m) {
        const RuleL r = gauss_laguerre(m, nu - 0.5L);
        std::complex<long double> acc = 0;
        for (int i = 0; i < m; ++i)
            acc += r.w[i] * std::pow(std::complex<long double>(1, r.x[i] / (2 * y)), nu - 0.5L);
        return acc / std::tgamma(nu + 0.5L);
    };
    int m = 48;
    std::complex<long double> prev = eval(m);
    for (int it = 0; it < 5; ++it) {
        m *= 2;
        std::complex<long double> cur = eval(m);
        if (std::abs(cur - prev) < 1e-12L) {
            prev = cur;
            break;
        }
        prev = cur;
    }
    s.amplitude1 = static_cast<double>(prev.real());
    s.amplitude2 = static_cast<double>(prev.imag());
    s.integral_route = true;
    s.terms = 0;
    return s;
}

double reconstruct(const AsymptoticSplit& s, double y)
{
    return std::sqrt(2 / (kPi * y)) * (std::cos(s.phase) * s.amplitude1 - std::sin(s.phase) * s.amplitude2);
}

double gamma_fn(double x)
{
    if (!(x > 0)) throw DomainError("gamma_fn: requires x > 0 (got " + std::to_string(x) + ")");
    const double g = std::tgamma(x);
    if (!std::isfinite(g)) throw DomainError("gamma_fn: overflow at x=" + std::to_string(x));
    return g;
}

}  // namespace dlab
