#include "dlab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "dlab/errors.hpp"

namespace dlab {

namespace {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

RuleL golub_welsch(const VecL& diag, const VecL& off, long double mu0)
{
    const int n = static_cast<int>(diag.size());
    Eigen::SelfAdjointEigenSolver<MatL> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    RuleL r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const long double v = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v * v;
    }
    return r;
}

}  // namespace

const Rule& gauss_legendre(int n)
{
    static std::map<int, Rule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");

    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    const long double pi = 3.141592653589793238462643383279502884L;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        long double z = std::cos(pi * (i + 0.75L) / (n + 0.5L));
        long double dp = 0;
        for (int it2 = 0; it2 < 100; ++it2) {
            long double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1;
            dp = n * (z * p1 - p0) / (z * z - 1);
            long double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-19L) break;
        }
        // recompute derivative at the converged node
        long double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k) {
            long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) {
            dp = 1;
        } else {
            dp = n * (z * p1 - p0) / (z * z - 1);
        }
        long double w = 2 / ((1 - z * z) * dp * dp);
        r.x[i] = static_cast<double>(-z);
        r.x[n - 1 - i] = static_cast<double>(z);
        r.w[i] = r.w[n - 1 - i] = static_cast<double>(w);
    }
    if (n == 1) {
        r.x[0] = 0;
        r.w[0] = 2;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

RuleL gauss_jacobi(int n, long double alpha, long double beta)
{
    if (n < 1) throw DomainError("gauss_jacobi: n must be >= 1");
    if (alpha <= -1 || beta <= -1) throw DomainError("gauss_jacobi: alpha, beta must exceed -1");
    const long double ab = alpha + beta;
    VecL d(n), e(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) {
        const long double s = 2 * k + ab;
        if (k == 0) {
            d(k) = (beta - alpha) / (ab + 2);
        } else {
            d(k) = (beta * beta - alpha * alpha) / (s * (s + 2));
        }
    }
    for (int k = 1; k < n; ++k) {
        const long double s = 2 * k + ab;
        long double b2;
        if (k == 1) {
            b2 = 4 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab));
        } else {
            b2 = 4 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1) * (s - 1));
        }
        e(k - 1) = std::sqrt(b2);
    }
    const long double mu0 = std::exp((ab + 1) * std::log(2.0L) + std::lgamma(alpha + 1) +
                                     std::lgamma(beta + 1) - std::lgamma(ab + 2));
    return golub_welsch(d, e, mu0);
}

RuleL gauss_laguerre(int n, long double alpha)
{
    if (n < 1) throw DomainError("gauss_laguerre: n must be >= 1");
    if (alpha <= -1) throw DomainError("gauss_laguerre: alpha must exceed -1");
    VecL d(n), e(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) d(k) = 2 * k + alpha + 1;
    for (int k = 1; k < n; ++k) e(k - 1) = std::sqrt(k * (k + alpha));
    return golub_welsch(d, e, std::tgamma(alpha + 1));
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels,
                    int order)
{
    const Rule& g = gauss_legendre(order);
    const double h = (b - a) / panels;
    double sum = 0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        double s = 0;
        for (int i = 0; i < order; ++i) s += g.w[i] * f(c + 0.5 * h * g.x[i]);
        sum += 0.5 * h * s;
    }
    return sum;
}

AdaptiveResult integrate_doubling(const std::function<double(double)>& f, double a, double b,
                                  double rel, double abs, int start_panels, int max_panels,
                                  int order)
{
    int panels = start_panels;
    double prev = integrate_gl(f, a, b, panels, order);
    while (true) {
        panels *= 2;
        const double cur = integrate_gl(f, a, b, panels, order);
        const double err = std::fabs(cur - prev);
        if (err <= rel * std::fabs(cur) + abs) return {cur, err, panels};
        if (panels >= max_panels) {
            throw ConvergenceError("node doubling did not converge: last iterates " +
                                   std::to_string(prev) + ", " + std::to_string(cur));
        }
        prev = cur;
    }
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

std::vector<double> trapezoid_weights(const std::vector<double>& x)
{
    const size_t n = x.size();
    std::vector<double> w(n, 0.0);
    for (size_t i = 0; i + 1 < n; ++i) {
        const double h = x[i + 1] - x[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

}  // namespace dlab
