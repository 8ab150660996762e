#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dlab/errors.hpp"
#include "dlab/rng.hpp"
#include "dlab/strauss.hpp"

using namespace dlab;

namespace {

double bump(double s) { return s < 1 ? std::pow(1 - s * s, 3) : 0.0; }

// n = 3 free wave with u_t(0) = 0: u = [(r+t) f(r+t) + (r-t) f(|r-t|)] / (2r)
double dalembert3(double A, double t, double r)
{
    if (r < 1e-9) r = 1e-9;
    return A * ((r + t) * bump(r + t) + (r - t) * bump(std::fabs(r - t))) / (2 * r);
}

// n = 2 free wave by Hankel transform: u = int_0^inf F(k) cos(kt) J0(kr) k dk
double hankel2(double A, double t, double r)
{
    auto F = [&](double k) {
        const int m = 200;
        double s = 0;
        for (int i = 0; i <= m; ++i) {
            const double x = double(i) / m, w = (i == 0 || i == m) ? 0.5 : 1.0;
            s += w * bump(x) * std::cyl_bessel_j(0.0, k * x) * x;
        }
        return A * s / m;
    };
    const double kmax = 120, dk = 0.02;
    double u = 0;
    for (double k = dk / 2; k < kmax; k += dk) u += F(k) * std::cos(k * t) * std::cyl_bessel_j(0.0, k * r) * k * dk;
    return u;
}

double max_abs(const RadialSolution& s)
{
    double m = 0;
    for (double v : s.u) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace

TEST_CASE("critical exponents")
{
    const CriticalExponents e = exponents(3, 3);
    CHECK(e.s_c == doctest::Approx(0.5));
    CHECK(e.p_conf == doctest::Approx(3));
    CHECK(exponents(3, 2).p_c == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-14));
    CHECK(exponents(2, 3).p_c == doctest::Approx((3 + std::sqrt(17.0)) / 2).epsilon(1e-14));
    CHECK(exponents(2, 3).p_conf == doctest::Approx(5));
    for (int n : {2, 3}) {
        const double pc = exponents(n, 2).p_c;
        const CriticalExponents c = exponents(n, pc);
        CHECK(c.s_c == doctest::Approx(c.s_d).epsilon(1e-12));
    }
    // local branch: 1/q = 1/p + (3-n)/2
    CHECK(exponents(3, 2.2).q == doctest::Approx(2.2));
    CHECK(exponents(3, 2.2).branch == "local");
    // n=2 at p_c: q = (p-1)/2 and both branch formulas agree
    const double pc2 = (3 + std::sqrt(17.0)) / 2;
    CHECK(exponents(2, pc2).q == doctest::Approx((pc2 - 1) / 2).epsilon(1e-12));
    CHECK(exponents(2, pc2 + 1e-9).q == doctest::Approx((pc2 - 1) / 2).epsilon(1e-6));
    CHECK(exponents(3, 2.8).branch == "global");
    CHECK(1 / (exponents(3, 2.2).s_c - exponents(3, 2.2).s_d) == doctest::Approx(-4.714286).epsilon(1e-6));
    CHECK_THROWS_AS(exponents(4, 2), DomainError);
    CHECK_THROWS_AS(exponents(3, 1), DomainError);
}

TEST_CASE("zero data and zero forcing")
{
    for (int n : {2, 3}) {
        StraussConfig c;
        c.n = n;
        c.eps = 0;
        const PicardResult z = picard_solve(c, 4);
        CHECK(z.converged);
        CHECK(max_abs(z.sample) == 0.0);

        c.eps = 0.1;
        c.coef = 0;
        const PicardResult lin = picard_solve(c, 4);
        CHECK(lin.converged);
        CHECK(lin.iterations == 1);
        CHECK(lin.s_norm == doctest::Approx(lin.hom_norm).epsilon(1e-14));
    }
}

TEST_CASE("free solution against independent formulas")
{
    StraussConfig c;
    c.n = 3;
    c.coef = 0;
    c.eps = 0.1;
    const PicardResult r3 = picard_solve(c, 3);
    double err = 0, ref = 0;
    for (size_t k = 0; k < r3.sample.t.size(); ++k)
        for (size_t i = 1; i < r3.sample.r.size(); ++i) {
            const double e = dalembert3(1.0, r3.sample.t[k], r3.sample.r[i]);
            err = std::max(err, std::fabs(r3.sample.at(k, i) - e));
            ref = std::max(ref, std::fabs(e));
        }
    CHECK(err <= 1e-2 * ref);

    c.n = 2;
    c.resolution = 2;
    const PicardResult r2 = picard_solve(c, 2);
    err = 0;
    ref = 0;
    for (size_t k : {4u, 8u, 16u})
        for (size_t i : {2u, 10u, 20u, 30u, 40u}) {
            const double e = hankel2(1.0, r2.sample.t[k], r2.sample.r[i]);
            err = std::max(err, std::fabs(r2.sample.at(k, i) - e));
            ref = std::max(ref, std::fabs(e));
        }
    CHECK(ref > 0.05);
    CHECK(err <= 2e-2 * ref);
}

TEST_CASE("manufactured Duhamel solution")
{
    // w = t^2 psi(r), psi = (1 - r^2/4)^4, zero data; box w = 2 psi - t^2 Laplacian psi
    for (int n : {2, 3}) {
        StraussConfig c;
        c.n = n;
        c.width = 2;
        c.resolution = 4;
        auto psi = [](double r) { return r < 2 ? std::pow(1 - r * r / 4, 4) : 0.0; };
        auto lap = [n](double r) {
            if (r >= 2) return 0.0;
            const double s = 1 - r * r / 4;
            return -2 * s * s * s + 3 * r * r * s * s - 2 * (n - 1) * s * s * s;
        };
        const double T = 3;
        const RadialSolution w = duhamel(c, [&](double t, double r) { return 2 * psi(r) - t * t * lap(r); }, T);
        double err = 0, ref = 0;
        for (size_t k = 0; k < w.t.size(); ++k)
            for (size_t i = 0; i < w.r.size(); ++i) {
                const double e = w.t[k] * w.t[k] * psi(w.r[i]);
                err = std::max(err, std::fabs(w.at(k, i) - e));
                ref = std::max(ref, std::fabs(e));
            }
        INFO("n=" << n << " err=" << err / ref);
        CHECK(err <= 1e-3 * ref);
    }
}

TEST_CASE("small data contracts, large data leaves the ball")
{
    StraussConfig c;
    c.n = 3;
    c.p = 2.8;
    c.eps = 1e-3;
    const PicardResult s = picard_solve(c, 1);
    CHECK(s.converged);
    CHECK(s.s_norm <= 2 * s.hom_norm);
    c.p = 2.2;
    c.eps = 1;
    const PicardResult b = picard_solve(c, 100);
    CHECK_FALSE(b.converged);
    CHECK(b.reason != "contracted");
}

TEST_CASE("linear limit in the forcing coefficient")
{
    StraussConfig c;
    c.n = 3;
    c.eps = 0.2;
    c.coef = 0;
    const PicardResult h = picard_solve(c, 20);
    double d[2];
    for (int j = 0; j < 2; ++j) {
        c.coef = 1e-3 * (j + 1);
        const PicardResult u = picard_solve(c, 20);
        REQUIRE(u.converged);
        double m = 0;
        for (size_t i = 0; i < u.sample.u.size(); ++i) m = std::max(m, std::fabs(u.sample.u[i] - h.sample.u[i]));
        d[j] = m;
    }
    CHECK(d[0] > 0);
    CHECK(d[1] / d[0] == doctest::Approx(2).epsilon(0.02));
}

TEST_CASE("lifespan monotone in eps")
{
    CounterRng rng(7);
    std::uniform_real_distribution<double> U(0.1, 0.4);
    for (int trial = 0; trial < 10; ++trial) {
        double e1 = U(rng), e2 = U(rng);
        if (e2 > e1) std::swap(e1, e2);
        StraussConfig c;
        c.eps = e1;
        const double t1 = lifespan(c).T;
        c.eps = e2;
        const LifespanResult l2 = lifespan(c);
        INFO("eps " << e1 << " " << e2);
        CHECK(l2.T >= t1);
        CHECK(l2.hi / l2.lo <= 1.05);
    }
}

TEST_CASE("lifespan slope, n=3, p=2.2")
{
    const double target = 1 / ((1.5 - 2 / 1.2) - (0.5 - 1 / 2.2));
    std::vector<double> eps{0.2, 0.1, 0.05, 0.025}, T;
    StraussConfig c;
    for (double e : eps) {
        c.eps = e;
        T.push_back(lifespan(c).T);
    }
    const double slope = log_slope(eps, T);
    CHECK(std::fabs(slope / target - 1) <= 0.25);
    // frozen
    CHECK(T[0] == doctest::Approx(558.34).epsilon(1e-3));
    CHECK(slope == doctest::Approx(-4.36).epsilon(1e-2));
}

TEST_CASE("errors")
{
    StraussConfig c;
    CHECK_THROWS_AS(picard_solve(c, 0), DomainError);
    c.n = 4;
    CHECK_THROWS_AS(picard_solve(c, 1), DomainError);
    c.n = 2;
    c.max_cells = 1000;
    CHECK_THROWS_AS(picard_solve(c, 50), ResourceError);
    c = StraussConfig{};
    c.eps = 1e-4;
    LifespanOptions o;
    o.T_max = 64;
    CHECK_THROWS_AS(lifespan(c, o), ResourceError);
    CHECK(correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1));
}
