#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dlab/errors.hpp"
#include "dlab/propagator.hpp"
#include "dlab/rng.hpp"

using namespace dlab;

namespace {

const double kPi = std::acos(-1.0);

// smooth random unit-frequency field, every channel k <= kmax
SpectralField smooth_field(int n, int kmax, std::uint64_t seed, bool real = false)
{
    CounterRng rng(seed);
    SpectralField f;
    f.n = n;
    for (int k = 0; k <= kmax; ++k) {
        const int dim = n == 2 ? (k == 0 ? 1 : 2) : 2 * k + 1;
        const int l = 1 + static_cast<int>(rng.uniform() * dim);
        const cplx a(rng.normal(), real ? 0 : rng.normal()), b(rng.normal(), real ? 0 : rng.normal());
        const double w = 2 + 4 * rng.uniform();
        Block bl;
        bl.k = k;
        bl.l = l;
        bl.prof = make_profile(0.5, 1.0, 4, 12, [&](double rho) {
            const double x = (rho - 0.5) / 0.5;
            return (a + b * std::cos(w * x)) * std::pow(std::sin(kPi * x), 4);
        });
        f.blocks.push_back(bl);
    }
    return f;
}

// int_0^1 g by composite Simpson
template <class F>
cplx simpson(F&& g, double lo, double hi, int N)
{
    const double h = (hi - lo) / N;
    cplx acc = g(lo) + g(hi);
    for (int i = 1; i < N; ++i) acc += (i % 2 ? 4.0 : 2.0) * g(lo + i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("static synthesis against direct quadrature")
{
    for (int n : {2, 3}) {
        SpectralField f = smooth_field(n, 3, 17);
        RadialGrid g = radial_grid_uniform(n, 0, 12, 25);
        PhysicalField u = evolve(f, {0.0}, g, DispersionLaw::wave());
        for (size_t ch = 0; ch < u.channels.size(); ++ch) {
            const int k = u.channels[ch].first;
            const RadialProfile& p = f.blocks[k].prof;
            const cplx ph = std::pow(cplx(0, -1), k);
            for (size_t j = 1; j < g.r.size(); ++j) {
                const double r = g.r[j], nu = k + 0.5 * (n - 2);
                const cplx want = ph * std::pow(r, -0.5 * (n - 2)) *
                                  simpson([&](double rho) { return p(rho) * std::cyl_bessel_j(nu, r * rho) * std::sqrt(rho); }, 0.5, 1.0, 4000);
                CHECK(std::abs(u.at(ch, 0, j) - want) < 1e-10);
            }
            // r = 0: only k = 0 survives
            if (k > 0) CHECK(std::abs(u.at(ch, 0, 0)) == 0);
        }
    }
}

TEST_CASE("unitarity")
{
    for (int n : {2, 3})
        for (double a : {1.0, 2.0, 3.0})
            for (std::uint64_t seed : {1u, 2u}) {
                SpectralField f = smooth_field(n, 2, seed + 10 * n);
                const double norm = l2_norm(f);
                const std::vector<double> times{0.0, 1.5, 7.0};
                const double R = a * times.back() + 80;
                PhysicalField u = evolve(f, times, radial_grid_gl(n, 0, R, static_cast<int>(R)), DispersionLaw{a});
                CHECK(u.self_error <= 1e-7);
                for (size_t i = 0; i < times.size(); ++i) CHECK(std::fabs(u.l2_at(i) / norm - 1) <= 1e-6);
            }
}

TEST_CASE("group law through re-analysis")
{
    SpectralField f = smooth_field(3, 2, 5);
    const double t1 = 1.25, t2 = 2.0;
    RadialGrid g = radial_grid_gl(3, 0, 120, 120);
    PhysicalField u1 = evolve(f, {t1}, g, DispersionLaw::schrodinger());
    SpectralField back = analyze_physical(u1, 0, 0.5, 1.0, 4, 12);
    // the re-analyzed profile equals e^{i t1 rho^2} c(rho)
    for (const Block& b : back.blocks)
        for (const Block& o : f.blocks)
            if (o.k == b.k && o.l == b.l)
                for (int i = 0; i < b.prof.size(); ++i) {
                    const double rho = b.prof.node(i);
                    CHECK(std::abs(b.prof.c[i] - o.prof.c[i] * std::polar(1.0, t1 * rho * rho)) < 1e-4);
                }
    RadialGrid probe = radial_grid_uniform(3, 0.1, 12, 40);
    PhysicalField direct = evolve(f, {t1 + t2}, probe, DispersionLaw::schrodinger());
    PhysicalField twostep = evolve(back, {t2}, probe, DispersionLaw::schrodinger());
    REQUIRE(direct.channels == twostep.channels);
    for (size_t i = 0; i < direct.data.size(); ++i) CHECK(std::abs(direct.data[i] - twostep.data[i]) < 1e-6);
}

TEST_CASE("time reversal for real radial data")
{
    for (int n : {2, 3}) {
        SpectralField f = smooth_field(n, 0, 9, true);
        RadialGrid g = radial_grid_uniform(n, 0, 15, 61);
        PhysicalField u = evolve(f, {-3.0, -0.5, 0.5, 3.0}, g, DispersionLaw::wave());
        for (size_t j = 0; j < g.r.size(); ++j) {
            CHECK(std::abs(u.at(0, 0, j) - std::conj(u.at(0, 3, j))) < 1e-8);
            CHECK(std::abs(u.at(0, 1, j) - std::conj(u.at(0, 2, j))) < 1e-8);
        }
    }
}

TEST_CASE("n=3 radial half-wave against d'Alembert")
{
    SpectralField f = smooth_field(3, 0, 21);
    const RadialProfile& p = f.blocks[0].prof;
    // r f(r) = V(r) odd, and the half-wave adds i sin(tD) f whose 1D antiderivative is U
    auto V = [&](double x) { return std::sqrt(2 / kPi) * simpson([&](double rho) { return p(rho) * std::sin(x * rho); }, 0.5, 1.0, 2000); };
    auto U = [&](double x) { return -std::sqrt(2 / kPi) * simpson([&](double rho) { return p(rho) * std::cos(x * rho); }, 0.5, 1.0, 2000); };
    const std::vector<double> times{0.0, 0.5, 1.7, 3.0, 4.0};
    RadialGrid g = radial_grid_uniform(3, 0.1, 8, 80);
    PhysicalField u = evolve(f, times, g, DispersionLaw::wave());
    double worst = 0;
    for (size_t i = 0; i < times.size(); ++i)
        for (size_t j = 0; j < g.r.size(); ++j) {
            const double r = g.r[j], t = times[i];
            const cplx want = (0.5 * (V(r + t) + V(r - t)) + cplx(0, 0.5) * (U(r + t) - U(r - t))) / r;
            worst = std::max(worst, std::abs(u.at(0, i, j) - want));
        }
    CHECK(worst <= 1e-4);
    CHECK(worst <= 1e-9);
}

TEST_CASE("radial wave diagnostic split")
{
    for (int n : {2, 3}) {
        SpectralField f = smooth_field(n, 0, 33);
        RadialGrid g = radial_grid_uniform(n, 0.5, 30, 60);
        RadialWave w = evolve_radial_wave(f, {0.0, 2.0, 10.0}, g);
        PhysicalField u = evolve(f, {0.0, 2.0, 10.0}, g, DispersionLaw::wave());
        for (size_t i = 0; i < u.data.size(); ++i) CHECK(std::abs(u.data[i] - w.u.data[i]) < 1e-7);
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < g.r.size(); ++j) {
                const cplx ip = w.i_plus[i * g.r.size() + j], im = w.i_minus[i * g.r.size() + j];
                if (g.r[j] < 2) {
                    CHECK(std::isnan(ip.real()));
                    continue;
                }
                CHECK(std::abs(ip + im - u.at(0, i, j)) < 1e-8);
            }
        SpectralField nonradial = smooth_field(n, 1, 3);
        CHECK_THROWS_AS(evolve_radial_wave(nonradial, {0.0}, g), DomainError);
    }
}

TEST_CASE("radial decay exponent")
{
    for (int n : {2, 3}) {
        SpectralField f = smooth_field(n, 0, 44);
        const double slope = decay_exponent_fit(f, {64, 128, 256, 512});
        CHECK(std::fabs(-slope / (0.5 * (n - 1)) - 1) <= 0.05);
    }
}

TEST_CASE("wave Cauchy problem")
{
    SpectralField f = smooth_field(3, 2, 61), g = smooth_field(3, 1, 62);
    SpectralField zero;
    zero.n = 3;
    RadialGrid grid = radial_grid_gl(3, 0, 100, 100);
    // g = 0, t = 0 gives f
    PhysicalField u0 = wave_cauchy(f, zero, {0.0}, grid);
    PhysicalField f0 = evolve(f, {0.0}, grid, DispersionLaw::wave());
    for (size_t i = 0; i < u0.data.size(); ++i) CHECK(std::abs(u0.data[i] - f0.data[i]) < 1e-12);
    // f = 0: centered difference of u at t = 0 reproduces g
    const double h = 1e-3;
    RadialGrid probe = radial_grid_uniform(3, 0, 10, 41);
    PhysicalField ug = wave_cauchy(zero, g, {-h, h}, probe);
    PhysicalField gphys = evolve(g, {0.0}, probe, DispersionLaw::wave());
    for (size_t ch = 0; ch < ug.channels.size(); ++ch)
        for (size_t j = 0; j < probe.r.size(); ++j)
            CHECK(std::abs((ug.at(ch, 1, j) - ug.at(ch, 0, j)) / (2 * h) - gphys.at(ch, 0, j)) <= 1e-5);
    // energy conservation
    std::vector<double> e = wave_energy(f, g, {0.0, 1.0, 3.0, 6.0}, grid);
    const double e_spec = std::pow(sobolev_norm(f, 1), 2) + std::pow(l2_norm(g), 2);
    for (double v : e) CHECK(std::fabs(v / e[0] - 1) <= 1e-6);
    CHECK(std::fabs(e[0] / e_spec - 1) <= 1e-6);
    // a D^{-1} on data that does not vanish at zero frequency
    SpectralField low;
    low.n = 3;
    Block b;
    b.prof = make_profile(0.0, 1.0, 4, 8, [](double) { return cplx(1); });
    low.blocks = {b};
    CHECK_THROWS_AS(wave_cauchy(zero, low, {1.0}, probe), DivergenceError);
}

TEST_CASE("node-spacing rule")
{
    SpectralField f = smooth_field(2, 0, 1);
    EvolveOptions opt;
    opt.max_nodes = 200;
    CHECK_THROWS_AS(evolve(f, {100.0}, radial_grid_uniform(2, 0, 10, 11), DispersionLaw::schrodinger(), opt), ResolutionError);
    CHECK_THROWS_AS(evolve(f, {1.0, 0.5}, radial_grid_uniform(2, 0, 10, 11), DispersionLaw::wave()), DomainError);
}

TEST_CASE("psi kernels")
{
    // exact zero for even n
    for (int n : {2, 4})
        for (int k : {0, 3, 7}) {
            CHECK(psi_kernel({2, n, k}, 0.3, 2.0) == cplx(0));
            CHECK(psi_bound_norm({2, n, k}, 2.0).norm == 0);
        }
    // rapid decay in m for n = 2
    {
        std::vector<double> m{200, 250, 300, 350, 400};
        std::vector<cplx> v = psi_kernel_many({1, 2, 0}, m, 0.5);
        const double slope = std::log(std::abs(v.back()) / std::abs(v.front())) / std::log(m.back() / m.front());
        CHECK(slope < -4);
    }
    // variant 3 against a brute-force double integral
    {
        const int n = 3, k = 0;
        const double r = 0.5, nu = 0.5;
        auto gamma_check = [&](double s) {
            return simpson([&](double rho) { return std::pow(rho, 0.5 * n + nu) * bump_eta(rho) * std::polar(1.0, s * rho); }, 0.25, 2.0, 4000) / (2 * kPi);
        };
        for (double m : {-1.0, 0.0, 0.7, 3.0}) {
            const cplx inner = simpson([&](double u) { return gamma_check(m + r * u) * std::pow(1 - u * u, nu - 0.5); }, -1, 1, 400);
            const cplx want = 2 * kPi / (std::pow(2.0, nu) * std::sqrt(kPi) * std::tgamma(nu + 0.5)) * std::pow(r, nu) * inner;
            CHECK(std::abs(psi_kernel({3, n, k}, m, r) - want) < 1e-8);
        }
    }
    // closed Bessel forms: psi3 = int alpha e^{i m rho} J_nu(r rho), and for integer nu
    // the theta integral of psi1 is 2 pi i^nu J_nu
    for (int k : {0, 1, 3}) {
        auto alpha_j = [&](int n, double m, double r) {
            const double nu = k + 0.5 * (n - 2);
            return simpson([&](double rho) { return std::pow(rho, 0.5 * n) * bump_eta(rho) * std::cyl_bessel_j(nu, r * rho) * std::polar(1.0, m * rho); },
                           0.25, 2.0, 6000);
        };
        for (double m : {-2.0, 0.0, 1.1}) {
            CHECK(std::abs(psi_kernel({3, 3, k}, m, 0.5) - alpha_j(3, m, 0.5)) < 1e-9);
            CHECK(std::abs(psi_kernel({1, 2, k}, m, 3.0) - std::pow(cplx(0, 1), k) * alpha_j(2, m, 3.0)) < 1e-9);
        }
    }
    // psi1 for half-integer order by brute force in theta
    {
        const int n = 3, k = 1;
        const double r = 2.0, nu = 1.5, m = 0.6;
        auto ac = [&](double s) {
            return simpson([&](double rho) { return std::pow(rho, 1.5) * bump_eta(rho) * std::polar(1.0, s * rho); }, 0.25, 2.0, 3000) / (2 * kPi);
        };
        const cplx want = simpson([&](double th) { return std::polar(1.0, -nu * th) * ac(m + r * std::cos(th)); }, 0, 2 * kPi, 600);
        CHECK(std::abs(psi_kernel({1, n, k}, m, r) - want) < 1e-8);
    }
    CHECK_THROWS_AS(psi_kernel({3, 3, 0}, 0, 2.0), DomainError);
    CHECK_THROWS_AS(psi_kernel({3, 2, 0}, 0, 0.5), DomainError);
    CHECK_THROWS_AS(psi_kernel({4, 3, 0}, 0, 0.5), DomainError);
}

TEST_CASE("psi bound uniformity in k")
{
    // sup over r of the weighted norm, per k, stays within 2x of the k = 0 value
    struct Regime {
        int n, variant;
        std::vector<double> radii;
    };
    const std::vector<Regime> regimes{{2, 1, {0.25, 1, 4, 16}}, {3, 1, {2, 4, 16}}, {3, 2, {2, 4, 16}}, {3, 3, {0.25, 0.5, 1}}};
    for (const Regime& g : regimes) {
        double b0 = 0, worst = 0;
        for (int k : {0, 1, 2, 4, 8, 16, 20}) {
            double bk = 0;
            for (double r : g.radii) bk = std::max(bk, psi_bound_norm({g.variant, g.n, k}, r).norm);
            if (k == 0) b0 = bk;
            worst = std::max(worst, bk);
        }
        CHECK(worst <= 2 * b0);
    }
    CHECK(psi3_factorial_ratio(3, 0) == doctest::Approx(2));
    CHECK(psi3_factorial_ratio(3, 2) == doctest::Approx(0.5));
    CHECK(psi3_factorial_ratio(5, 1) == doctest::Approx(5.0 * 4 / (2 * 2)));
}
