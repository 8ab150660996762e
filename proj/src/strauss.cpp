#include "dlab/strauss.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "dlab/errors.hpp"

namespace dlab {

CriticalExponents exponents(int n, double p)
{
    if (n != 2 && n != 3) throw DomainError("strauss: n must be 2 or 3");
    if (!(p > 1) || !std::isfinite(p)) throw DomainError("strauss: need p > 1");
    CriticalExponents e;
    e.s_c = n / 2.0 - 2 / (p - 1);
    e.s_d = 0.5 - 1 / p;
    e.p_conf = 1 + 4.0 / (n - 1);
    // s_c = s_d  <=>  (n-1)/2 p^2 - (n+1)/2 p - 1 = 0
    const double a = (n - 1) / 2.0, b = -(n + 1) / 2.0, c = -1;
    e.p_c = (-b + std::sqrt(b * b - 4 * a * c)) / (2 * a);
    if (p <= e.p_c) {
        e.branch = "local";
        e.q = 1 / (1 / p + (3 - n) / 2.0);
    } else {
        e.branch = "global";
        e.q = 1 / (2 / (p - 1) - (n - 2));
    }
    return e;
}

namespace {

double phi(double s) { return s < 1 ? std::pow(1 - s * s, 3) : 0.0; }

double forcing(double coef, double p, double u) { return coef * std::copysign(std::pow(std::fabs(u), p), u); }

double trapz_weight(const std::vector<double>& x, size_t i)
{
    const double l = i > 0 ? x[i] - x[i - 1] : 0, r = i + 1 < x.size() ? x[i + 1] - x[i] : 0;
    return 0.5 * (l + r);
}

class Solver {
public:
    virtual ~Solver() = default;
    virtual size_t size() const = 0;
    // Duhamel part for a source given by the callback on solver nodes (t, r) -> value
    virtual std::vector<double> duhamel(const std::vector<double>& src) const = 0;
    virtual std::vector<double> source(const std::vector<double>& w, bool with_hom,
                                       const std::function<double(double, double, double)>& f) const = 0;
    virtual double norm(const std::vector<double>& w, bool with_hom) const = 0;
    virtual double value(const std::vector<double>& w, bool with_hom, double t, double r) const = 0;
};

// n = 3: v = r u solves v_tt - v_rr = r F on r > 0, v(t,0) = 0. In xi = t - r, eta = t + r the
// zero-data solution is w = 1/4 int_{|xi|}^{eta} int_{max(-eta',-R0)}^{xi} S dxi' deta'.
class Char3 : public Solver {
public:
    Char3(const StraussConfig& c, double T) : cfg(c), T(T), R0(c.width), q(exponents(3, c.p).q)
    {
        const int per = std::max(4, (int)std::lround(16 * cfg.resolution));
        h0 = R0 / per;
        const double kappa = 0.04 / cfg.resolution;
        const double zmax = 2 * T + R0;
        std::vector<double> z;
        for (int i = -per; i <= 4 * per; ++i) z.push_back(i * h0);
        while (z.back() < zmax) z.push_back(z.back() + std::max(h0, kappa * z.back()));
        while (z.size() > 2 && z[z.size() - 2] >= zmax) z.pop_back();
        z.back() = std::max(zmax, z[z.size() - 2] + 0.5 * h0);
        for (double v : z) {
            if (v <= T + 1e-12 * R0) xi.push_back(v);
            if (v >= -1e-12 * R0) eta.push_back(v < 0 ? 0.0 : v);
        }
        const size_t cells = xi.size() * eta.size();
        if (cells > cfg.max_cells) throw ResourceError("strauss: characteristic grid too large");
        start.resize(xi.size());
        for (size_t i = 0; i < xi.size(); ++i) start[i] = find_eta(std::fabs(xi[i]));
        lo.resize(eta.size());
        for (size_t j = 0; j < eta.size(); ++j) lo[j] = find_xi(std::max(-eta[j], -R0));
        hom.assign(cells, 0);
        for (size_t i = 0; i < xi.size(); ++i)
            for (size_t j = start[i]; j < eta.size(); ++j) hom[i * eta.size() + j] = v_hom(xi[i], eta[j]);
        // slices for the S norm
        for (double v : z)
            if (v >= 0 && v < T) tslice.push_back(v);
        tslice.push_back(T);
    }

    size_t size() const override { return xi.size() * eta.size(); }

    std::vector<double> duhamel(const std::vector<double>& S) const override
    {
        const size_t Ne = eta.size();
        std::vector<double> G(size(), 0.0), w(size(), 0.0);
        for (size_t j = 0; j < Ne; ++j) {
            double acc = 0;
            for (size_t i = lo[j]; i < xi.size() && xi[i] <= eta[j] + 1e-12; ++i) {
                if (i > lo[j]) acc += 0.5 * (xi[i] - xi[i - 1]) * (S[(i - 1) * Ne + j] + S[i * Ne + j]);
                G[i * Ne + j] = acc;
            }
        }
        for (size_t i = 0; i < xi.size(); ++i) {
            double acc = 0;
            for (size_t j = start[i] + 1; j < Ne; ++j) {
                acc += 0.5 * (eta[j] - eta[j - 1]) * (G[i * Ne + j - 1] + G[i * Ne + j]);
                w[i * Ne + j] = 0.25 * acc;
            }
        }
        return w;
    }

    std::vector<double> source(const std::vector<double>& w, bool with_hom,
                               const std::function<double(double, double, double)>& f) const override
    {
        const size_t Ne = eta.size();
        std::vector<double> S(size(), 0.0);
        for (size_t i = 0; i < xi.size(); ++i)
            for (size_t j = start[i]; j < Ne; ++j) {
                const double t = 0.5 * (xi[i] + eta[j]), r = 0.5 * (eta[j] - xi[i]);
                if (t > T * (1 + 1e-12) || r <= 0) continue;
                const double v = w[i * Ne + j] + (with_hom ? hom[i * Ne + j] : 0.0);
                S[i * Ne + j] = r * f(t, r, v / r);
            }
        return S;
    }

    double norm(const std::vector<double>& w, bool with_hom) const override
    {
        const double p = cfg.p;
        std::vector<double> inner(tslice.size(), 0.0);
        for (size_t k = 0; k < tslice.size(); ++k) {
            const double t = tslice[k];
            double acc = 0, prev_x = 0, prev_f = 0;
            bool first = true;
            for (size_t i = 0; i < xi.size() && xi[i] < t; ++i) {
                const double r = t - xi[i];
                const double v = column(w, with_hom, i, 2 * t - xi[i]);
                const double fv = std::pow(std::fabs(v), p) * std::pow(r, 2 - p);
                if (!first) acc += 0.5 * (xi[i] - prev_x) * (fv + prev_f);
                first = false;
                prev_x = xi[i];
                prev_f = fv;
            }
            if (!first) acc += 0.5 * (t - prev_x) * prev_f;  // r = 0 end
            inner[k] = acc;
        }
        double total = 0;
        for (size_t k = 0; k < tslice.size(); ++k) total += trapz_weight(tslice, k) * std::pow(inner[k], q);
        return std::pow(total, 1 / (q * p));
    }

    double value(const std::vector<double>& w, bool with_hom, double t, double r) const override
    {
        if (r < 0.25 * h0) r = 0.25 * h0;
        const double x = t - r, e = t + r;
        if (x < -R0) return 0.0;
        // bilinear in (xi, eta) with the odd reflection across r = 0
        auto at = [&](size_t i, size_t j) {
            const double a = xi[i], b = eta[j];
            if (b < -a) return 0.0;
            if (b < a) {
                // (a, b) -> (b, a); a <= T so a lies on the eta grid
                const size_t i2 = find_xi(b), j2 = find_eta(a);
                return -w[i2 * eta.size() + j2];
            }
            return w[i * eta.size() + j];
        };
        const size_t i = bracket(xi, x), j = bracket(eta, e);
        const double fx = (x - xi[i]) / (xi[i + 1] - xi[i]), fe = (e - eta[j]) / (eta[j + 1] - eta[j]);
        const double wv = (1 - fx) * ((1 - fe) * at(i, j) + fe * at(i, j + 1)) +
                          fx * ((1 - fe) * at(i + 1, j) + fe * at(i + 1, j + 1));
        return (wv + (with_hom ? v_hom(x, e) : 0.0)) / r;
    }

private:
    const StraussConfig& cfg;
    double T, R0, q, h0 = 0;
    std::vector<double> xi, eta, tslice, hom;
    std::vector<size_t> start, lo;

    static size_t bracket(const std::vector<double>& g, double x)
    {
        size_t k = std::upper_bound(g.begin(), g.end(), x) - g.begin();
        k = std::clamp<size_t>(k, 1, g.size() - 1);
        return k - 1;
    }
    size_t find_eta(double v) const { return nearest(eta, v); }
    size_t find_xi(double v) const { return nearest(xi, v); }
    static size_t nearest(const std::vector<double>& g, double v)
    {
        const size_t k = std::lower_bound(g.begin(), g.end(), v - 1e-9) - g.begin();
        return std::min(k, g.size() - 1);
    }

    // linear in eta along column i, free part exact
    double column(const std::vector<double>& w, bool with_hom, size_t i, double e) const
    {
        const size_t Ne = eta.size();
        size_t j = bracket(eta, e);
        j = std::max(j, start[i]);
        const double f = std::clamp((e - eta[j]) / (eta[j + 1] - eta[j]), 0.0, 1.0);
        const double wv = (1 - f) * w[i * Ne + j] + f * w[i * Ne + j + 1];
        return wv + (with_hom ? v_hom(xi[i], e) : 0.0);
    }

    double amp() const { return cfg.eps * cfg.amplitude; }
    double psi(double y) const { return amp() * y * phi(std::fabs(y) / R0); }
    double X(double y) const
    {
        const double s = std::min(std::fabs(y) / R0, 1.0);
        return cfg.g_amp * amp() * R0 * R0 / 8 * (1 - std::pow(1 - s * s, 4));
    }
    // d'Alembert for v = r u with odd extensions; r - t = -xi, r + t = eta
    double v_hom(double x, double e) const { return 0.5 * (psi(e) - psi(x)) + 0.5 * (X(e) - X(x)); }
};

// n = 2: staggered radial leapfrog, r_i = (i + 1/2) h, Dirichlet at R0 + T + 1.
class Fd2 : public Solver {
public:
    Fd2(const StraussConfig& c, double T) : cfg(c), T(T), q(exponents(2, c.p).q)
    {
        h = cfg.width / std::max(4.0, std::round(10 * cfg.resolution));
        Nr = (size_t)std::ceil((cfg.width + T + 1) / h);
        K = std::max<size_t>(2, (size_t)std::ceil(T / (0.5 * h)));
        dt = T / K;
        if ((double)Nr * (K + 1) > cfg.max_cells) {
            std::ostringstream m;
            m << "strauss: space-time grid " << Nr << " x " << K + 1 << " exceeds the cell budget";
            throw ResourceError(m.str());
        }
        r.resize(Nr);
        for (size_t i = 0; i < Nr; ++i) r[i] = (i + 0.5) * h;
        std::vector<double> f(Nr), g(Nr);
        const double a = cfg.eps * cfg.amplitude;
        for (size_t i = 0; i < Nr; ++i) {
            f[i] = a * phi(r[i] / cfg.width);
            g[i] = cfg.g_amp * f[i];
        }
        hom = march(f, g, nullptr);
    }

    size_t size() const override { return (K + 1) * Nr; }

    std::vector<double> duhamel(const std::vector<double>& S) const override
    {
        const std::vector<double> z(Nr, 0.0);
        return march(z, z, &S);
    }

    std::vector<double> source(const std::vector<double>& w, bool with_hom,
                               const std::function<double(double, double, double)>& f) const override
    {
        std::vector<double> S(size());
        for (size_t k = 0; k <= K; ++k)
            for (size_t i = 0; i < Nr; ++i) {
                const size_t idx = k * Nr + i;
                S[idx] = f(k * dt, r[i], w[idx] + (with_hom ? hom[idx] : 0.0));
            }
        return S;
    }

    double norm(const std::vector<double>& w, bool with_hom) const override
    {
        double total = 0;
        for (size_t k = 0; k <= K; ++k) {
            double inner = 0;
            for (size_t i = 0; i < Nr; ++i) {
                const size_t idx = k * Nr + i;
                inner += h * r[i] * std::pow(std::fabs(w[idx] + (with_hom ? hom[idx] : 0.0)), cfg.p);
            }
            total += (k == 0 || k == K ? 0.5 : 1.0) * dt * std::pow(inner, q);
        }
        return std::pow(total, 1 / (q * cfg.p));
    }

    double value(const std::vector<double>& w, bool with_hom, double t, double rr) const override
    {
        const double kt = std::clamp(t / dt, 0.0, (double)K);
        const size_t k = std::min((size_t)kt, K - 1);
        const double ft = kt - k;
        const double ir = std::clamp(rr / h - 0.5, 0.0, (double)Nr - 1);
        const size_t i = std::min((size_t)ir, Nr - 2);
        const double fr = ir - i;
        auto at = [&](size_t kk, size_t ii) { return w[kk * Nr + ii] + (with_hom ? hom[kk * Nr + ii] : 0.0); };
        return (1 - ft) * ((1 - fr) * at(k, i) + fr * at(k, i + 1)) + ft * ((1 - fr) * at(k + 1, i) + fr * at(k + 1, i + 1));
    }

private:
    const StraussConfig& cfg;
    double T, q, h = 0, dt = 0;
    size_t Nr = 0, K = 0;
    std::vector<double> r, hom;

    void lap(const double* u, double* out) const
    {
        for (size_t i = 0; i < Nr; ++i) {
            const double rp = r[i] + 0.5 * h, rm = r[i] - 0.5 * h;
            const double up = i + 1 < Nr ? u[i + 1] : 0.0;
            const double um = i > 0 ? u[i - 1] : 0.0;
            out[i] = (rp * (up - u[i]) - (i > 0 ? rm * (u[i] - um) : 0.0)) / (r[i] * h * h);
        }
    }

    std::vector<double> march(const std::vector<double>& f, const std::vector<double>& g, const std::vector<double>* S) const
    {
        std::vector<double> u(size()), L(Nr);
        std::copy(f.begin(), f.end(), u.begin());
        lap(&u[0], L.data());
        for (size_t i = 0; i < Nr; ++i) u[Nr + i] = f[i] + dt * g[i] + 0.5 * dt * dt * (L[i] + (S ? (*S)[i] : 0.0));
        for (size_t k = 1; k < K; ++k) {
            const double* cur = &u[k * Nr];
            const double* old = &u[(k - 1) * Nr];
            double* nxt = &u[(k + 1) * Nr];
            lap(cur, L.data());
            for (size_t i = 0; i < Nr; ++i)
                nxt[i] = 2 * cur[i] - old[i] + dt * dt * (L[i] + (S ? (*S)[k * Nr + i] : 0.0));
        }
        return u;
    }
};

std::unique_ptr<Solver> make_solver(const StraussConfig& cfg, double T)
{
    if (!(T > 0)) throw DomainError("strauss: T must be positive");
    if (!(cfg.width > 0)) throw ConfigError("strauss: width must be positive");
    if (!(cfg.resolution > 0)) throw ConfigError("strauss: resolution must be positive");
    exponents(cfg.n, cfg.p);
    if (cfg.n == 3) return std::make_unique<Char3>(cfg, T);
    return std::make_unique<Fd2>(cfg, T);
}

RadialSolution sample(const Solver& s, const std::vector<double>& w, bool with_hom, double T, double R0)
{
    RadialSolution out;
    for (int k = 0; k <= 16; ++k) out.t.push_back(T * k / 16);
    for (int i = 0; i <= 64; ++i) out.r.push_back((T + R0) * i / 64);
    for (double t : out.t)
        for (double r : out.r) out.u.push_back(s.value(w, with_hom, t, r));
    return out;
}

}  // namespace

double homogeneous_norm(const StraussConfig& cfg, double T)
{
    const auto s = make_solver(cfg, T);
    return s->norm(std::vector<double>(s->size(), 0.0), true);
}

RadialSolution duhamel(const StraussConfig& cfg, const std::function<double(double, double)>& h, double T)
{
    const auto s = make_solver(cfg, T);
    const std::vector<double> zero(s->size(), 0.0);
    const auto S = s->source(zero, false, [&](double t, double r, double) { return h(t, r); });
    return sample(*s, s->duhamel(S), false, T, cfg.width);
}

PicardResult picard_solve(const StraussConfig& cfg, double T)
{
    if (cfg.max_iter < 1) throw ConfigError("strauss: max_iter must be positive");
    const auto s = make_solver(cfg, T);
    PicardResult res;
    std::vector<double> w(s->size(), 0.0);
    res.hom_norm = s->norm(w, true);
    res.s_norm = res.hom_norm;
    if (res.hom_norm == 0) {
        res.converged = true;
        res.iterations = 1;
        res.reason = "zero data";
        res.norms.push_back(0);
        res.diffs.push_back(0);
        res.sample = sample(*s, w, true, T, cfg.width);
        return res;
    }
    const double coef = cfg.coef, p = cfg.p;
    const auto F = [coef, p](double, double, double u) { return forcing(coef, p, u); };
    for (int m = 1; m <= cfg.max_iter; ++m) {
        std::vector<double> next = s->duhamel(s->source(w, true, F));
        std::vector<double> diff(next.size());
        for (size_t i = 0; i < next.size(); ++i) diff[i] = next[i] - w[i];
        const double d = s->norm(diff, false), nv = s->norm(next, true);
        res.iterations = m;
        res.norms.push_back(nv);
        res.diffs.push_back(d);
        w.swap(next);
        res.s_norm = nv;
        if (!std::isfinite(nv) || nv > cfg.ceiling * res.hom_norm) {
            res.reason = "blow-up ceiling";
            break;
        }
        if (nv > cfg.ball * res.hom_norm) {
            res.reason = "left the ball";
            break;
        }
        if (d <= cfg.tol * nv) {
            res.converged = true;
            res.reason = "contracted";
            break;
        }
        if (m >= 2 && d >= res.diffs[m - 2]) {
            res.reason = "no contraction";
            break;
        }
        if (m == cfg.max_iter) res.reason = "iteration cap";
    }
    res.sample = sample(*s, w, true, T, cfg.width);
    return res;
}

LifespanResult lifespan(const StraussConfig& cfg, const LifespanOptions& opt)
{
    LifespanResult out;
    out.eps = cfg.eps;
    auto ok = [&](double T, int* iters) {
        const PicardResult r = picard_solve(cfg, T);
        ++out.solves;
        if (iters) *iters = r.iterations;
        return r.converged;
    };
    int it = 0;
    double lo = opt.T_start, hi = opt.T_start;
    if (ok(lo, &it)) {
        out.iterations = it;
        for (;;) {
            hi = 2 * lo;
            if (hi > opt.T_max) {
                std::ostringstream m;
                m << "lifespan: no failure up to T=" << lo << " (eps=" << cfg.eps << ")";
                throw ResourceError(m.str());
            }
            if (!ok(hi, &it)) break;
            lo = hi;
            out.iterations = it;
        }
    } else {
        for (;;) {
            lo = hi / 2;
            if (lo < opt.T_min) {
                std::ostringstream m;
                m << "lifespan: no contraction down to T=" << hi << " (eps=" << cfg.eps << ")";
                throw ResourceError(m.str());
            }
            if (ok(lo, &it)) break;
            hi = lo;
        }
        out.iterations = it;
    }
    while (hi / lo > 1 + opt.rel) {
        const double mid = std::sqrt(lo * hi);
        if (ok(mid, &it)) {
            lo = mid;
            out.iterations = it;
        } else {
            hi = mid;
        }
    }
    out.lo = lo;
    out.hi = hi;
    out.T = lo;
    return out;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = lx.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxx > 0 ? sxy / sxx : 0;
}

double correlation(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0;
}

}  // namespace dlab
