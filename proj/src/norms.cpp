#include "dlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include <Eigen/Dense>
#include <json.hpp>

#include "dlab/errors.hpp"
#include "dlab/quadrature.hpp"

namespace dlab {

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const double kPi = 3.14159265358979323846;

double parse_exponent(const nlohmann::json& j, const char* key, double fallback)
{
    if (!j.contains(key) || j[key].is_null()) return fallback;
    if (j[key].is_string()) {
        const std::string s = j[key].get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
        try {
            return std::stod(s);
        } catch (const std::exception&) {
            throw ConfigError(std::string("norm spec: bad value for '") + key + "'");
        }
    }
    return j[key].get<double>();
}

nlohmann::json exponent_json(double v)
{
    if (std::isinf(v)) return "inf";
    return v;
}

double lp_accumulate(double acc, double v, double p) { return std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p); }

double lp_finish(double acc, double p) { return std::isinf(p) ? acc : std::pow(acc, 1 / p); }

void validate(const NormSpec& s)
{
    if (!(s.q >= 1) || !(s.r >= 1)) throw ConfigError("norm spec: exponents must be >= 1");
    if (s.angular != 2 && !std::isinf(s.angular)) throw ConfigError("norm spec: angular exponent must be 2 or inf");
    if (s.T && !(*s.T > 0)) throw ConfigError("norm spec: T must be positive");
}

}  // namespace

std::string to_json(const NormSpec& s)
{
    nlohmann::json j;
    j["alpha"] = s.alpha;
    j["bracket"] = s.bracket;
    j["q"] = exponent_json(s.q);
    j["r"] = exponent_json(s.r);
    j["angular"] = std::isinf(s.angular) ? "inf" : "2";
    j["structure"] = s.structure == Structure::full ? "full" : "factorized";
    j["T"] = s.T ? nlohmann::json(*s.T) : nlohmann::json(nullptr);
    return j.dump();
}

NormSpec norm_spec_from_json(const std::string& text)
{
    NormSpec s;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        s.alpha = j.value("alpha", 0.0);
        s.bracket = j.value("bracket", false);
        s.q = parse_exponent(j, "q", 2);
        s.r = parse_exponent(j, "r", 2);
        s.angular = parse_exponent(j, "angular", 2);
        const std::string st = j.value("structure", std::string("factorized"));
        if (st == "full") {
            s.structure = Structure::full;
        } else if (st == "factorized") {
            s.structure = Structure::factorized;
        } else {
            throw ConfigError("norm spec: structure must be 'factorized' or 'full'");
        }
        if (j.contains("T") && !j["T"].is_null()) s.T = j["T"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("norm spec JSON: ") + e.what());
    }
    validate(s);
    return s;
}

std::vector<double> spatial_norms(const PhysicalField& u, const NormSpec& spec, const AngularGrid* grid)
{
    validate(spec);
    const size_t T = u.times.size(), R = u.radii.r.size(), C = u.channels.size();
    const bool synth = (spec.structure == Structure::full || std::isinf(spec.angular)) && C > 1;
    if (synth && !grid) throw ConfigError("mixed_norm: full structure or L^inf_omega needs an angular grid");
    if (synth && grid->n != u.n) throw ConfigError("mixed_norm: angular grid dimension mismatch");

    // local integrability at the origin: u ~ r^{kmin}
    int kmin = 1 << 30;
    for (size_t ch = 0; ch < C; ++ch) {
        bool nonzero = false;
        for (size_t i = 0; i < T * R && !nonzero; ++i) nonzero = u.data[ch * T * R + i] != cplx(0);
        if (nonzero) kmin = std::min(kmin, u.channels[ch].first);
    }
    if (spec.origin_check && !spec.bracket && spec.alpha > 0 && kmin < (1 << 30) && R > 0 && u.radii.r.front() < 1) {
        const bool bad = std::isinf(spec.r) ? spec.alpha > kmin : (spec.alpha - kmin) * spec.r >= u.n;
        if (bad) throw DivergenceError("mixed_norm: weight |x|^{-alpha} is not integrable at the origin for this field");
    }

    std::vector<double> weight(R), dr(R);
    for (size_t j = 0; j < R; ++j) {
        const double r = u.radii.r[j];
        weight[j] = spec.alpha == 0 ? 1.0 : spec.bracket ? std::pow(1 + r * r, -0.5 * spec.alpha) : std::pow(r, -spec.alpha);
        dr[j] = u.radii.w[j];
    }

    std::vector<double> out(T, 0.0);
    if (!synth) {
        // a single channel factors exactly: |a(t,r)| ||Y_{k,l}||_{L^p}
        double yfac = 1;
        if (C == 1 && (spec.structure == Structure::full || std::isinf(spec.angular)))
            yfac = harmonic_lp_norm(u.n, u.channels[0].first, u.channels[0].second,
                                    spec.structure == Structure::full ? spec.r : spec.angular);
        for (size_t i = 0; i < T; ++i) {
            double acc = 0;
            for (size_t j = 0; j < R; ++j) {
                const double v = yfac * weight[j] * u.angular_l2(i, j);
                acc = std::isinf(spec.r) ? std::max(acc, v) : acc + dr[j] * std::pow(v, spec.r);
            }
            out[i] = lp_finish(acc, spec.r);
        }
        return out;
    }

    // synthesize u(r omega) on the angular grid: B (nodes x channels) times coefficients
    int K = 0;
    for (const auto& c : u.channels) K = std::max(K, c.first);
    if (grid->degree < 2 * K) throw ResolutionError("mixed_norm: angular grid degree below 2 * max k");
    const std::vector<double> Ball = basis_matrix(*grid, K);
    const size_t Nw = grid->nodes.size(), Nall = static_cast<size_t>(channel_count(u.n, K));
    Eigen::MatrixXd B(Nw, C);
    for (size_t w = 0; w < Nw; ++w)
        for (size_t ch = 0; ch < C; ++ch)
            B(w, ch) = Ball[w * Nall + channel_index(u.n, u.channels[ch].first, u.channels[ch].second)];
    const double pang = spec.structure == Structure::full ? spec.r : spec.angular;
    Eigen::MatrixXd Ar(C, R), Ai(C, R);
    for (size_t i = 0; i < T; ++i) {
        for (size_t ch = 0; ch < C; ++ch)
            for (size_t j = 0; j < R; ++j) {
                const cplx a = u.at(ch, i, j);
                Ar(ch, j) = a.real();
                Ai(ch, j) = a.imag();
            }
        const Eigen::MatrixXd Sr = B * Ar, Si = B * Ai;
        double acc = 0;
        for (size_t j = 0; j < R; ++j) {
            double ang = 0;
            for (size_t w = 0; w < Nw; ++w) {
                const double v = std::hypot(Sr(w, j), Si(w, j));
                ang = std::isinf(pang) ? std::max(ang, v) : ang + grid->weights[w] * std::pow(v, pang);
            }
            ang = lp_finish(ang, pang);
            const double v = weight[j] * ang;
            acc = std::isinf(spec.r) ? std::max(acc, v) : acc + dr[j] * std::pow(v, spec.r);
        }
        out[i] = lp_finish(acc, spec.r);
    }
    return out;
}

NormResult mixed_norm(const PhysicalField& u, const NormSpec& spec, const AngularGrid* grid)
{
    NormResult res;
    if (u.times.empty()) return res;
    const std::vector<double> F = spatial_norms(u, spec, grid);
    std::vector<double> t = u.times, f = F;
    if (spec.T) {
        const double T = *spec.T;
        if (u.times.front() > 1e-12 || u.times.back() < T * (1 - 1e-12))
            throw ConfigError("mixed_norm: time grid does not cover [0, T]");
        t.clear();
        f.clear();
        for (size_t i = 0; i < u.times.size(); ++i)
            if (u.times[i] >= -1e-12 && u.times[i] <= T * (1 + 1e-12)) {
                t.push_back(u.times[i]);
                f.push_back(F[i]);
            }
    }
    if (std::isinf(spec.q)) {
        res.value = *std::max_element(f.begin(), f.end());
        return res;
    }
    if (t.size() == 1) {
        res.value = f[0];
        return res;
    }
    const std::vector<double> w = trapezoid_weights(t);
    double acc = 0;
    for (size_t i = 0; i < t.size(); ++i) acc += w[i] * std::pow(f[i], spec.q);
    res.value = std::pow(acc, 1 / spec.q);
    if (spec.T || t.size() < 8 || acc == 0) return res;

    // power-law fit on the outer quarter of each side, integrated beyond the window
    double extra = 0;
    for (int side : {-1, 1}) {
        std::vector<double> x, y;
        const double tend = side > 0 ? t.back() : -t.front();
        if (tend <= 0) continue;
        for (size_t i = 0; i < t.size(); ++i) {
            const double s = side * t[i];
            if (s >= 0.75 * tend && s > 0 && f[i] > 0) {
                x.push_back(std::log(s));
                y.push_back(std::log(f[i]));
            }
        }
        if (x.size() < 3) continue;
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
        const double gamma = -sxy / sxx, logc = my + gamma * mx;
        if (spec.q * gamma <= 1) {
            res.tail_finite = false;
            continue;
        }
        extra += std::exp(spec.q * logc) * std::pow(tend, 1 - spec.q * gamma) / (spec.q * gamma - 1);
    }
    res.tail = res.tail_finite ? std::pow(acc + extra, 1 / spec.q) / res.value - 1 : kInf;
    return res;
}

double harmonic_lp_norm(int n, int k, int l, double p)
{
    if (n != 2 && n != 3) throw DomainError("harmonic_lp_norm: n must be 2 or 3");
    if (k < 0 || l < 1 || l > dim_harmonic(n, k)) throw DomainError("harmonic_lp_norm: no such harmonic");
    if (p == 2) return 1;
    static std::map<std::tuple<int, int, int, double>, double> cache;
    static std::mutex mtx;
    const auto key = std::make_tuple(n, k, l, p);
    {
        std::lock_guard<std::mutex> lock(mtx);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    double v = 0;
    if (n == 2 && k > 0 && !std::isinf(p)) {
        // int_0^{2pi} |cos k t|^p dt / pi^{p/2}
        v = std::pow(2 * std::sqrt(kPi) * std::tgamma((p + 1) / 2) / std::tgamma(p / 2 + 1) / std::pow(kPi, p / 2), 1 / p);
    } else if (k == 0) {
        const double a = sphere_area(n);
        v = std::isinf(p) ? 1 / std::sqrt(a) : std::pow(a, 1 / p - 0.5);
    } else {
        const AngularGrid g = make_angular_grid(n, 16 * k + 64);
        double acc = 0;
        for (size_t i = 0; i < g.nodes.size(); ++i) {
            const double y = std::fabs(sph_harmonic(n, k, l, g.nodes[i]));
            acc = std::isinf(p) ? std::max(acc, y) : acc + g.weights[i] * std::pow(y, p);
        }
        v = lp_finish(acc, p);
    }
    std::lock_guard<std::mutex> lock(mtx);
    cache[key] = v;
    return v;
}

double cube_norm(const PhysicalField& u, size_t ti, double p_outer, double q_inner, const CubePartition& part)
{
    if (part.n != 2 && part.n != 3) throw ConfigError("cube_norm: n must be 2 or 3");
    if (part.n != u.n) throw ConfigError("cube_norm: dimension mismatch");
    if (part.samples < 2) throw ResolutionError("cube_norm: need at least 2 samples per cube axis");
    if (ti >= u.times.size()) throw DomainError("cube_norm: time index out of range");
    const double radius = std::min(part.radius, u.radii.r.back());
    int K = 0;
    for (const auto& c : u.channels) K = std::max(K, c.first);
    const size_t Nall = static_cast<size_t>(channel_count(u.n, K));
    const std::vector<double>& rr = u.radii.r;
    const size_t R = rr.size();
    std::vector<double> Y(Nall);

    // cubic Lagrange in r on the four nearest radii
    auto value_at = [&](const Point3& x) {
        const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        size_t j = std::upper_bound(rr.begin(), rr.end(), r) - rr.begin();
        size_t j0 = j < 2 ? 0 : std::min(j - 2, R - 4);
        Point3 om{1, 0, 0};
        if (r > 0) om = {x[0] / r, x[1] / r, x[2] / r};
        sph_harmonics_all(u.n, K, om, Y.data());
        cplx acc = 0;
        for (size_t ch = 0; ch < u.channels.size(); ++ch) {
            cplx a = 0;
            for (size_t m = j0; m < j0 + 4; ++m) {
                double L = 1;
                for (size_t o = j0; o < j0 + 4; ++o)
                    if (o != m) L *= (r - rr[o]) / (rr[m] - rr[o]);
                a += L * u.at(ch, ti, m);
            }
            acc += a * Y[channel_index(u.n, u.channels[ch].first, u.channels[ch].second)];
        }
        return std::abs(acc);
    };
    if (R < 4) throw ResolutionError("cube_norm: radial grid too small");

    const int nc = static_cast<int>(std::ceil(radius));
    const int s = part.samples;
    const double cell = std::pow(1.0 / s, part.n);
    double outer = 0;
    const int zlo = part.n == 3 ? -nc : 0, zhi = part.n == 3 ? nc : 1;
    for (int a = -nc; a < nc; ++a)
        for (int b = -nc; b < nc; ++b)
            for (int c = zlo; c < zhi; ++c) {
                double inner = 0;
                bool any = false;
                for (int i = 0; i < s; ++i)
                    for (int j = 0; j < s; ++j)
                        for (int k = 0; k < (part.n == 3 ? s : 1); ++k) {
                            Point3 x{a + (i + 0.5) / s, b + (j + 0.5) / s, part.n == 3 ? c + (k + 0.5) / s : 0.0};
                            if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] > radius * radius) continue;
                            any = true;
                            const double v = value_at(x);
                            inner = std::isinf(q_inner) ? std::max(inner, v) : inner + cell * std::pow(v, q_inner);
                        }
                if (!any) continue;
                outer = lp_accumulate(outer, lp_finish(inner, q_inner), p_outer);
            }
    return lp_finish(outer, p_outer);
}

double kss_norm(const PhysicalField& u, double mu, double T)
{
    if (!(T > 0) || mu < 0) throw DomainError("kss_norm: need T > 0 and mu >= 0");
    NormSpec s;
    s.alpha = mu;
    s.bracket = true;
    s.T = T;
    return mixed_norm(u, s).value;
}

double kss_budget(double mu, double T)
{
    if (!(T > 0) || mu < 0) throw DomainError("kss_budget: need T > 0 and mu >= 0");
    if (mu > 0.5) return 1;
    if (mu == 0.5) return std::sqrt(std::log(2 + T));
    return std::pow(T, 0.5 - mu);
}

}  // namespace dlab
