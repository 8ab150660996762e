#include "dlab/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "dlab/errors.hpp"
#include "dlab/propagator.hpp"
#include "dlab/quadrature.hpp"
#include "dlab/rng.hpp"

namespace dlab {

namespace {

using Rat = boost::multiprecision::cpp_rational;
const double kInf = std::numeric_limits<double>::infinity();
const double kPi = 3.14159265358979323846;

// Simplest fraction within 1e-12 (relative), denominator <= 10^6; exact binary value otherwise.
Rat to_rat(double x)
{
    if (!std::isfinite(x)) throw ConfigError("admissible: non-finite parameter");
    const double tol = 1e-12 * std::max(1.0, std::fabs(x));
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double y = x;
    for (int it = 0; it < 40; ++it) {
        const double a = std::floor(y);
        const long long ai = static_cast<long long>(a);
        const long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (k2 > 1000000) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if (std::fabs(static_cast<double>(h1) / k1 - x) <= tol) return Rat(h1) / Rat(k1);
        const double frac = y - a;
        if (frac < 1e-15) break;
        y = 1 / frac;
    }
    return Rat(x);
}

// 1/p, exact zero for infinity
Rat inv(double p)
{
    if (std::isinf(p)) return Rat(0);
    return Rat(1) / to_rat(p);
}

double inv_d(double p) { return std::isinf(p) ? 0.0 : 1 / p; }

const std::map<std::string, std::string>& family_table()
{
    static const std::map<std::string, std::string> t = {
        {"I", "I"},           {"II", "Thm1.1"},     {"III", "Thm1.4"},    {"IV", "Thm1.2"},   {"V", "V"},
        {"VI", "KSS"},        {"VII", "Thm1.7"},    {"VIII", "Thm1.6"},   {"Thm1.1", "Thm1.1"}, {"Thm1.2", "Thm1.2"},
        {"Cor1.3", "Cor1.3"}, {"Thm1.4", "Thm1.4"}, {"Thm1.5", "Thm1.5"}, {"Thm1.6", "Thm1.6"}, {"Thm1.7", "Thm1.7"},
        {"Thm1.8", "Thm1.8"}, {"KSS", "KSS"}};
    return t;
}

struct Ctx {
    Rat iq, ir, al, n, a, half{Rat(1) / 2};
    Rat gap() const { return (n - 1) * (half - ir); }  // (n-1)(1/2 - 1/r)
};

Ctx make_ctx(const EstimateSpec& s)
{
    Ctx c;
    c.iq = inv(s.q);
    c.ir = inv(s.r);
    c.al = to_rat(s.alpha);
    c.n = Rat(s.n);
    c.a = to_rat(s.a);
    return c;
}

bool localized(const std::string& fam, const EstimateSpec& s)
{
    return fam == "Thm1.2" || fam == "V" || fam == "Thm1.8" || fam == "KSS" || (fam == "Thm1.4" && s.T.has_value());
}

// Thm 1.2 boundary/endpoint/strict branch
enum class Branch { boundary, endpoint, strict };

Branch thm12_branch(const EstimateSpec& s, const Ctx& c)
{
    if (std::isinf(s.r) && s.q == 2 && s.n == 2) return Branch::endpoint;
    return c.iq == c.gap() ? Branch::boundary : Branch::strict;
}

Rat thm17_b_min(const Ctx& c, bool& strict)
{
    strict = !(c.al < c.n * c.iq);
    if (!strict) return -c.al + c.iq - c.gap();
    return -(c.n - 1) * c.iq - c.gap();
}

cplx taper_poly(double rho, double lo, double hi, const cplx* c3)
{
    const double x = (rho - lo) / (hi - lo);
    const double t = std::pow(std::sin(kPi * x), 4);
    const double y = 2 * x - 1;
    return (c3[0] + c3[1] * y + c3[2] * y * y) * t;
}

int sectoral(int n, int k) { return n == 3 && k > 0 ? 2 * k : 1; }

}  // namespace

std::string canonical_family(const std::string& family)
{
    const auto& t = family_table();
    auto it = t.find(family);
    if (it == t.end()) throw ConfigError("unknown estimate family '" + family + "'");
    return it->second;
}

std::string to_json(const EstimateSpec& s)
{
    auto ex = [](double v) { return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v); };
    nlohmann::json j;
    j["family"] = s.family;
    j["n"] = s.n;
    j["a"] = s.a;
    j["q"] = ex(s.q);
    j["r"] = ex(s.r);
    j["alpha"] = s.alpha;
    j["mu"] = s.mu;
    j["b"] = s.b ? nlohmann::json(*s.b) : nlohmann::json(nullptr);
    j["s"] = s.s ? nlohmann::json(*s.s) : nlohmann::json(nullptr);
    j["T"] = s.T ? nlohmann::json(*s.T) : nlohmann::json(nullptr);
    j["radial"] = s.radial;
    return j.dump();
}

EstimateSpec estimate_spec_from_json(const std::string& text)
{
    EstimateSpec s;
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        auto ex = [&](const char* key, double fb) {
            if (!j.contains(key) || j[key].is_null()) return fb;
            if (j[key].is_string()) {
                const std::string v = j[key].get<std::string>();
                if (v == "inf" || v == "infinity") return kInf;
                throw ConfigError(std::string("estimate spec: bad value for '") + key + "'");
            }
            return j[key].get<double>();
        };
        auto opt = [&](const char* key) -> std::optional<double> {
            if (!j.contains(key) || j[key].is_null()) return std::nullopt;
            return j[key].get<double>();
        };
        s.family = j.value("family", s.family);
        s.n = j.value("n", s.n);
        s.a = j.value("a", s.a);
        s.q = ex("q", s.q);
        s.r = ex("r", s.r);
        s.alpha = j.value("alpha", s.alpha);
        s.mu = j.value("mu", s.mu);
        s.b = opt("b");
        s.s = opt("s");
        s.T = opt("T");
        s.radial = j.value("radial", s.radial);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("estimate spec JSON: ") + e.what());
    }
    canonical_family(s.family);
    if (s.n < 2) throw ConfigError("estimate spec: n must be >= 2");
    return s;
}

EstimateSpec load_estimate_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return estimate_spec_from_json(ss.str());
}

Verdict admissible(const EstimateSpec& spec)
{
    const std::string fam = canonical_family(spec.family);
    Verdict v;
    auto need = [&](bool cond, const std::string& name) {
        if (!cond) {
            v.ok = false;
            v.violated.push_back(name);
        }
    };
    const Ctx c = make_ctx(spec);
    const Rat half = c.half;
    const bool qinf = std::isinf(spec.q), rinf = std::isinf(spec.r);
    need(spec.n >= 2, "n >= 2");
    need(spec.a > 0, "a > 0");
    need(c.iq <= half, "q >= 2");
    need(c.ir <= half, "r >= 2");
    const bool wave_only = fam != "I" && fam != "Thm1.1" && fam != "Thm1.6" && fam != "Thm1.7";
    if (wave_only) need(c.a == 1, "a = 1");
    if (localized(fam, spec)) need(spec.T.has_value() && *spec.T > 0, "T > 0 given");

    const Exponents e = scaling_exponent(spec);
    if (spec.s) {
        EstimateSpec bare = spec;
        bare.s.reset();
        need(std::fabs(*spec.s - scaling_exponent(bare).s) <= 1e-12, "s = scaling exponent");
    }

    if (fam == "I") {
        const Rat cst = c.a == 1 ? Rat((c.n - 1) / 2) : Rat(c.n / 2);
        need(c.iq <= cst * (half - c.ir), "1/q <= c (1/2 - 1/r)");
        need(!(qinf && rinf), "(q,r) != (inf,inf)");
        if (rinf) need(c.iq != std::min(half, Rat(cst * half)), "not the endpoint (q, inf)");
    } else if (fam == "Thm1.1") {
        need(!rinf, "r < inf");
        need(c.iq < c.gap() || (qinf && c.ir == half), "1/q < (n-1)(1/2-1/r) or (q,r)=(inf,2)");
    } else if (fam == "Cor1.3") {
        need((c.n - 1) / 2 * (half - c.ir) < c.iq, "(n-1)/2 (1/2-1/r) < 1/q");
        need(c.iq < c.gap(), "1/q < (n-1)(1/2-1/r)");
        const Rat skn = 2 * c.iq - c.gap();
        need(to_rat(e.b) > skn, "b > s_kn");
    } else if (fam == "Thm1.2") {
        const Branch br = thm12_branch(spec, c);
        if (br != Branch::endpoint) need(!rinf, "r < inf");
        if (br != Branch::endpoint) need(c.gap() <= c.iq, "(n-1)(1/2-1/r) <= 1/q");
    } else if (fam == "Thm1.4" && !spec.T) {
        need(c.iq < c.gap() || (qinf && c.ir == half), "1/q < (n-1)(1/2-1/r) or (q,r)=(inf,2)");
        need(!(c.iq == half && rinf), "(q,r) != (2,inf)");
        need(!(qinf && rinf), "(q,r) != (inf,inf)");
    } else if (fam == "Thm1.4" || fam == "V") {
        need(!rinf, "r < inf");
        need(c.gap() <= c.iq, "(n-1)(1/2-1/r) <= 1/q");
    } else if (fam == "Thm1.5") {
        need(spec.radial, "radial data");
        if (!qinf && !rinf) {
            need(c.iq - c.gap() < c.al, "1/q - (n-1)(1/2-1/r) < alpha");
            need(c.al < c.n * c.ir, "alpha < n/r");
        } else if (qinf && !rinf) {
            need(-c.gap() <= c.al, "-(n-1)(1/2-1/r) <= alpha");
            need(c.al < c.n * c.ir, "alpha < n/r");
        } else if (!qinf && rinf) {
            need(c.iq < half, "q > 2");
            need(c.iq - (c.n - 1) / 2 < c.al, "1/q - (n-1)/2 < alpha");
            need(c.al <= 0, "alpha <= 0");
        } else {
            need(false, "(q,r) != (inf,inf)");
        }
    } else if (fam == "Thm1.6" || fam == "Thm1.7") {
        if (fam == "Thm1.6") {
            need(c.iq >= c.ir, "q <= r");
            need(!rinf, "r < inf");
        } else {
            need(c.ir >= c.iq, "r <= q");
        }
        need(c.iq - (c.n - 1) / 2 + (c.n - 1) * c.ir < c.al, "1/q - (n-1)/2 + (n-1)/r < alpha");
        need(c.al < c.n * c.ir, "alpha < n/r");
        if (fam == "Thm1.6") {
            if (spec.b) need(to_rat(*spec.b) == c.iq - c.al, "b = 1/q - alpha");
        } else {
            bool strict = false;
            const Rat bmin = thm17_b_min(c, strict);
            const Rat b = to_rat(e.b);
            need(strict ? b > bmin : b >= bmin, strict ? "b > -(n-1)/q - (n-1)(1/2-1/r)" : "b >= -alpha + 1/q - (n-1)(1/2-1/r)");
        }
    } else if (fam == "Thm1.8") {
        need(c.iq == c.ir, "q = r = p");
        need(!rinf, "p < inf");
        need((c.n - 1) * (c.ir - half) < c.al, "(n-1)(1/p-1/2) < alpha");
        need(c.al < c.n * c.ir - (c.n - 1) / 2, "alpha < n/p - (n-1)/2");
    } else if (fam == "KSS") {
        need(spec.mu >= 0, "mu >= 0");
        need(c.iq == half && c.ir == half, "q = r = 2");
    }
    return v;
}

Exponents scaling_exponent(const EstimateSpec& spec)
{
    const std::string fam = canonical_family(spec.family);
    const double n = spec.n, a = spec.a, iq = inv_d(spec.q), ir = inv_d(spec.r), al = spec.alpha;
    const double gap = (n - 1) * (0.5 - ir);
    Exponents e;
    if (fam == "I") {
        e.s = n * (0.5 - ir) - a * iq;
    } else if (fam == "Thm1.1") {
        e.s = n * (0.5 - ir) - a * iq;
        e.b = iq;
    } else if (fam == "Cor1.3") {
        e.s = n * (0.5 - ir) - iq;
        e.b = 2 * iq - gap + 0.05;
    } else if (fam == "Thm1.2") {
        const Branch br = thm12_branch(spec, make_ctx(spec));
        if (br == Branch::endpoint) {
            e.s = e.b = 0.5 + 0.1;
            e.inhomogeneous = true;
        } else if (br == Branch::boundary) {
            e.s = 0.5 - ir;
            e.b = iq;
            e.log_q = spec.q;
        } else {
            e.s = 0.5 - ir;
            e.b = gap;
        }
    } else if (fam == "Thm1.4" || fam == "V") {
        if (fam == "Thm1.4" && !spec.T) {
            e.s = n / 2 - n * ir - iq;
        } else if (make_ctx(spec).iq == make_ctx(spec).gap()) {
            e.s = 0.5 - ir + 0.1;
            e.inhomogeneous = true;
        } else {
            e.s = 0.5 - ir;
        }
    } else if (fam == "Thm1.5") {
        e.s = al + n * (0.5 - ir) - iq;
    } else if (fam == "Thm1.6") {
        e.s = n / 2 + al - a * iq - n * ir;
        e.b = iq - al;
    } else if (fam == "Thm1.7") {
        e.s = n / 2 + al - a * iq - n * ir;
        bool strict = false;
        const Rat bmin = thm17_b_min(make_ctx(spec), strict);
        e.b = bmin.convert_to<double>() + (strict ? 0.05 : 0.0);
    } else if (fam == "Thm1.8") {
        e.s = 0.5 - ir;
    } else if (fam == "KSS") {
        e.s = 0;
    }
    if (spec.s) e.s = *spec.s;
    if (spec.b) e.b = *spec.b;
    return e;
}

double time_factor(const EstimateSpec& spec)
{
    const std::string fam = canonical_family(spec.family);
    if (!localized(fam, spec)) return 1;
    if (!spec.T || !(*spec.T > 0)) throw ConfigError("localized family needs T > 0");
    const double T = *spec.T, n = spec.n, iq = inv_d(spec.q), ir = inv_d(spec.r);
    const double gap = (n - 1) * (0.5 - ir);
    if (fam == "KSS") return kss_budget(spec.mu, T);
    if (fam == "Thm1.8") return std::pow(T, -spec.alpha - (n - 1) / 2 + n * ir);
    const Ctx c = make_ctx(spec);
    if (fam == "Thm1.2" && thm12_branch(spec, c) == Branch::endpoint) return std::sqrt(std::log(2 + T));
    if (c.iq == c.gap()) return std::pow(std::log(2 + T), iq);
    return std::pow(T, iq - gap);
}

std::string to_json(const DataFamily& d)
{
    nlohmann::json j;
    j["kind"] = d.kind;
    j["k"] = d.k;
    j["l"] = d.l;
    j["k_max"] = d.k_max;
    j["decay"] = d.decay;
    j["terms"] = d.terms;
    j["single"] = d.single;
    j["h"] = d.h;
    return j.dump();
}

DataFamily data_family_from_string(const std::string& text)
{
    DataFamily d;
    const size_t p = text.find('(');
    d.kind = text.substr(0, p);
    static const char* kinds[] = {"single-harmonic", "random-band", "fourier-series-radial", "gaussian-radial",
                                  "concentration"};
    if (std::find_if(std::begin(kinds), std::end(kinds), [&](const char* k) { return d.kind == k; }) == std::end(kinds))
        throw ConfigError("unknown data family '" + d.kind + "'");
    if (p == std::string::npos) return d;
    if (text.back() != ')') throw ConfigError("data family: missing ')' in '" + text + "'");
    std::stringstream args(text.substr(p + 1, text.size() - p - 2));
    std::string item;
    while (std::getline(args, item, ',')) {
        const size_t eq = item.find('=');
        std::string key = eq == std::string::npos ? std::string(d.kind == "concentration" ? "h" : "k") : item.substr(0, eq);
        const std::string val = eq == std::string::npos ? item : item.substr(eq + 1);
        double x = 0;
        try {
            x = std::stod(val);
        } catch (const std::exception&) {
            throw ConfigError("data family: bad value '" + val + "'");
        }
        if (key == "k") d.k = static_cast<int>(x);
        else if (key == "l") d.l = static_cast<int>(x);
        else if (key == "k_max") d.k_max = static_cast<int>(x);
        else if (key == "decay") d.decay = x;
        else if (key == "terms") d.terms = static_cast<int>(x);
        else if (key == "single") d.single = static_cast<int>(x);
        else if (key == "h") d.h = x;
        else throw ConfigError("data family: unknown parameter '" + key + "'");
    }
    return d;
}

SpectralField generate(const DataFamily& fam, int n, std::uint64_t seed)
{
    if (n != 2 && n != 3) throw ConfigError("generate: n must be 2 or 3");
    CounterRng rng(seed, 0x9e11);
    auto coeffs = [&](cplx* c3) {
        for (int i = 0; i < 3; ++i) c3[i] = cplx(rng.normal(), rng.normal()) / (1.0 + i);
    };
    SpectralField f;
    f.n = n;
    auto add_block = [&](int k, int l, cplx amp) {
        cplx c3[3];
        coeffs(c3);
        Block b;
        b.k = k;
        b.l = l;
        b.prof = make_profile(0.5, 1.0, 4, 12, [&](double rho) { return amp * taper_poly(rho, 0.5, 1.0, c3); });
        f.blocks.push_back(b);
    };
    if (fam.kind == "single-harmonic") {
        if (fam.k < 0) throw ConfigError("generate: k must be >= 0");
        const int l = fam.l > 0 ? fam.l : sectoral(n, fam.k);
        if (l > dim_harmonic(n, fam.k)) throw ConfigError("generate: l out of range");
        add_block(fam.k, l, 1.0);
    } else if (fam.kind == "random-band") {
        for (int k = 0; k <= fam.k_max; ++k)
            for (int l = 1; l <= dim_harmonic(n, k); ++l) add_block(k, l, std::pow(1.0 + k, -fam.decay));
    } else if (fam.kind == "fourier-series-radial") {
        std::vector<cplx> c(fam.terms);
        for (int m = 0; m < fam.terms; ++m) {
            const cplx z(rng.normal(), rng.normal());
            c[m] = fam.single >= 0 ? cplx(m == fam.single ? 1.0 : 0.0) : z * std::pow(1.0 + m, -fam.decay) / std::sqrt(2.0);
        }
        Block b;
        b.prof = make_profile(0.5, 1.0, std::max(4, 2 * fam.terms), 12, [&](double rho) {
            cplx s = 0;
            for (int m = 0; m < fam.terms; ++m) s += c[m] * std::exp(cplx(0, 4 * kPi * m * rho));
            return s * std::pow(std::sin(kPi * (rho - 0.5) / 0.5), 4);
        });
        f.blocks.push_back(b);
    } else if (fam.kind == "gaussian-radial") {
        const cplx phase = std::exp(cplx(0, 2 * kPi * rng.uniform()));
        Block b;
        b.prof = make_profile(0.5, 1.0, 4, 12, [&](double rho) {
            const double z = (rho - 0.75) / 0.07;
            return phase * std::exp(-0.5 * z * z) * std::pow(std::sin(kPi * (rho - 0.5) / 0.5), 4);
        });
        f.blocks.push_back(b);
    } else if (fam.kind == "concentration") {
        if (!(fam.h > 0)) throw ConfigError("generate: concentration scale h must be positive");
        add_block(fam.k, sectoral(n, fam.k), 1.0);
        f = rescale(f, 1 / fam.h);
        f = scale(f, 1 / l2_norm(f));
    } else {
        throw ConfigError("unknown data family '" + fam.kind + "'");
    }
    return f;
}

namespace {

// Time window and radial grid for one estimate; returns the evolved field.
PhysicalField evolve_window(const EstimateSpec& spec, const std::string& fam, const SpectralField& f,
                            const RatioOptions& opt, int& K, double& tmax)
{
    double rho_lo = 1e300, rho_hi = 0;
    K = 0;
    for (const auto& b : f.blocks) {
        rho_lo = std::min(rho_lo, b.prof.lo);
        rho_hi = std::max(rho_hi, b.prof.hi);
        K = std::max(K, b.k);
    }
    if (!(rho_hi > 0) || !(rho_lo > 0)) throw DomainError("ratio: data must vanish near zero frequency");
    const double L = 1 / rho_hi, tau = std::pow(L, spec.a);
    const double Lwin = opt.fixed_scale > 0 ? opt.fixed_scale : L;
    const double tauwin = std::pow(Lwin, spec.a);
    const double speed = spec.a * std::pow(rho_hi, spec.a - 1);
    std::vector<double> times;
    if (localized(fam, spec)) {
        tmax = *spec.T;
        const int steps = std::max(32, static_cast<int>(std::ceil(tmax / tau * opt.steps_per_unit)));
        times = linspace(0, tmax, steps + 1);
    } else {
        const double W = opt.window > 0 ? opt.window : (spec.a == 1 ? 64.0 : 32.0);
        tmax = W * tauwin;
        const int steps = static_cast<int>(std::ceil(2 * tmax / tau * opt.steps_per_unit));
        times = linspace(-tmax, tmax, steps + 1);
    }
    const double extent = L * (48 + 2.5 * K * rho_hi / rho_lo) + (opt.fixed_scale > 0 ? 48 * Lwin : 0);
    const double R = extent + speed * tmax;
    const double r0 = std::min(opt.r_min, 0.5 * R);
    const int panels = std::max(4, static_cast<int>(std::ceil((R - r0) / (2 * L))));
    EvolveOptions eo;
    eo.check = false;
    return evolve(f, times, radial_grid_gl(f.n, r0, R, panels), DispersionLaw{spec.a}, eo);
}

}  // namespace

RatioResult ratio(const EstimateSpec& spec, const SpectralField& f, const RatioOptions& opt)
{
    const std::string fam = canonical_family(spec.family);
    if (f.n != spec.n) throw ConfigError("ratio: field dimension differs from spec n");
    if (!opt.sharpness) {
        const Verdict v = admissible(spec);
        if (!v.ok) {
            std::string msg = "ratio: spec not admissible:";
            for (const auto& c : v.violated) msg += " [" + c + "]";
            throw DomainError(msg);
        }
    }
    if (fam == "Thm1.5" && !f.radial()) throw DomainError("ratio: Thm1.5 needs radial data");
    const Exponents e = scaling_exponent(spec);
    RatioResult res;
    if (f.blocks.empty()) return res;

    const double tf = time_factor(spec);
    if (fam == "KSS") {
        res.rhs = kss_budget(spec.mu, *spec.T) * l2_norm(f);
    } else if (fam == "Thm1.5") {
        // ||u(0)||_{H^s} + ||u_t(0)||_{H^{s-1}} with u_t(0) = i D f
        res.rhs = 2 * sobolev_norm(f, e.s);
    } else {
        NormWeight w;
        w.s = e.s;
        w.b = e.b;
        w.inhomogeneous = e.inhomogeneous;
        w.log_q = e.log_q;
        res.rhs = weighted_norm(f, w) * tf;
    }

    int K = 0;
    double tmax = 0;
    const PhysicalField u = evolve_window(spec, fam, f, opt, K, tmax);

    if (fam == "KSS") {
        res.lhs = kss_norm(u, spec.mu, *spec.T);
    } else {
        NormSpec ns;
        ns.q = spec.q;
        ns.r = spec.r;
        ns.alpha = spec.alpha;
        ns.origin_check = !opt.sharpness;
        const bool factorized = fam == "Thm1.4" || fam == "V" || fam == "Thm1.7" || fam == "Thm1.8";
        ns.structure = factorized ? Structure::factorized : Structure::full;
        if (localized(fam, spec)) ns.T = tmax;
        AngularGrid grid;
        const AngularGrid* gp = nullptr;
        if (!factorized && f.blocks.size() > 1) {
            grid = make_angular_grid(f.n, opt.angular_degree > 0 ? opt.angular_degree : 2 * K + 16);
            gp = &grid;
        }
        const NormResult nr = mixed_norm(u, ns, gp);
        res.lhs = nr.value;
        res.tail = nr.tail;
        res.tail_finite = nr.tail_finite;
    }
    if (res.rhs > 0) {
        res.ratio = res.lhs / res.rhs;
    } else {
        res.ratio = res.lhs > 0 ? kInf : 0;
    }
    return res;
}

std::vector<RatioResult> kss_ratios(const SpectralField& f, double T, const std::vector<double>& mus,
                                    const RatioOptions& opt)
{
    if (!(T > 0)) throw DomainError("kss_ratios: need T > 0");
    std::vector<RatioResult> out(mus.size());
    if (f.blocks.empty() || mus.empty()) return out;
    EstimateSpec spec;
    spec.family = "KSS";
    spec.n = f.n;
    spec.T = T;
    int K = 0;
    double tmax = 0;
    const PhysicalField u = evolve_window(spec, "KSS", f, opt, K, tmax);
    const double norm = l2_norm(f);
    for (size_t i = 0; i < mus.size(); ++i) {
        out[i].lhs = kss_norm(u, mus[i], T);
        out[i].rhs = kss_budget(mus[i], T) * norm;
        out[i].ratio = out[i].lhs / out[i].rhs;
    }
    return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) return 0;
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= x.size();
    my /= x.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxx > 0 ? sxy / sxx : 0;
}

namespace {

// Pooled slope of log y against log x with the mean of each group removed.
double grouped_slope(const std::vector<SweepRow>& rows, bool k_axis)
{
    std::map<double, std::vector<std::pair<double, double>>> groups;
    for (const auto& row : rows) {
        if (!row.error.empty() || !(row.res.ratio > 0) || std::isinf(row.res.ratio)) continue;
        const double key = k_axis ? row.lambda : row.k;
        const double x = k_axis ? std::log(1.0 + row.k) : std::log(row.lambda);
        groups[key].push_back({x, std::log(row.res.ratio)});
    }
    double sxy = 0, sxx = 0;
    for (const auto& [key, pts] : groups) {
        if (pts.size() < 2) continue;
        double mx = 0, my = 0;
        for (const auto& p : pts) {
            mx += p.first;
            my += p.second;
        }
        mx /= pts.size();
        my /= pts.size();
        for (const auto& p : pts) {
            sxy += (p.first - mx) * (p.second - my);
            sxx += (p.first - mx) * (p.first - mx);
        }
    }
    return sxx > 0 ? sxy / sxx : 0;
}

}  // namespace

SweepReport sweep(const EstimateSpec& spec, const DataFamily& family, const std::vector<double>& lambdas,
                  const std::vector<int>& ks, std::uint64_t seed, const RatioOptions& opt, int jobs)
{
    SweepReport rep;
    rep.spec = spec;
    rep.family = family;
    rep.exps = scaling_exponent(spec);
    for (double lam : lambdas)
        for (int k : ks) {
            SweepRow row;
            row.lambda = lam;
            row.k = k;
            rep.rows.push_back(row);
        }
    auto run = [&](SweepRow& row) {
        try {
            DataFamily d = family;
            d.k = row.k;
            if (d.kind == "single-harmonic") d.l = 0;
            const SpectralField f = rescale(generate(d, spec.n, seed), row.lambda);
            row.res = ratio(spec, f, opt);
        } catch (const Error& e) {
            row.error = e.what();
        }
    };
    // rows are written in place, so the order does not depend on scheduling
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < rep.rows.size(); i = next++) run(rep.rows[i]);
    };
    const int nt = std::max(1, std::min<int>(jobs, (int)rep.rows.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& row : rep.rows)
        if (row.error.empty()) rep.sup_ratio = std::max(rep.sup_ratio, row.res.ratio);
    rep.slope_k = grouped_slope(rep.rows, true);
    rep.slope_lambda = grouped_slope(rep.rows, false);
    return rep;
}

std::string sweep_csv(const SweepReport& rep)
{
    std::ostringstream out;
    out.precision(12);
    auto ex = [](double v) { return std::isinf(v) ? std::string("inf") : (std::ostringstream() << v).str(); };
    out << "family,n,a,q,r,alpha,b,s,lambda,k,lhs,rhs,ratio,tail_err\n";
    for (const auto& row : rep.rows) {
        out << rep.spec.family << ',' << rep.spec.n << ',' << rep.spec.a << ',' << ex(rep.spec.q) << ',' << ex(rep.spec.r)
            << ',' << rep.spec.alpha << ',' << rep.exps.b << ',' << rep.exps.s << ',' << row.lambda << ',' << row.k << ',';
        if (!row.error.empty()) {
            out << "nan,nan,nan,nan\n";
            continue;
        }
        out << row.res.lhs << ',' << row.res.rhs << ',' << ex(row.res.ratio) << ',' << ex(row.res.tail) << '\n';
    }
    return out.str();
}

SharpnessResult sharpness_probe(const EstimateSpec& spec, const DataFamily& family, const std::string& axis,
                                const std::vector<double>& values, std::uint64_t seed, const RatioOptions& opt_in)
{
    const std::string fam = canonical_family(spec.family);
    if (axis != "h" && axis != "lambda" && axis != "T") throw ConfigError("sharpness: axis must be h, lambda or T");
    // the T axis probes the time budget of localized estimates, which are admissible by construction
    if (axis == "T") {
        if (!localized(fam, spec)) throw ConfigError("sharpness: T axis needs a localized family");
    } else if (admissible(spec).ok) {
        throw DomainError("sharpness: spec is admissible; the probe needs a violated condition");
    }
    SharpnessResult out;
    out.axis = axis;
    out.values = values;
    RatioOptions opt = opt_in;
    opt.sharpness = true;
    for (double v : values) {
        EstimateSpec s = spec;
        DataFamily d = family;
        SpectralField f;
        if (axis == "h") {
            d.kind = "concentration";
            d.h = v;
            if (opt.fixed_scale <= 0) opt.fixed_scale = 1;
            if (opt.window <= 0) opt.window = 8;
            f = generate(d, spec.n, seed);
        } else if (axis == "lambda") {
            f = rescale(generate(d, spec.n, seed), v);
        } else {
            s.T = v;
            f = generate(d, spec.n, seed);
        }
        const RatioResult r = ratio(s, f, opt);
        const double tf = time_factor(s);
        out.ratios.push_back(r.ratio * tf);
        out.normalized.push_back(r.ratio);
    }
    if (!out.ratios.empty()) {
        const auto [lo, hi] = std::minmax_element(out.ratios.begin(), out.ratios.end());
        out.growth = *lo > 0 ? *hi / *lo : kInf;
    }
    return out;
}

namespace {

// g(sigma) and derivatives in sigma = |x|^2, orders 0..4
struct Trial {
    int kind = 0;
    double w = 1, c = 0, gamma = 0;

    void derivs(double s, double* d) const
    {
        if (kind == 0) {
            const double e = std::exp(-s / (w * w)), f = -1 / (w * w);
            double p = 1;
            for (int m = 0; m <= 4; ++m, p *= f) d[m] = p * e;
        } else if (kind == 1) {
            // exp(-u^2), u = (s - c)/w: d^m = (-1/w)^m H_m(u) e^{-u^2}
            const double u = (s - c) / w, e = std::exp(-u * u);
            const double H[5] = {1, 2 * u, 4 * u * u - 2, 8 * u * u * u - 12 * u, 16 * u * u * u * u - 48 * u * u + 12};
            double p = 1;
            for (int m = 0; m <= 4; ++m, p *= -1 / w) d[m] = p * H[m] * e;
        } else {
            // s^{gamma/2} e^{-s/w^2}
            const double g = gamma / 2, f = -1 / (w * w), e = std::exp(-s / (w * w));
            for (int m = 0; m <= 4; ++m) {
                double acc = 0;
                for (int i = 0; i <= m; ++i) {
                    double fall = 1;
                    for (int j = 0; j < i; ++j) fall *= g - j;
                    double binom = 1;
                    for (int j = 0; j < i; ++j) binom = binom * (m - j) / (j + 1);
                    acc += binom * fall * std::pow(s, g - i) * std::pow(f, m - i);
                }
                d[m] = acc * e;
            }
        }
    }
};

// Sorted multi-indices |beta| <= order with their permutation counts; ||d^beta f|| is
// permutation invariant for radial f.
void multi_indices(int n, int order, std::vector<std::pair<std::array<int, 3>, int>>& out)
{
    for (int a = 0; a <= order; ++a)
        for (int b = 0; b <= a && a + b <= order; ++b)
            for (int c = 0; c <= b && a + b + c <= order; ++c) {
                if (n == 2 && c > 0) continue;
                std::array<int, 3> v{c, b, a};
                int perms = 0;
                do {
                    if (n == 3 || v[2] == 0) ++perms;
                } while (std::next_permutation(v.begin(), v.end()));
                out.push_back({{a, b, c}, perms});
            }
}

double factorial(int m)
{
    double f = 1;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

// d^beta g(|x|^2) at x = r omega equals sum_m A_m(omega) r^{|beta|-2m} g^{(|beta|-m)}(r^2)
std::array<double, 3> partial_coeffs(const std::array<int, 3>& beta, const Point3& w)
{
    std::array<double, 3> A{0, 0, 0};
    for (int j0 = 0; 2 * j0 <= beta[0]; ++j0)
        for (int j1 = 0; 2 * j1 <= beta[1]; ++j1)
            for (int j2 = 0; 2 * j2 <= beta[2]; ++j2) {
                const int js[3] = {j0, j1, j2};
                double c = 1;
                for (int i = 0; i < 3; ++i) {
                    c *= factorial(beta[i]) / (factorial(js[i]) * factorial(beta[i] - 2 * js[i]));
                    for (int e = 0; e < beta[i] - 2 * js[i]; ++e) c *= 2 * w[i];
                }
                A[j0 + j1 + j2] += c;
            }
    return A;
}

}  // namespace

HlsResult hls_check(int n, double q, double r, double alpha, int trials, std::uint64_t seed)
{
    if (n != 2 && n != 3) throw ConfigError("hls: n must be 2 or 3");
    if (!(q > 1) || !(q <= r) || std::isinf(r)) throw DomainError("hls: need 1 < q <= r < inf");
    const double qp = q / (q - 1);
    if (!(-n / qp < alpha) || !(alpha < n / r)) throw DomainError("hls: need -n/q' < alpha < n/r");
    if (trials < 1) throw ConfigError("hls: trials must be positive");
    const int order = 2 * (n / 2 + 1);
    std::vector<std::pair<std::array<int, 3>, int>> betas;
    multi_indices(n, order, betas);

    // graded radial panels toward 0 on [0,2]
    std::vector<double> rn, rw;
    const Rule& gl = gauss_legendre(12);
    for (int i = 0; i < 36; ++i) {
        const double b = 2 * std::pow(0.5, i), a = i == 35 ? 0 : b / 2;
        for (size_t m = 0; m < gl.x.size(); ++m) {
            rn.push_back(a + (b - a) * 0.5 * (gl.x[m] + 1));
            rw.push_back((b - a) * 0.5 * gl.w[m]);
        }
    }
    const AngularGrid ag = make_angular_grid(n, 24);
    const size_t Nw = ag.nodes.size();
    const double area = sphere_area(n);
    std::vector<std::array<double, 3>> coeffs;
    for (const auto& bp : betas)
        for (const auto& w : ag.nodes) coeffs.push_back(partial_coeffs(bp.first, w));

    CounterRng rng(seed, 0x415);
    HlsResult out;
    for (int t = 0; t < trials; ++t) {
        Trial tr;
        tr.kind = t % 3;
        if (tr.kind == 0) {
            tr.w = rng.uniform(0.4, 0.55);
        } else if (tr.kind == 1) {
            tr.c = rng.uniform(0.1, 0.3);
            tr.w = rng.uniform(0.45, 0.6);
        } else {
            const double gmin = order + alpha - n / q;
            tr.gamma = std::max(gmin, 0.0) + rng.uniform(0.2, 0.8);
            if (std::fabs(tr.gamma / 2 - std::round(tr.gamma / 2)) < 1e-3) tr.gamma += 0.1;
            tr.w = rng.uniform(0.6, 0.75);
        }
        std::vector<double> dv(5 * rn.size());
        for (size_t i = 0; i < rn.size(); ++i) tr.derivs(rn[i] * rn[i], &dv[5 * i]);
        double lhs = 0;
        for (size_t i = 0; i < rn.size(); ++i)
            if (rn[i] <= 1) lhs += rw[i] * std::pow(rn[i], n - 1 - alpha * r) * std::pow(std::fabs(dv[5 * i]), r);
        lhs = std::pow(area * lhs, 1 / r);
        double rhs = 0;
        for (size_t bi = 0; bi < betas.size(); ++bi) {
            const auto& [beta, perms] = betas[bi];
            const int tot = beta[0] + beta[1] + beta[2];
            double acc = 0;
            for (size_t i = 0; i < rn.size(); ++i) {
                double term[3] = {0, 0, 0};
                for (int m = 0; 2 * m <= tot; ++m) term[m] = std::pow(rn[i], tot - 2 * m) * dv[5 * i + tot - m];
                double ang = 0;
                for (size_t w = 0; w < Nw; ++w) {
                    const auto& A = coeffs[bi * Nw + w];
                    const double v = std::fabs(A[0] * term[0] + A[1] * term[1] + A[2] * term[2]);
                    ang += ag.weights[w] * (q == 2 ? v * v : std::pow(v, q));
                }
                acc += rw[i] * std::pow(rn[i], n - 1 - alpha * q) * ang;
            }
            rhs += perms * std::pow(acc, 1 / q);
        }
        out.ratios.push_back(rhs > 0 ? lhs / rhs : 0);
    }
    out.max_ratio = *std::max_element(out.ratios.begin(), out.ratios.end());
    std::vector<double> sorted = out.ratios;
    std::sort(sorted.begin(), sorted.end());
    const size_t m = sorted.size();
    out.median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    return out;
}

}  // namespace dlab
