#include "dlab/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "dlab/errors.hpp"
#include "dlab/quadrature.hpp"

namespace dlab {

namespace {

double h_exp(double t) { return t > 0 ? std::exp(-1 / t) : 0.0; }

// barycentric weights for Gauss-Legendre nodes
const std::vector<double>& bary_weights(int order)
{
    static std::map<int, std::vector<double>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    const Rule& g = gauss_legendre(order);
    std::vector<double> w(order);
    for (int i = 0; i < order; ++i) w[i] = (i % 2 ? -1.0 : 1.0) * std::sqrt((1 - g.x[i] * g.x[i]) * g.w[i]);
    return cache.emplace(order, std::move(w)).first->second;
}

using Key = std::pair<int, int>;

// blocks grouped by (k,l)
std::map<Key, std::vector<const Block*>> channels(const SpectralField& f)
{
    std::map<Key, std::vector<const Block*>> m;
    for (const Block& b : f.blocks) m[{b.k, b.l}].push_back(&b);
    return m;
}

// int |sum_b c_b(rho)|^2 W(rho) d rho over one channel
template <class W>
double channel_integral(const std::vector<const Block*>& bs, W&& weight)
{
    if (bs.size() == 1) {
        const RadialProfile& p = bs[0]->prof;
        double acc = 0;
        for (int i = 0; i < p.size(); ++i) acc += p.weight(i) * std::norm(p.c[i]) * weight(p.node(i));
        return acc;
    }
    double lo = 1e300, hi = -1e300, width = 1e300;
    int order = 0;
    for (const Block* b : bs) {
        lo = std::min(lo, b->prof.lo);
        hi = std::max(hi, b->prof.hi);
        width = std::min(width, (b->prof.hi - b->prof.lo) / b->prof.panels);
        order = std::max(order, b->prof.order);
    }
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    // align panel edges with block supports by integrating piecewise over breakpoints
    std::vector<double> cuts{lo, hi};
    for (const Block* b : bs) {
        cuts.push_back(b->prof.lo);
        cuts.push_back(b->prof.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const Rule& g = gauss_legendre(order + 4);
    double acc = 0;
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        const int np = std::max(1, static_cast<int>(std::ceil(panels * (b - a) / (hi - lo))));
        const double h = (b - a) / np;
        for (int p = 0; p < np; ++p)
            for (size_t i = 0; i < g.x.size(); ++i) {
                const double rho = a + (p + 0.5 + 0.5 * g.x[i]) * h;
                cplx v = 0;
                for (const Block* bl : bs) v += bl->prof(rho);
                acc += 0.5 * h * g.w[i] * std::norm(v) * weight(rho);
            }
    }
    return acc;
}

}  // namespace

double bump_phi(double x)
{
    x = std::fabs(x);
    if (x <= 1) return 1;
    if (x >= 2) return 0;
    const double a = h_exp(2 - x), b = h_exp(x - 1);
    return a / (a + b);
}

double lp_piece(int j, double rho) { return bump_phi(rho / std::ldexp(1.0, j)) - bump_phi(rho / std::ldexp(1.0, j - 1)); }

double bump_eta(double x)
{
    if (x <= 0.25 || x >= 2) return 0;
    if (x >= 0.5 && x <= 1) return 1;
    if (x < 0.5) {
        const double a = h_exp(4 * (x - 0.25)), b = h_exp(4 * (0.5 - x));
        return a / (a + b);
    }
    return bump_phi(x);
}

double RadialProfile::node(int i) const
{
    const Rule& g = gauss_legendre(order);
    const double h = (hi - lo) / panels;
    return lo + (i / order + 0.5 + 0.5 * g.x[i % order]) * h;
}

double RadialProfile::weight(int i) const
{
    const Rule& g = gauss_legendre(order);
    return 0.5 * (hi - lo) / panels * g.w[i % order];
}

std::vector<double> RadialProfile::nodes() const
{
    std::vector<double> v(size());
    for (int i = 0; i < size(); ++i) v[i] = node(i);
    return v;
}

std::vector<double> RadialProfile::weights() const
{
    std::vector<double> v(size());
    for (int i = 0; i < size(); ++i) v[i] = weight(i);
    return v;
}

cplx RadialProfile::operator()(double rho) const
{
    if (rho < lo || rho > hi) return 0;
    const double h = (hi - lo) / panels;
    int p = std::min(panels - 1, static_cast<int>((rho - lo) / h));
    const double x = (rho - lo) / h - p;  // [0,1]
    const double t = 2 * x - 1;
    const Rule& g = gauss_legendre(order);
    const std::vector<double>& bw = bary_weights(order);
    cplx num = 0;
    double den = 0;
    for (int i = 0; i < order; ++i) {
        const double d = t - g.x[i];
        if (d == 0) return c[p * order + i];
        const double q = bw[i] / d;
        num += q * c[p * order + i];
        den += q;
    }
    return num / den;
}

int SpectralField::max_k() const
{
    int k = 0;
    for (const Block& b : blocks) k = std::max(k, b.k);
    return k;
}

bool SpectralField::radial() const
{
    for (const Block& b : blocks)
        if (b.k != 0) return false;
    return true;
}

SpectralField lp_project(const SpectralField& f, int j)
{
    SpectralField out;
    out.n = f.n;
    const double lo = std::ldexp(1.0, j - 1), hi = std::ldexp(1.0, j + 1);
    for (const Block& b : f.blocks) {
        if (b.prof.hi <= lo || b.prof.lo >= hi) continue;
        Block nb = b;
        nb.j = j;
        for (int i = 0; i < nb.prof.size(); ++i) nb.prof.c[i] *= lp_piece(j, nb.prof.node(i));
        out.blocks.push_back(std::move(nb));
    }
    return out;
}

double weighted_norm(const SpectralField& f, const NormWeight& w)
{
    double total = 0;
    for (const auto& [key, bs] : channels(f)) {
        const double ang = w.b == 0 ? 1.0 : std::pow(lambda_omega_eigen(f.n, key.first), w.b);
        for (const Block* b : bs)
            if (b->prof.lo <= 0 && w.s < -0.5 * f.n)
                throw DivergenceError("norm: low-frequency contribution diverges for s=" + std::to_string(w.s));
        total += ang * channel_integral(bs, [&](double rho) {
            double v = w.inhomogeneous ? std::pow(1 + rho * rho, w.s) : std::pow(rho, 2 * w.s);
            if (w.log_q > 0) v *= std::pow(std::log(2 + rho), 2 / w.log_q);
            return v;
        });
    }
    return std::sqrt(total);
}

double l2_norm(const SpectralField& f) { return weighted_norm(f, {}); }

double sobolev_norm(const SpectralField& f, double s, bool inhomogeneous)
{
    NormWeight w;
    w.s = s;
    w.inhomogeneous = inhomogeneous;
    return weighted_norm(f, w);
}

double hsb_norm(const SpectralField& f, double s, double b, bool inhomogeneous)
{
    NormWeight w;
    w.s = s;
    w.b = b;
    w.inhomogeneous = inhomogeneous;
    return weighted_norm(f, w);
}

double besov_norm(const SpectralField& f, double s, double q_outer)
{
    if (f.blocks.empty()) return 0;
    double lo = 1e300, hi = 0;
    for (const Block& b : f.blocks) {
        lo = std::min(lo, b.prof.lo);
        hi = std::max(hi, b.prof.hi);
    }
    const int j0 = static_cast<int>(std::floor(std::log2(std::max(lo, 1e-300)))) - 1;
    const int j1 = static_cast<int>(std::ceil(std::log2(hi))) + 1;
    double acc = 0, mx = 0;
    for (int j = j0; j <= j1; ++j) {
        const double v = std::pow(2.0, j * s) * l2_norm(lp_project(f, j));
        if (std::isinf(q_outer)) {
            mx = std::max(mx, v);
        } else {
            acc += std::pow(v, q_outer);
        }
    }
    return std::isinf(q_outer) ? mx : std::pow(acc, 1 / q_outer);
}

SpectralField rescale(const SpectralField& f, double lambda)
{
    if (!(lambda > 0)) throw DomainError("rescale: lambda must be positive");
    SpectralField out = f;
    const double amp = std::pow(lambda, -0.5 * (f.n + 1));
    const int dj = static_cast<int>(std::lround(std::log2(lambda)));
    for (Block& b : out.blocks) {
        b.prof.lo *= lambda;
        b.prof.hi *= lambda;
        for (cplx& v : b.prof.c) v *= amp;
        b.j += dj;
    }
    return out;
}

SpectralField scale(const SpectralField& f, cplx a)
{
    SpectralField out = f;
    for (Block& b : out.blocks)
        for (cplx& v : b.prof.c) v *= a;
    return out;
}

SpectralField add(const SpectralField& a, const SpectralField& b)
{
    if (a.blocks.empty()) return b;
    if (b.blocks.empty()) return a;
    if (a.n != b.n) throw DomainError("add: dimension mismatch");
    SpectralField out = a;
    out.blocks.insert(out.blocks.end(), b.blocks.begin(), b.blocks.end());
    return out;
}

std::string to_json(const SpectralField& f)
{
    nlohmann::json j;
    j["n"] = f.n;
    j["blocks"] = nlohmann::json::array();
    for (const Block& b : f.blocks) {
        nlohmann::json jb;
        jb["j"] = b.j;
        jb["k"] = b.k;
        jb["l"] = b.l;
        jb["lo"] = b.prof.lo;
        jb["hi"] = b.prof.hi;
        jb["panels"] = b.prof.panels;
        jb["order"] = b.prof.order;
        std::vector<double> re, im;
        for (const cplx& v : b.prof.c) {
            re.push_back(v.real());
            im.push_back(v.imag());
        }
        jb["rho"] = b.prof.nodes();
        jb["re"] = re;
        jb["im"] = im;
        j["blocks"].push_back(jb);
    }
    return j.dump();
}

SpectralField from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("field JSON: ") + e.what());
    }
    SpectralField f;
    try {
        f.n = j.at("n").get<int>();
        for (const auto& jb : j.at("blocks")) {
            Block b;
            b.j = jb.at("j").get<int>();
            b.k = jb.at("k").get<int>();
            b.l = jb.at("l").get<int>();
            const auto rho = jb.at("rho").get<std::vector<double>>();
            const auto re = jb.at("re").get<std::vector<double>>();
            const auto im = jb.at("im").get<std::vector<double>>();
            if (rho.size() != re.size() || re.size() != im.size() || rho.empty())
                throw ConfigError("field JSON: rho/re/im length mismatch");
            if (jb.contains("panels") && jb.contains("order")) {
                b.prof.lo = jb.at("lo").get<double>();
                b.prof.hi = jb.at("hi").get<double>();
                b.prof.panels = jb.at("panels").get<int>();
                b.prof.order = jb.at("order").get<int>();
                if (static_cast<size_t>(b.prof.size()) != rho.size())
                    throw ConfigError("field JSON: panel layout does not match sample count");
                b.prof.c.resize(rho.size());
                for (size_t i = 0; i < rho.size(); ++i) b.prof.c[i] = cplx(re[i], im[i]);
            } else {
                // arbitrary samples: linear interpolation onto panels over [rho_0, rho_last]
                for (size_t i = 1; i < rho.size(); ++i)
                    if (!(rho[i] > rho[i - 1])) throw ConfigError("field JSON: rho must be strictly increasing");
                auto lin = [&](double x) {
                    auto it = std::upper_bound(rho.begin(), rho.end(), x);
                    size_t i = std::clamp<size_t>(it - rho.begin(), 1, rho.size() - 1);
                    const double t = (x - rho[i - 1]) / (rho[i] - rho[i - 1]);
                    return cplx(re[i - 1] + t * (re[i] - re[i - 1]), im[i - 1] + t * (im[i] - im[i - 1]));
                };
                b.prof = make_profile(rho.front(), rho.back(), std::max<int>(8, rho.size() / 4), 12, lin);
            }
            f.blocks.push_back(std::move(b));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("field JSON: ") + e.what());
    }
    return f;
}

SpectralField load_field(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void save_field(const SpectralField& f, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write field file '" + path + "'");
    out << to_json(f);
}

}  // namespace dlab
