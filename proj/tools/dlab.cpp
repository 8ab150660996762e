#include <openssl/evp.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlab/errors.hpp"
#include "dlab/norms.hpp"
#include "dlab/propagator.hpp"
#include "dlab/specfun.hpp"
#include "dlab/sphere.hpp"
#include "dlab/strauss.hpp"
#include "dlab/verifier.hpp"

#ifndef DLAB_VERSION
#define DLAB_VERSION "0.0.0"
#endif

using namespace dlab;
using json = nlohmann::ordered_json;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw ResourceError("sha256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

std::string num(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::ostringstream o;
    o.precision(12);
    o << v;
    return o.str();
}

double parse_num(const std::string& s)
{
    const auto caret = s.find('^');
    try {
        if (caret != std::string::npos) return std::pow(std::stod(s.substr(0, caret)), std::stod(s.substr(caret + 1)));
        if (s == "inf") return kInf;
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("bad number '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

// "2^-4..2^4" (integer exponents), "a..b" (integers, optional ":step"), or a comma list
std::vector<double> parse_values(const std::string& s)
{
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        std::vector<double> v;
        for (const auto& t : split(s, ',')) v.push_back(parse_num(t));
        if (v.empty()) throw ConfigError("empty value list");
        return v;
    }
    std::string a = s.substr(0, dots), b = s.substr(dots + 2);
    double step = 1;
    if (const auto c = b.find(':'); c != std::string::npos) {
        step = parse_num(b.substr(c + 1));
        b = b.substr(0, c);
    }
    if (!(step > 0)) throw ConfigError("range step must be positive");
    std::vector<double> v;
    const auto ca = a.find('^'), cb = b.find('^');
    if (ca != std::string::npos && cb != std::string::npos) {
        const double base = parse_num(a.substr(0, ca));
        if (parse_num(b.substr(0, cb)) != base) throw ConfigError("range '" + s + "' mixes bases");
        const double e0 = parse_num(a.substr(ca + 1)), e1 = parse_num(b.substr(cb + 1));
        for (double e = e0; e <= e1 + 1e-9; e += step) v.push_back(std::pow(base, e));
    } else {
        const double x0 = parse_num(a), x1 = parse_num(b);
        for (double x = x0; x <= x1 + 1e-9; x += step) v.push_back(x);
    }
    if (v.empty()) throw ConfigError("empty range '" + s + "'");
    return v;
}

std::vector<int> parse_ints(const std::string& s)
{
    std::vector<int> out;
    for (double v : parse_values(s)) {
        if (v != std::round(v)) throw ConfigError("expected integers in '" + s + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

// "t0:t1:steps"
std::vector<double> parse_grid(const std::string& s, double& lo, double& hi, int& steps)
{
    const auto p = split(s, ':');
    if (p.size() != 3) throw ConfigError("expected 'start:end:steps', got '" + s + "'");
    lo = parse_num(p[0]);
    hi = parse_num(p[1]);
    steps = static_cast<int>(parse_num(p[2]));
    if (steps < 1) throw ConfigError("steps must be positive in '" + s + "'");
    std::vector<double> v;
    for (int i = 0; i <= steps; ++i) v.push_back(lo + (hi - lo) * i / steps);
    return v;
}

struct Run {
    CLI::App* app = nullptr;
    CLI::App* sub = nullptr;
    std::string command;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out;
    std::string manifest_path;
    int jobs = 1;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, std::string>> outputs;  // path, digest

    json config() const
    {
        json c;
        auto dump = [&](const CLI::App* a, json& into) {
            for (const CLI::Option* o : a->get_options()) {
                const std::string name = o->get_single_name();
                if (name.empty() || name == "help") continue;
                if (o->count() > 0) {
                    const auto r = o->reduced_results();
                    into[name] = r.empty() ? std::string("true") : r.back();
                } else if (!o->get_default_str().empty()) {
                    into[name] = o->get_default_str();
                }
            }
        };
        dump(app, c);
        json* at = &c;
        for (const CLI::App* s = sub; s;) {
            json& part = (*at)[s->get_name()] = json::object();
            dump(s, part);
            at = &part;
            const auto subs = s->get_subcommands();
            s = subs.empty() ? nullptr : subs.front();
        }
        return c;
    }

    std::string manifest_ref() const
    {
        if (!manifest_path.empty()) return manifest_path;
        return out.empty() ? std::string("-") : out + ".manifest.json";
    }

    // CSV to --out (or stdout) with the trailing manifest reference
    void emit_csv(std::string csv)
    {
        csv += "#manifest: " + manifest_ref() + "\n";
        if (out.empty()) {
            std::cout << csv;
        } else {
            std::ofstream f(out, std::ios::binary);
            if (!f) throw ConfigError("cannot write '" + out + "'");
            f << csv;
            outputs.emplace_back(out, sha256_hex(csv));
        }
    }

    void write_manifest() const
    {
        json m;
        m["command"] = command;
        m["config"] = config();
        m["seed"] = seed;
        m["version"] = DLAB_VERSION;
        m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json outs = json::object();
        for (const auto& [p, d] : outputs) outs[p] = "sha256:" + d;
        m["outputs"] = outs;
        const std::string ref = manifest_ref();
        if (ref == "-") {
            std::cerr << m.dump() << "\n";
            return;
        }
        std::ofstream f(ref);
        if (!f) throw ConfigError("cannot write manifest '" + ref + "'");
        f << m.dump(2) << "\n";
    }
};

// --------------------------------------------------------------------------

int cmd_bessel(double nu, double y, const std::string& method)
{
    const BesselValue v = bessel_j_eval(nu, y, bessel_method_from_string(method));
    std::cout << std::setprecision(17) << "J_" << nu << "(" << y << ") = " << v.value << "\n";
    std::cout << "method = " << to_string(v.method) << "\n";
    return 0;
}

int cmd_propagate(Run& run, const std::string& data, double a, const std::string& tgrid, const std::string& rgrid)
{
    const SpectralField f = load_field(data);
    double t0, t1, r0, r1;
    int ts, rs;
    const std::vector<double> times = parse_grid(tgrid, t0, t1, ts);
    parse_grid(rgrid, r0, r1, rs);
    const PhysicalField u = evolve(f, times, radial_grid_uniform(f.n, r0, r1, rs + 1), DispersionLaw{a});
    std::ostringstream csv;
    csv.precision(12);
    csv << "t,r,k,l,re,im\n";
    for (size_t ti = 0; ti < u.times.size(); ++ti)
        for (size_t ri = 0; ri < u.radii.r.size(); ++ri)
            for (size_t ch = 0; ch < u.channels.size(); ++ch) {
                const cplx v = u.at(ch, ti, ri);
                csv << u.times[ti] << ',' << u.radii.r[ri] << ',' << u.channels[ch].first << ',' << u.channels[ch].second
                    << ',' << v.real() << ',' << v.imag() << '\n';
            }
    run.emit_csv(csv.str());
    std::cerr << "self_error " << num(u.self_error) << "\n";
    return 0;
}

int cmd_verify(Run& run, const std::string& spec_path, const std::string& family, double lambda, int k, double bound)
{
    const EstimateSpec spec = load_estimate_spec(spec_path);
    DataFamily fam = data_family_from_string(family);
    fam.k = k;
    const Verdict v = admissible(spec);
    if (!v.ok) {
        std::string msg = "spec not admissible:";
        for (const auto& c : v.violated) msg += " [" + c + "]";
        throw DomainError(msg);
    }
    const SweepReport rep = sweep(spec, fam, {lambda}, {k}, run.seed);
    const SweepRow& row = rep.rows.front();
    if (!row.error.empty()) throw DomainError(row.error);
    run.emit_csv(sweep_csv(rep));
    const bool ok = std::isfinite(row.res.ratio) && row.res.ratio <= bound;
    std::cerr << "ratio " << num(row.res.ratio) << (ok ? " within" : " exceeds") << " bound " << num(bound) << "\n";
    return ok ? 0 : 1;
}

int cmd_sweep(Run& run, const std::string& spec_path, const std::string& family, const std::string& lambdas,
              const std::string& ks, double bound, double max_slope)
{
    const EstimateSpec spec = load_estimate_spec(spec_path);
    const DataFamily fam = data_family_from_string(family);
    const SweepReport rep = sweep(spec, fam, parse_values(lambdas), parse_ints(ks), run.seed, {}, run.jobs);
    run.emit_csv(sweep_csv(rep));
    int failed = 0;
    for (const auto& r : rep.rows)
        if (!r.error.empty()) {
            ++failed;
            std::cerr << "row lambda=" << num(r.lambda) << " k=" << r.k << ": " << r.error << "\n";
        }
    std::cerr << "sup_ratio " << num(rep.sup_ratio) << " slope_k " << num(rep.slope_k) << " slope_lambda "
              << num(rep.slope_lambda) << " failed_rows " << failed << "\n";
    const bool ok = failed == 0 && std::isfinite(rep.sup_ratio) && rep.sup_ratio <= bound && rep.slope_k <= max_slope;
    return ok ? 0 : 1;
}

int cmd_sharpness(Run& run, const std::string& spec_path, const std::string& family, const std::string& axis,
                  std::string values)
{
    const EstimateSpec spec = load_estimate_spec(spec_path);
    const DataFamily fam = data_family_from_string(family);
    if (values.empty()) values = axis == "h" ? "2^-5..2^0" : axis == "lambda" ? "2^-4..2^4" : "4,16,64,256";
    const SharpnessResult r = sharpness_probe(spec, fam, axis, parse_values(values), run.seed);
    std::ostringstream csv;
    csv << "axis,value,ratio,normalized\n";
    for (size_t i = 0; i < r.values.size(); ++i)
        csv << axis << ',' << num(r.values[i]) << ',' << num(r.ratios[i]) << ',' << num(r.normalized[i]) << '\n';
    run.emit_csv(csv.str());
    std::cerr << "growth " << num(r.growth) << "\n";
    return 0;
}

int cmd_hls(Run& run, int n, double q, double r, double alpha, int trials)
{
    const HlsResult h = hls_check(n, q, r, alpha, trials, run.seed);
    std::ostringstream csv;
    csv << "trial,ratio\n";
    for (size_t i = 0; i < h.ratios.size(); ++i) csv << i << ',' << num(h.ratios[i]) << '\n';
    run.emit_csv(csv.str());
    const bool ok = std::isfinite(h.max_ratio) && h.max_ratio <= 3 * h.median;
    std::cerr << "max " << num(h.max_ratio) << " median " << num(h.median) << (ok ? "" : " (spread above 3x median)")
              << "\n";
    return ok ? 0 : 1;
}

int cmd_kernel(Run& run, int n, int variant, int k_max, const std::string& radii)
{
    std::ostringstream csv;
    csv << "k,r,norm316\n";
    for (int k = 0; k <= k_max; ++k)
        for (double r : parse_values(radii)) {
            PsiKernelSpec s;
            s.n = n;
            s.variant = variant;
            s.k = k;
            csv << k << ',' << num(r) << ',' << num(psi_bound_norm(s, r).norm) << '\n';
        }
    run.emit_csv(csv.str());
    return 0;
}

int cmd_sobolev(Run& run, int n, double q, int k_max)
{
    std::ostringstream csv;
    csv << "k,ratio\n";
    for (int k = 0; k <= k_max; ++k) csv << k << ',' << num(spectral_cluster_ratio(n, k, q)) << '\n';
    run.emit_csv(csv.str());
    return 0;
}

int cmd_kss(Run& run, int n, const std::string& family, const std::string& data, const std::string& mus,
            const std::string& Ts, double bound)
{
    SpectralField f;
    if (!data.empty()) {
        f = load_field(data);
    } else {
        f = generate(data_family_from_string(family), n, run.seed);
    }
    std::ostringstream csv;
    csv << "mu,T,kss,budget,ratio,raw\n";
    bool ok = true;
    RatioOptions opt;
    opt.steps_per_unit = 0.5;
    const std::vector<double> mu = parse_values(mus);
    for (double T : parse_values(Ts)) {
        const std::vector<RatioResult> res = kss_ratios(f, T, mu, opt);
        for (size_t i = 0; i < mu.size(); ++i) {
            const RatioResult& r = res[i];
            csv << num(mu[i]) << ',' << num(T) << ',' << num(r.lhs) << ',' << num(kss_budget(mu[i], T)) << ','
                << num(r.ratio) << ',' << num(r.ratio * kss_budget(mu[i], T)) << '\n';
            ok = ok && std::isfinite(r.ratio) && r.ratio <= bound;
        }
    }
    run.emit_csv(csv.str());
    return ok ? 0 : 1;
}

int cmd_strauss_exponents(int n, double p)
{
    const CriticalExponents e = exponents(n, p);
    std::cout << std::setprecision(12) << "s_c=" << e.s_c << "\ns_d=" << e.s_d << "\np_c=" << e.p_c
              << "\np_conf=" << e.p_conf << "\nq=" << e.q << "\nbranch=" << e.branch << "\n";
    return 0;
}

int cmd_strauss(Run& run, const StraussConfig& base, const std::string& eps_list)
{
    const std::vector<double> eps = parse_values(eps_list);
    std::vector<LifespanResult> res(eps.size());
    std::vector<std::string> err(eps.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next++; i < eps.size(); i = next++) {
            StraussConfig c = base;
            c.eps = eps[i];
            try {
                res[i] = lifespan(c);
            } catch (const Error& e) {
                err[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::min<int>(run.jobs, (int)eps.size()); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (size_t i = 0; i < eps.size(); ++i)
        if (!err[i].empty()) throw ResourceError(err[i]);

    std::ostringstream csv;
    csv << "eps,T,converged_iters\n";
    std::vector<double> T;
    for (const auto& r : res) {
        csv << num(r.eps) << ',' << num(r.T) << ',' << r.iterations << '\n';
        T.push_back(r.T);
    }
    run.emit_csv(csv.str());
    const CriticalExponents e = exponents(base.n, base.p);
    if (eps.size() >= 2) {
        if (base.p < e.p_c) {
            std::cerr << "slope " << num(log_slope(eps, T)) << " target " << num(1 / (e.s_c - e.s_d)) << "\n";
        } else {
            std::vector<double> x, y, x2;
            for (size_t i = 0; i < eps.size(); ++i) {
                x.push_back(std::pow(eps[i], -(base.p - 1) * (base.p - 1) / 2));
                x2.push_back(std::pow(eps[i], -base.p * (base.p - 1)));
                y.push_back(std::log(T[i]));
            }
            std::cerr << "corr(log T, eps^-(p-1)^2/2) " << num(correlation(x, y)) << " corr(log T, eps^-p(p-1)) "
                      << num(correlation(x2, y)) << "\n";
        }
    }
    return 0;
}

// flags > config file > defaults: config entries are spliced in right after the subcommand
// names so later command-line flags win under the take-last policy.
std::vector<std::string> splice_config(const std::vector<std::string>& args)
{
    std::string path;
    for (size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") path = args[i + 1];
    for (const auto& a : args)
        if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config file '" + path + "' must hold a JSON object");
    std::vector<std::string> extra;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const json& v = it.value();
        if (v.is_boolean()) {
            if (v.get<bool>()) extra.push_back("--" + it.key());
        } else {
            extra.push_back("--" + it.key());
            extra.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
    static const std::set<std::string> globals{"--seed", "--out", "--manifest", "--jobs", "--config"};
    size_t pos = 1;
    while (pos < args.size() && args[pos].rfind("--", 0) == 0) pos += globals.count(args[pos]) ? 2 : 1;
    while (pos < args.size() && args[pos].rfind("-", 0) != 0) ++pos;
    std::vector<std::string> out(args.begin(), args.begin() + pos);
    out.insert(out.end(), extra.begin(), extra.end());
    out.insert(out.end(), args.begin() + pos, args.end());
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    Run run;
    for (const auto& a : args) run.command += (run.command.empty() ? "" : " ") + a;

    CLI::App app{"Dispersive estimate lab"};
    run.app = &app;
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.fallthrough();
    {
        const char* env = std::getenv("DLAB_JOBS");
        run.jobs = env ? std::max(1, std::atoi(env)) : std::max(1u, std::thread::hardware_concurrency());
    }
    app.add_option("--seed", run.seed, "64-bit seed");
    app.add_option("--out", run.out, "output CSV (stdout if empty)");
    app.add_option("--manifest", run.manifest_path, "manifest path (default <out>.manifest.json)");
    app.add_option("--jobs", run.jobs, "parallel workers (DLAB_JOBS or processor count)");
    app.add_option("--config", run.config_path, "JSON config file");

    // specfun
    auto* specfun = app.add_subcommand("specfun", "special functions");
    specfun->require_subcommand(1);
    auto* bessel = specfun->add_subcommand("bessel", "J_nu(y)");
    double nu = 0, y = 1;
    std::string method = "auto";
    bessel->add_option("--nu", nu)->required();
    bessel->add_option("--y", y)->required();
    bessel->add_option("--method", method)->check(CLI::IsMember({"auto", "series", "lommel", "schlafli"}));

    // propagate
    auto* prop = app.add_subcommand("propagate", "evolve a spectral field");
    std::string data, tgrid = "0:1:4", rgrid = "0:10:100";
    double a = 1;
    prop->add_option("--data", data)->required();
    prop->add_option("--a", a);
    prop->add_option("--t", tgrid);
    prop->add_option("--r", rgrid);

    // verify / sweep / sharpness
    std::string spec_path, family = "single-harmonic", lambdas = "2^-4..2^4", ks = "0..32", axis = "h", values;
    double lambda = 1, bound = 100, max_slope = 0.05;
    int k = 0;
    auto* verify = app.add_subcommand("verify", "one estimate ratio");
    verify->add_option("--spec", spec_path)->required();
    verify->add_option("--family", family);
    verify->add_option("--lambda", lambda);
    verify->add_option("--k", k);
    verify->add_option("--bound", bound);
    auto* sw = app.add_subcommand("sweep", "ratio sweep over lambda and k");
    sw->add_option("--spec", spec_path)->required();
    sw->add_option("--family", family);
    sw->add_option("--lambda", lambdas);
    sw->add_option("--k", ks);
    sw->add_option("--bound", bound);
    sw->add_option("--max-slope", max_slope);
    auto* sharp = app.add_subcommand("sharpness", "ratio growth along a violated axis");
    sharp->add_option("--spec", spec_path)->required();
    sharp->add_option("--family", family);
    sharp->add_option("--axis", axis)->check(CLI::IsMember({"h", "lambda", "T"}));
    sharp->add_option("--values", values);

    // hls
    int n = 3, trials = 20;
    double q = 2, r = 4, alpha = 0.5;
    auto* hls = app.add_subcommand("hls", "localized weighted HLS trials");
    hls->add_option("--n", n);
    hls->add_option("--q", q);
    hls->add_option("--r", r);
    hls->add_option("--alpha", alpha);
    hls->add_option("--trials", trials);

    // kernel-check / sobolev-check / kss
    int variant = 1, k_max = 20;
    std::string radii = "0.5,1,2,4";
    auto* kern = app.add_subcommand("kernel-check", "psi kernel bound norms");
    kern->add_option("--n", n);
    kern->add_option("--variant", variant)->check(CLI::Range(1, 3));
    kern->add_option("--k-max", k_max);
    kern->add_option("--radii", radii);
    auto* sob = app.add_subcommand("sobolev-check", "spectral cluster ratios");
    sob->add_option("--n", n);
    sob->add_option("--q", q);
    sob->add_option("--k-max", k_max);
    std::string mus = "0,0.25,0.5,1", Ts = "4,16,64,256,1024", kss_family = "gaussian-radial";
    auto* kss = app.add_subcommand("kss", "local energy budgets");
    kss->add_option("--n", n);
    kss->add_option("--family", kss_family);
    kss->add_option("--data", data);
    kss->add_option("--mu", mus);
    kss->add_option("--T", Ts);
    kss->add_option("--bound", bound);

    // strauss
    StraussConfig sc;
    std::string eps = "0.2,0.1,0.05,0.025";
    auto* st = app.add_subcommand("strauss", "semilinear lifespans");
    st->add_option("--n", sc.n);
    st->add_option("--p", sc.p);
    st->add_option("--eps", eps);
    st->add_option("--amplitude", sc.amplitude);
    st->add_option("--width", sc.width);
    st->add_option("--resolution", sc.resolution);
    st->add_option("--max-iter", sc.max_iter);
    st->add_option("--tol", sc.tol);
    auto* stx = st->add_subcommand("exponents", "critical exponents");
    int xn = 3;
    double xp = 2.2;
    stx->add_option("--n", xn);
    stx->add_option("--p", xp);

    try {
        args = splice_config(args);
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        if (app.get_subcommands().empty()) std::cerr << app.help();
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    }

    run.sub = app.get_subcommands().front();
    int code = 0;
    try {
        if (bessel->parsed()) code = cmd_bessel(nu, y, method);
        else if (prop->parsed()) code = cmd_propagate(run, data, a, tgrid, rgrid);
        else if (verify->parsed()) code = cmd_verify(run, spec_path, family, lambda, k, bound);
        else if (sw->parsed()) code = cmd_sweep(run, spec_path, family, lambdas, ks, bound, max_slope);
        else if (sharp->parsed()) code = cmd_sharpness(run, spec_path, family, axis, values);
        else if (hls->parsed()) code = cmd_hls(run, n, q, r, alpha, trials);
        else if (kern->parsed()) code = cmd_kernel(run, n, variant, k_max, radii);
        else if (sob->parsed()) code = cmd_sobolev(run, n, q, k_max);
        else if (kss->parsed()) code = cmd_kss(run, n, kss_family, data, mus, Ts, bound);
        else if (stx->parsed()) code = cmd_strauss_exponents(xn, xp);
        else if (st->parsed()) code = cmd_strauss(run, sc, eps);
        run.write_manifest();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return code;
}
