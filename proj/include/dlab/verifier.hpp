#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dlab/decompose.hpp"
#include "dlab/norms.hpp"

namespace dlab {

// Families: table rows I..VIII, Thm1.1, Thm1.2, Cor1.3, Thm1.4, Thm1.5, Thm1.6, Thm1.7, Thm1.8, KSS.
// Rows map onto theorems: II=Thm1.1, III=Thm1.4 (global), IV=Thm1.2, V=Thm1.4 on [0,T],
// VI=KSS, VII=Thm1.7, VIII=Thm1.6. Row I is the classical estimate.
struct EstimateSpec {
    std::string family = "Thm1.1";
    int n = 3;
    double a = 1;
    double q = 2;
    double r = 2;
    double alpha = 0;
    double mu = 0;
    std::optional<double> b;
    std::optional<double> s;
    std::optional<double> T;
    bool radial = false;
};

std::string to_json(const EstimateSpec& s);
EstimateSpec estimate_spec_from_json(const std::string& text);
EstimateSpec load_estimate_spec(const std::string& path);

// Canonical theorem tag for a family name; ConfigError when unknown.
std::string canonical_family(const std::string& family);

struct Verdict {
    bool ok = true;
    std::vector<std::string> violated;
};

// Exact rational comparison on 1/q, 1/r, alpha, n, a.
Verdict admissible(const EstimateSpec& spec);

struct Exponents {
    double s = 0;
    double b = 0;
    bool inhomogeneous = false;
    double log_q = 0;  // > 0: (ln(2+D))^{1/log_q} on the data side
};

Exponents scaling_exponent(const EstimateSpec& spec);

// Factor folded into the data side for localized families (1 otherwise).
double time_factor(const EstimateSpec& spec);

struct DataFamily {
    std::string kind = "single-harmonic";  // single-harmonic, random-band, fourier-series-radial, gaussian-radial, concentration
    int k = 0;
    int l = 0;          // 0 picks the sectoral harmonic
    int k_max = 6;      // random-band
    double decay = 1;   // random-band and fourier-series-radial coefficient decay (1+k)^{-decay}
    int terms = 6;      // fourier-series-radial
    int single = -1;    // fourier-series-radial: >= 0 sets c_single = 1 and the rest 0
    double h = 1;       // concentration scale
};

std::string to_json(const DataFamily& d);
DataFamily data_family_from_string(const std::string& text);

// Deterministic in (family, n, seed); support in [1/2, 1] except concentration (h).
SpectralField generate(const DataFamily& family, int n, std::uint64_t seed);

struct RatioOptions {
    double window = 0;      // time half-width in units of the data scale; 0 picks per family
    double steps_per_unit = 4;
    bool sharpness = false;  // skip the admissibility precondition and the origin check
    int angular_degree = 0;  // 0 picks 2 K + 16
    double fixed_scale = 0;  // > 0: time/space window in absolute units instead of the data scale
    double r_min = 0;        // inner radius of the radial grid
};

struct RatioResult {
    double lhs = 0, rhs = 0, ratio = 0;
    double tail = 0;        // relative tail estimate of the time norm (global families)
    bool tail_finite = true;
};

RatioResult ratio(const EstimateSpec& spec, const SpectralField& f, const RatioOptions& opt = {});

// Local energy ratios kss_norm / (A_mu(T) ||f||) for several mu from one evolution on [0,T].
std::vector<RatioResult> kss_ratios(const SpectralField& f, double T, const std::vector<double>& mus,
                                    const RatioOptions& opt = {});

struct SweepRow {
    double lambda = 1;
    int k = 0;
    RatioResult res;
    std::string error;  // non-empty when this row failed
};

struct SweepReport {
    EstimateSpec spec;
    Exponents exps;
    DataFamily family;
    std::vector<SweepRow> rows;
    double sup_ratio = 0;
    double slope_k = 0;       // log ratio against log(1+k), per-lambda means removed
    double slope_lambda = 0;  // log ratio against log lambda
};

SweepReport sweep(const EstimateSpec& spec, const DataFamily& family, const std::vector<double>& lambdas,
                  const std::vector<int>& ks, std::uint64_t seed, const RatioOptions& opt = {}, int jobs = 1);

// CSV with header family,n,a,q,r,alpha,b,s,lambda,k,lhs,rhs,ratio,tail_err
std::string sweep_csv(const SweepReport& rep);

struct SharpnessResult {
    std::string axis;
    std::vector<double> values;
    std::vector<double> ratios;
    std::vector<double> normalized;  // ratio divided by the axis budget (T axis: (ln(2+T))^{1/q})
    double growth = 0;               // max ratio / min ratio
};

// axis: "h" (concentration scale), "lambda" (frequency), "T" (time window).
SharpnessResult sharpness_probe(const EstimateSpec& spec, const DataFamily& family, const std::string& axis,
                                const std::vector<double>& values, std::uint64_t seed, const RatioOptions& opt = {});

struct HlsResult {
    std::vector<double> ratios;
    double max_ratio = 0;
    double median = 0;
};

// ||x|^{-alpha} f||_{L^r(B_1)} / sum_{|beta| <= 2m} ||x|^{-alpha} d^beta f||_{L^q(B_2)}, m = floor(n/2) + 1,
// over radial trials (Gaussians, shifted bumps, |x|^gamma profiles).
HlsResult hls_check(int n, double q, double r, double alpha, int trials, std::uint64_t seed = 0);

// Slope of log y against log x by least squares.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dlab
