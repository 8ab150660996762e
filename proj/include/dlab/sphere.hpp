#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace dlab {

using cplx = std::complex<double>;
using Point3 = std::array<double, 3>;

// Dimension of degree-k spherical harmonics on S^{n-1}.
std::int64_t dim_harmonic(int n, int k);

// Number of (k,l) channels with k <= K.
std::int64_t channel_count(int n, int K);
// Flat position of (k,l), 1 <= l <= d(k).
std::int64_t channel_index(int n, int k, int l);

double sphere_area(int n);

// Real orthonormal harmonic Y_{k,l}. For n=2 omega = (x,y); n=3 (x,y,z).
// n=2: l=1 cos(k theta), l=2 sin(k theta). n=3: l=1 zonal (m=0), l=2m cos(m phi),
// l=2m+1 sin(m phi).
double sph_harmonic(int n, int k, int l, const Point3& omega);

// All Y_{k,l}, k <= K, in channel order.
void sph_harmonics_all(int n, int K, const Point3& omega, double* out);

struct AngularGrid {
    int n = 3;
    int degree = 0;  // polynomial exactness
    std::vector<Point3> nodes;
    std::vector<double> weights;
    // product structure: n=3 uses (cos theta) x phi; n=2 uses phi only
    std::vector<double> ct, ct_w, phi;
};

// Grid integrating polynomials up to `degree` exactly.
AngularGrid make_angular_grid(int n, int degree);

struct AngularSpectrum {
    int n = 3;
    int K = 0;
    std::vector<cplx> c;  // channel order

    cplx& at(int k, int l) { return c[channel_index(n, k, l)]; }
    cplx at(int k, int l) const { return c[channel_index(n, k, l)]; }
};

AngularSpectrum make_spectrum(int n, int K);

// Y values at every grid node, row-major [node][channel].
std::vector<double> basis_matrix(const AngularGrid& g, int K);

AngularSpectrum analyze_angular(const AngularGrid& g, const std::vector<cplx>& samples, int K);
std::vector<cplx> synthesize_angular(const AngularSpectrum& s, const AngularGrid& g);

double lambda_omega_eigen(int n, int k);  // 1 + k(k+n-2)
AngularSpectrum lambda_omega_pow(const AngularSpectrum& s, double b);

// max_l ||Y_{k,l}||_{L^q} / ((1+k(k+n-2))^{sigma(q)/2} ||Y_{k,l}||_{L^2}),
// sigma(q) = (n-1)(1/2 - 1/q)
double spectral_cluster_ratio(int n, int k, double q);

// Smooth multiplier with support in (1,2) used as beta^2 in S_lambda.
double cluster_bump(double s);

// max over a test family of ||S_lambda f||_inf / ((1+lambda)^{(n-1)/p} ||f||_p)
double lp_bernstein_ratio(int n, int lambda, double p, std::uint64_t seed = 0);

}  // namespace dlab
