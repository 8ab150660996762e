#pragma once

#include <string>
#include <vector>

#include "dlab/sphere.hpp"

namespace dlab {

// phi = 1 on [0,1], 0 on [2,inf), smooth in between.
double bump_phi(double x);
// psi_j(rho) = phi(rho / 2^j) - phi(rho / 2^{j-1}), supported in [2^{j-1}, 2^{j+1}].
double lp_piece(int j, double rho);
// eta = 1 on [1/2,1], supp in [1/4,2].
double bump_eta(double x);

// Values of c(rho) at composite Gauss-Legendre nodes over [lo, hi].
struct RadialProfile {
    double lo = 0.5, hi = 1.0;
    int panels = 8;
    int order = 12;
    std::vector<cplx> c;

    int size() const { return panels * order; }
    double node(int i) const;
    double weight(int i) const;
    std::vector<double> nodes() const;
    std::vector<double> weights() const;
    // Lagrange interpolation on the owning panel; zero outside [lo, hi].
    cplx operator()(double rho) const;
};

template <class F>
RadialProfile make_profile(double lo, double hi, int panels, int order, F&& f)
{
    RadialProfile p;
    p.lo = lo;
    p.hi = hi;
    p.panels = panels;
    p.order = order;
    p.c.resize(p.size());
    for (int i = 0; i < p.size(); ++i) p.c[i] = f(p.node(i));
    return p;
}

struct Block {
    int j = 0;
    int k = 0;
    int l = 1;
    RadialProfile prof;
};

struct SpectralField {
    int n = 3;
    std::vector<Block> blocks;

    int max_k() const;
    bool radial() const;
};

SpectralField lp_project(const SpectralField& f, int j);

// Weight options shared by the data norms.
struct NormWeight {
    double s = 0;
    double b = 0;               // angular Lambda_omega^b
    bool inhomogeneous = false; // rho^s -> (1+rho^2)^{s/2}
    double log_q = 0;           // > 0: extra factor (ln(2+rho))^{1/log_q}
};

double weighted_norm(const SpectralField& f, const NormWeight& w);
double l2_norm(const SpectralField& f);
double sobolev_norm(const SpectralField& f, double s, bool inhomogeneous = false);
double besov_norm(const SpectralField& f, double s, double q_outer);
double hsb_norm(const SpectralField& f, double s, double b, bool inhomogeneous = false);

// f_lambda(x) = f(lambda x)
SpectralField rescale(const SpectralField& f, double lambda);
SpectralField scale(const SpectralField& f, cplx a);
SpectralField add(const SpectralField& a, const SpectralField& b);

std::string to_json(const SpectralField& f);
SpectralField from_json(const std::string& text);
SpectralField load_field(const std::string& path);
void save_field(const SpectralField& f, const std::string& path);

}  // namespace dlab
