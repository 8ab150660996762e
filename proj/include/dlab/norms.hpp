#pragma once

#include <optional>
#include <string>

#include "dlab/propagator.hpp"
#include "dlab/sphere.hpp"

namespace dlab {

enum class Structure { factorized, full };

struct NormSpec {
    double alpha = 0;         // weight |x|^{-alpha}, or <x>^{-alpha} with bracket
    bool bracket = false;
    double q = 2;             // time exponent, may be infinity
    double r = 2;             // radial (or full spatial) exponent, may be infinity
    double angular = 2;       // 2 or infinity
    Structure structure = Structure::factorized;
    std::optional<double> T;  // interval [0,T]; empty means the whole (truncated global) time grid
    bool origin_check = true; // reject |x|^{-alpha} weights that are not integrable at 0
};

std::string to_json(const NormSpec& s);
NormSpec norm_spec_from_json(const std::string& text);

struct NormResult {
    double value = 0;  // over the sampled time window
    double tail = 0;   // fitted relative correction for |t| beyond the window (global domain only)
    bool tail_finite = true;
};

// Innermost to outermost: angular, radial (r^{n-1} dr, weight), time (trapezoid, max for infinity).
NormResult mixed_norm(const PhysicalField& u, const NormSpec& spec, const AngularGrid* grid = nullptr);

// Per-time values of the spatial norm, the integrand of the time quadrature.
std::vector<double> spatial_norms(const PhysicalField& u, const NormSpec& spec, const AngularGrid* grid = nullptr);

struct CubePartition {
    int n = 3;
    int samples = 4;       // per cube axis
    double radius = 32;    // sampled ball
};

// l^p over unit cubes of L^q(Q), snapshot at time index ti.
double cube_norm(const PhysicalField& u, size_t ti, double p_outer, double q_inner, const CubePartition& part);

// ||Y_{k,l}||_{L^p(S^{n-1})}, cached.
double harmonic_lp_norm(int n, int k, int l, double p);

// ||<x>^{-mu} u||_{L^2([0,T]) L^2_x}
double kss_norm(const PhysicalField& u, double mu, double T);
double kss_budget(double mu, double T);

}  // namespace dlab
