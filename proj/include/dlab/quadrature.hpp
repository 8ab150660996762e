#pragma once

#include <functional>
#include <vector>

namespace dlab {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre on [-1,1]. Cached per n.
const Rule& gauss_legendre(int n);

// Gauss-Jacobi for weight (1-x)^alpha (1+x)^beta on [-1,1], alpha,beta > -1.
// Nodes are refined in long double; the long double copy is kept for callers
// that need more than double accuracy in the abscissae.
struct RuleL {
    std::vector<long double> x;
    std::vector<long double> w;
};
RuleL gauss_jacobi(int n, long double alpha, long double beta);

// Generalized Gauss-Laguerre for weight x^alpha e^{-x} on [0,inf).
RuleL gauss_laguerre(int n, long double alpha);

// Composite Gauss-Legendre of order `order` on `panels` equal panels of [a,b].
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int order = 16);

// Node-doubling driver: doubles the panel count until two successive
// estimates agree to rel*|I| + abs. Throws ConvergenceError past max_panels.
struct AdaptiveResult {
    double value;
    double error;
    int panels;
};
AdaptiveResult integrate_doubling(const std::function<double(double)>& f, double a, double b,
                                  double rel, double abs, int start_panels = 4,
                                  int max_panels = 1 << 14, int order = 16);

// Uniform grid helpers.
std::vector<double> linspace(double a, double b, int n);

// Trapezoid weights on a (possibly nonuniform) increasing grid.
std::vector<double> trapezoid_weights(const std::vector<double>& x);

}  // namespace dlab
