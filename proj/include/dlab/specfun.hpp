#pragma once

#include <string>

namespace dlab {

enum class BesselMethod { automatic, series, lommel, schlafli, large_argument };

std::string to_string(BesselMethod m);
BesselMethod bessel_method_from_string(const std::string& s);

struct BesselValue {
    double value;
    BesselMethod method;
};

// J_nu(y) for real nu >= -1/2, y >= 0. Series for y <= max(8, 2 nu), otherwise
// the large-argument route.
double bessel_j(double nu, double y);
BesselValue bessel_j_eval(double nu, double y, BesselMethod method = BesselMethod::automatic);

// Power series in long double. sum_abs receives sum of |terms| when non-null.
double bessel_j_series(double nu, double y, double* sum_abs = nullptr);

// Lommel integral with Gauss-Jacobi nodes, node doubling to tol.
double bessel_j_lommel(double nu, double y, double tol = 1e-13);

// Schlafli integral: periodic trapezoid plus sinh tail.
double bessel_j_schlafli(double nu, double y, double tol = 1e-13);

struct AsymptoticSplit {
    double amplitude1 = 1;  // m1(y)
    double amplitude2 = 0;  // m2(y)
    double phase = 0;       // y - (n-1) pi/4
    bool valid = false;     // y >= 1
    int terms = 0;          // expansion terms used (0 for the integral route)
    bool integral_route = false;
    double truncation_bound = 0;
};

// Large-argument split of J_{(n-2)/2}(y) = sqrt(2/(pi y)) [cos(phase) m1 - sin(phase) m2].
AsymptoticSplit bessel_asymptotic(int n, double y);
double reconstruct(const AsymptoticSplit& s, double y);

double gamma_fn(double x);

}  // namespace dlab
