#pragma once

#include <vector>

namespace khdns {

/// Gauss-Legendre quadrature rule on the reference interval [0,1].
struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;

    int size() const { return static_cast<int>(x.size()); }
};

/// Rule with `npts` points; exact for polynomials of degree 2*npts-1.
Rule1D gauss_rule(int npts);

/// Smallest point count whose Gauss rule integrates degree `order` exactly.
int points_for_order(int order);

/// Orthonormal shifted Legendre polynomials on [0,1]:
/// P~_j(x) = sqrt(2j+1) * L_j(2x-1), so that integral of P~_i * P~_j over
/// [0,1] equals delta_ij.  Fills val[0..kmax] and, if der != nullptr,
/// der[0..kmax] with d/dx values.
void legendre_eval(double x, int kmax, double* val, double* der = nullptr);

/// As legendre_eval, also filling second derivatives.
void legendre_eval2(double x, int kmax, double* val, double* der,
                    double* der2);

/// Integrated-Legendre bubbles b_m(x) = integral of P~_m from 0 to x,
/// m = 1..k.  They vanish at both endpoints and satisfy b_m' = P~_m.
/// Fills val[0..k-1] (entry m-1 holds b_m); der likewise if non-null.
void bubble_eval(double x, int k, double* val, double* der = nullptr);

} // namespace khdns
