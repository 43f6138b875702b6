#include "khdns/basis1d.hpp"

#include <cmath>
#include <stdexcept>

namespace khdns {

Rule1D gauss_rule(int npts)
{
    if (npts < 1 || npts > 64)
        throw std::invalid_argument("gauss_rule: point count out of range");

    Rule1D rule;
    rule.x.resize(npts);
    rule.w.resize(npts);

    const long double pi = 3.14159265358979323846264338327950288L;
    for (int i = 0; i < (npts + 1) / 2; ++i) {
        // Newton iteration on the Legendre polynomial of degree npts.
        long double xi = std::cos(pi * (static_cast<long double>(i) + 0.75L) /
                                  (static_cast<long double>(npts) + 0.5L));
        long double p0 = 0.0L, p1 = 0.0L;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0L;
            p1 = xi;
            for (int j = 2; j <= npts; ++j) {
                const long double p2 =
                    ((2.0L * j - 1.0L) * xi * p1 - (j - 1.0L) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const long double dp = npts * (xi * p1 - p0) / (xi * xi - 1.0L);
            const long double dx = p1 / dp;
            xi -= dx;
            if (std::abs(dx) < 1e-19L)
                break;
        }
        // Recompute derivative at the converged node for the weight.
        p0 = 1.0L;
        p1 = xi;
        for (int j = 2; j <= npts; ++j) {
            const long double p2 =
                ((2.0L * j - 1.0L) * xi * p1 - (j - 1.0L) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const long double dp = npts * (xi * p1 - p0) / (xi * xi - 1.0L);
        const long double w = 2.0L / ((1.0L - xi * xi) * dp * dp);

        // Map from [-1,1] to [0,1]; nodes come out in decreasing xi order.
        rule.x[i] = static_cast<double>((1.0L - xi) / 2.0L);
        rule.w[i] = static_cast<double>(w / 2.0L);
        rule.x[npts - 1 - i] = static_cast<double>((1.0L + xi) / 2.0L);
        rule.w[npts - 1 - i] = rule.w[i];
    }
    return rule;
}

int points_for_order(int order)
{
    if (order < 0)
        throw std::invalid_argument("points_for_order: negative order");
    return order / 2 + 1;
}

void legendre_eval(double x, int kmax, double* val, double* der)
{
    const double xi = 2.0 * x - 1.0;
    // Unnormalized Legendre values and derivatives w.r.t. xi.
    double l0 = 1.0, l1 = xi;
    double d0 = 0.0, d1 = 1.0;
    for (int j = 0; j <= kmax; ++j) {
        double lj, dj;
        if (j == 0) {
            lj = l0;
            dj = d0;
        } else if (j == 1) {
            lj = l1;
            dj = d1;
        } else {
            lj = ((2.0 * j - 1.0) * xi * l1 - (j - 1.0) * l0) / j;
            dj = ((2.0 * j - 1.0) * (l1 + xi * d1) - (j - 1.0) * d0) / j;
            l0 = l1;
            l1 = lj;
            d0 = d1;
            d1 = dj;
        }
        const double nrm = std::sqrt(2.0 * j + 1.0);
        val[j] = nrm * lj;
        if (der)
            der[j] = 2.0 * nrm * dj; // chain rule: dxi/dx = 2
    }
}

void legendre_eval2(double x, int kmax, double* val, double* der,
                    double* der2)
{
    const double xi = 2.0 * x - 1.0;
    double l0 = 1.0, l1 = xi;
    double d0 = 0.0, d1 = 1.0;
    double s0 = 0.0, s1 = 0.0; // second derivatives w.r.t. xi
    for (int j = 0; j <= kmax; ++j) {
        double lj, dj, sj;
        if (j == 0) {
            lj = l0;
            dj = d0;
            sj = s0;
        } else if (j == 1) {
            lj = l1;
            dj = d1;
            sj = s1;
        } else {
            lj = ((2.0 * j - 1.0) * xi * l1 - (j - 1.0) * l0) / j;
            dj = ((2.0 * j - 1.0) * (l1 + xi * d1) - (j - 1.0) * d0) / j;
            sj = ((2.0 * j - 1.0) * (2.0 * d1 + xi * s1) - (j - 1.0) * s0) / j;
            l0 = l1;
            l1 = lj;
            d0 = d1;
            d1 = dj;
            s0 = s1;
            s1 = sj;
        }
        const double nrm = std::sqrt(2.0 * j + 1.0);
        val[j] = nrm * lj;
        der[j] = 2.0 * nrm * dj;
        der2[j] = 4.0 * nrm * sj;
    }
}

void bubble_eval(double x, int k, double* val, double* der)
{
    if (k <= 0)
        return;
    const double xi = 2.0 * x - 1.0;
    // Need unnormalized Legendre up to degree k+1.
    std::vector<double> l(k + 2);
    l[0] = 1.0;
    if (k + 1 >= 1)
        l[1] = xi;
    for (int j = 2; j <= k + 1; ++j)
        l[j] = ((2.0 * j - 1.0) * xi * l[j - 1] - (j - 1.0) * l[j - 2]) / j;
    for (int m = 1; m <= k; ++m) {
        const double nrm = std::sqrt(2.0 * m + 1.0);
        val[m - 1] = nrm * (l[m + 1] - l[m - 1]) / (2.0 * (2.0 * m + 1.0));
        if (der)
            der[m - 1] = nrm * l[m]; // b_m' = P~_m by construction
    }
}

} // namespace khdns
