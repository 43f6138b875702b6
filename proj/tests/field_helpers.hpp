#pragma once

#include "khdns/linalg.hpp"
#include "khdns/space.hpp"

#include <cmath>
#include <functional>

namespace khdns::testing {

/// Constrained L2 projection of an analytic velocity: mass-matrix saddle
/// solve against the moment right-hand side.  Returns the velocity
/// coefficients only (pressure multipliers dropped).
inline Vec project_velocity(const VelocitySpace& sp, const AnalyticVelocity& f)
{
    const SaddleSolver solver(assemble_saddle(sp, 1.0, 0.0, 4.0), sp, {});
    const Vec rhs = projection_rhs(sp, f, sp.npts_projection());
    return solver.solve(rhs).head(sp.num_velocity_dofs());
}

/// Coefficients of the divergence-free field u = (f(y), g(x)).  Such fields
/// lie in the space exactly when f and g are polynomials of degree <= k:
/// facet normal moments carry the 1D profiles and the interior corrections
/// cancel between opposite facets.  g must be 1-periodic for a conforming
/// field; nonzero g at the walls leaves nonzero wall dofs, which some tests
/// want and others zero out.
inline VelocityField make_separable(const VelocitySpace& sp,
                                    const std::function<double(double)>& f,
                                    const std::function<double(double)>& g)
{
    VelocityField out(sp);
    const StructuredMesh& mesh = sp.mesh();
    const int n = mesh.n();
    const int k = sp.k();
    const double h = mesh.h();
    const Rule1D r = gauss_rule(k + 14); // plenty for smooth profiles
    std::vector<double> leg(k + 1);
    for (int j = 0; j < n; ++j) {
        std::vector<double> mom(k + 1, 0.0);
        for (int q = 0; q < r.size(); ++q) {
            legendre_eval(r.x[q], k, leg.data());
            const double fv = f((j + r.x[q]) * h);
            for (int m = 0; m <= k; ++m)
                mom[m] += r.w[q] * fv * leg[m];
        }
        for (int i = 0; i < n; ++i) {
            const int fid = j * n + i; // vertical facets of row j
            for (int m = 0; m <= k; ++m)
                out.v[sp.facet_dof(fid, m)] = h * mom[m];
        }
    }
    for (int i = 0; i < n; ++i) {
        std::vector<double> mom(k + 1, 0.0);
        for (int q = 0; q < r.size(); ++q) {
            legendre_eval(r.x[q], k, leg.data());
            const double gv = g((i + r.x[q]) * h);
            for (int m = 0; m <= k; ++m)
                mom[m] += r.w[q] * gv * leg[m];
        }
        for (int j = 0; j <= n; ++j) {
            const int fid = n * n + j * n + i; // horizontal facets, column i
            for (int m = 0; m <= k; ++m)
                out.v[sp.facet_dof(fid, m)] = h * mom[m];
        }
    }
    return out;
}

} // namespace khdns::testing
