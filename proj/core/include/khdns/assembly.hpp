#pragma once

#include "khdns/space.hpp"

#include <Eigen/Sparse>

namespace khdns {

using SpMat = Eigen::SparseMatrix<double>;

/// Velocity mass matrix (num_velocity_dofs square), no wall constraints.
SpMat assemble_mass(const VelocitySpace& sp);

/// Viscous operator: broken gradient volume term plus symmetric interior
/// penalty on the tangential jumps across interior (periodic included)
/// facets, penalty alpha*(k+1)^2/h.  Wall facets contribute nothing: the
/// normal component is constrained strongly and the tangential component is
/// left free (free slip).  No wall constraints applied here.
SpMat assemble_viscous(const VelocitySpace& sp, double alpha);

/// Symmetric saddle system over (velocity, pressure, mean multiplier):
///
///   [ mass_coef*M + visc_coef*A   B^T   0 ] [u]
///   [ B                           0     e ] [p]
///   [ 0                           e^T   0 ] [l]
///
/// Wall-constrained velocity rows/columns are cleared and set to identity.
/// visc_coef == 0 skips the viscous terms entirely (pure projection).
SpMat assemble_saddle(const VelocitySpace& sp, double mass_coef,
                      double visc_coef, double alpha);

/// Right-hand side for the constrained L2 projection of an analytic,
/// divergence-free velocity: momentum rows get (f, phi_i), pressure and
/// multiplier rows zero, wall rows zero.  Size num_system_dofs.
Vec projection_rhs(const VelocitySpace& sp, const AnalyticVelocity& f,
                   int npts1d);

/// Matrix-free convection form: out_i = c(u; u, phi_i) with
///   c(u; u, v) = sum_e (u . grad u, v)_e
///              - sum_F int (u.n) [u].{v}  +  sum_F int 0.5 |u.n| [u].[v]
/// over interior facets F.  The quadrature rule (volume and facet) is fixed
/// at construction; batched element evaluation, no global matrix.
class ConvectionOperator {
public:
    ConvectionOperator(const VelocitySpace& sp, int npts1d);

    /// out is resized to num_velocity_dofs and overwritten.
    void apply(const Vec& v, Vec& out) const;

    int npts1d() const { return npts1d_; }

private:
    const VelocitySpace* sp_;
    int npts1d_;
    // Scratch buffers, sized once (single-threaded use).
    mutable Mat C_, UX_, UY_, G11_, G12_, G21_, G22_, W1_, W2_, R_;
    mutable Mat Co_, Cn_, TO_[2], TN_[2], JX_, JY_, FO_, FN_, RO_, RN_;
};

} // namespace khdns
