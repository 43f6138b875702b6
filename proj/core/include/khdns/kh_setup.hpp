#pragma once

#include "khdns/space.hpp"

namespace khdns {

/// Shear layer benchmark configuration on the periodic channel:
/// a tanh mixing layer of thickness delta0 seeded with a small
/// divergence-free perturbation localized at mid-channel.
struct KHParams {
    double delta0 = 1.0 / 28.0; ///< initial vorticity thickness
    double u_inf = 1.0;         ///< free-stream speed
    double cn = 1e-3;           ///< perturbation amplitude
    double Re = 10000.0;        ///< u_inf * delta0 / nu

    /// Keep the cos(20 pi x) component of the perturbation.  When false
    /// only cos(8 pi x) seeds the layer (a common single-mode variant).
    bool second_harmonic = true;

    double nu() const { return u_inf * delta0 / Re; }
    double tbar() const { return delta0 / u_inf; } ///< reference time unit
};

/// Initial velocity:
///   u = ( u_inf tanh((2y-1)/delta0), 0 ) + cn ( d_y psi, -d_x psi ),
///   psi = u_inf exp(-(y-1/2)^2/delta0^2) (cos(8 pi x) [+ cos(20 pi x)]).
/// Divergence free; the wall-normal component is below 1e-80 at the walls.
AnalyticVelocity kh_initial_velocity(const KHParams& p);

/// Curl of the initial velocity (for the vorticity-form solver):
///   w = -u_inf U'(y) - cn (psi_yy + psi_xx).
/// Vanishes at the walls to within sech^2(1/delta0) ~ 2e-24 of the peak.
AnalyticScalar kh_initial_vorticity(const KHParams& p);

/// Closed-form kinetic energy, enstrophy and palinstrophy of the exact
/// initial state (Gaussian integrals extended over the whole line; the
/// truncation at the walls is far below double precision).
struct KHInitialInvariants {
    double kinetic_energy = 0.0;
    double enstrophy = 0.0;
    double palinstrophy = 0.0;
};
KHInitialInvariants kh_initial_invariants(const KHParams& p);

} // namespace khdns
