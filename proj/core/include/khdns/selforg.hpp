#pragma once

#include "khdns/space.hpp"

#include <array>
#include <cmath>
#include <iosfwd>
#include <vector>

namespace khdns {

/// Which x-factor an eigenmode uses.  The periodic direction is doubly
/// degenerate for k1 >= 1; for k1 = 0 only the cosine branch survives.
enum class XVariant { sine, cosine };

/// Eigenpair of -Laplace on the unit square with the mixed conditions of
/// the flow problem: periodic in x, zero value at the walls.  Separable
/// closed form: (sin|cos)(2 a k1 x) * sin(b k2 y) with domain scales
/// a = b = pi on the unit square, normalized to unit L2 norm.  Modes with
/// k2 = 0 vanish identically (the y-factor must be a sine); they are
/// representable but flagged by is_zero().
struct EigenMode {
    int k1 = 1;
    int k2 = 1;
    XVariant variant = XVariant::sine;
    double a = M_PI;
    double b = M_PI;
    double lambda = 0.0; ///< 4 a^2 k1^2 + b^2 k2^2
    double norm = 0.0;   ///< amplitude giving unit L2 norm (0 for zero modes)

    bool is_zero() const { return norm == 0.0; }

    /// Unit-norm vorticity eigenfunction value.
    double vorticity(double x, double y) const;
    /// Its exact gradient.
    std::array<double, 2> vorticity_grad(double x, double y) const;
};

/// Assembles the mode, computing eigenvalue and normalization.
EigenMode make_eigen_mode(int k1, int k2, XVariant variant = XVariant::sine,
                          double a = M_PI, double b = M_PI);

/// Eigenvalue of -Laplace for the separable mode shape: 4 a^2 k1^2 + b^2 k2^2.
double eigenvalue(int k1, int k2, double a = M_PI, double b = M_PI);

/// Whether identically-zero mode shapes count when ranking eigenvalues.
/// `nonzero_modes_only` gives b^2 (the wall-to-wall shear mode, k = (0,1));
/// `streamwise_first` ranks by the first x-varying index instead and gives
/// 4 a^2, the value quoted in parts of the literature even though that
/// mode's eigenfunction degenerates to zero under the wall condition.
enum class Mu1Convention { nonzero_modes_only, streamwise_first };

/// Smallest eigenvalue under the chosen convention; the default feeds the
/// decay bounds.
double smallest_eigenvalue(double a = M_PI, double b = M_PI,
                           Mu1Convention conv =
                               Mu1Convention::nonzero_modes_only);

/// Exact single-mode Navier-Stokes solution: the mode's vorticity decays
/// as exp(-nu lambda t) while the shape stays fixed (its own transport
/// term vanishes, since the velocity follows the vorticity isolines).
class TaylorVortex {
public:
    TaylorVortex(EigenMode mode, double nu);

    const EigenMode& mode() const { return mode_; }
    double nu() const { return nu_; }

    double vorticity(double x, double y, double t) const;
    /// Velocity from the streamfunction w/lambda, times the decay factor.
    std::array<double, 2> velocity(double x, double y, double t) const;
    /// The t = 0 velocity as a projectable field.
    AnalyticVelocity initial_velocity() const;

    /// Closed-form functionals of the unit-norm mode under decay.
    double kinetic_energy(double t) const;
    double enstrophy(double t) const;
    double palinstrophy(double t) const;

private:
    EigenMode mode_;
    double nu_;
};

/// E/K: bounded below by the smallest eigenvalue, non-increasing in time
/// along solutions, and equal to lambda exactly on a pure mode.
inline double rayleigh_quotient(double K, double E) { return E / K; }

/// P/E: never below the Rayleigh quotient of the same state, with
/// equality exactly on pure modes.
inline double dissipation_quotient(double E, double P) { return P / E; }

/// Sampled (t, K, E, P) series of one run.
struct KETrajectory {
    std::vector<double> t, K, E, P;

    void push_back(double t_, double K_, double E_, double P_);
    int size() const { return static_cast<int>(t.size()); }
    double Q(int i) const { return rayleigh_quotient(K[i], E[i]); }
    double Lam(int i) const { return dissipation_quotient(E[i], P[i]); }
};

/// Per-trajectory verdicts on the viscous decay estimates.
struct DecayBoundReport {
    bool energy_bound_ok = true;  ///< E(t) <= E(0) exp(-2 nu mu1 t) (1+tol)
    bool kinetic_bound_ok = true; ///< same bound for K
    bool quotient_monotone = true; ///< Q non-increasing within tolerance
    int first_energy_violation = -1;
    int first_kinetic_violation = -1;
    int first_quotient_violation = -1;
    double max_energy_excess = 0.0;  ///< max E/bound - 1 over samples
    double max_kinetic_excess = 0.0;
    double max_quotient_growth = 0.0; ///< max relative uptick of Q

    bool all_ok() const
    {
        return energy_bound_ok && kinetic_bound_ok && quotient_monotone;
    }
};

/// Checks the exponential decay bounds and the monotonicity of the
/// Rayleigh quotient on a sampled trajectory.  Samples with K = 0 have no
/// quotient and are skipped by the monotonicity scan (an all-zero
/// trajectory passes vacuously).  `tol` absorbs roundoff and sampling
/// noise, relative to the local bound/quotient.
DecayBoundReport decay_bound_check(const KETrajectory& traj, double nu,
                                   double mu1, double tol = 1e-8);

/// CSV export with columns t,K,E,Q,Lambda (full precision, one row per
/// sample; Q and Lambda empty on samples where they are undefined).
void write_ke_csv(std::ostream& os, const KETrajectory& traj);

} // namespace khdns
