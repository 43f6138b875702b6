#pragma once

#include "khdns/linalg.hpp"

#include <functional>
#include <memory>

namespace khdns {

/// Second-order IMEX multistep integrator for the incompressible momentum
/// equation: diffusion implicit, convection extrapolated explicitly,
/// incompressibility enforced through the saddle solve each step.
///
/// Steps solve for the increment d = u^{n+1} - u^n:
///
///   n = 0 (implicit Euler startup):
///     (M + dt nu A) d = -dt [ C(u^0) + nu A u^0 ]
///   n >= 1 (BDF2 + explicit two-step extrapolation of convection):
///     (M + 2/3 dt nu A) d = 1/3 M (u^n - u^{n-1})
///                         - dt [ 4/3 C(u^n) - 2/3 C(u^{n-1}) ]
///                         - 2/3 dt nu A u^n
///
/// with B d = 0 and wall dofs pinned.  One convection apply per step; the
/// previous one is cached.  Both system matrices are factorized once.
///
/// The scheme is unforced, so kinetic energy must not grow.  A step that
/// increases it by more than 1% throws (runaway convection extrapolation,
/// i.e. the time step is too large for the current velocity).
class Timestepper {
public:
    struct Options {
        double dt = 0.0;
        double nu = 0.0;
        double sip_alpha = 4.0;
        /// 1D quadrature points for convection; 0 = space default,
        /// which integrates the trilinear form order 3(k+1) exactly.
        int conv_npts1d = 0;
        SaddleSolver::Options solver;
    };

    /// Called at the very start of a step, before the convection term of
    /// the current state is evaluated; may modify the state in place.
    using PreStepHook = std::function<void(long step, Vec& velocity)>;

    Timestepper(const VelocitySpace& sp, Options opt);

    /// Start from a fresh velocity (step counter 0).
    void set_initial(const Vec& velocity);
    /// Resume mid-trajectory; prev is ignored when step == 0.
    void restore(long step, const Vec& prev, const Vec& curr);
    void set_pre_step_hook(PreStepHook hook) { hook_ = std::move(hook); }

    void step();

    long step_count() const { return step_; }
    double time() const { return static_cast<double>(step_) * opt_.dt; }
    const Vec& velocity() const { return u_curr_; }
    const Vec& velocity_prev() const { return u_prev_; }
    /// 1/2 u^T M u of the current state (maintained every step).
    double kinetic_energy() const { return energy_; }
    const VelocitySpace& space() const { return *sp_; }
    const Options& options() const { return opt_; }

    long total_solves() const { return solves_; }
    long total_refine_steps() const { return refines_; }
    double worst_residual() const { return worst_residual_; }

private:
    const SaddleSolver& solver_for_step();

    const VelocitySpace* sp_;
    Options opt_;
    SpMat M_, A_;
    ConvectionOperator conv_;
    std::unique_ptr<SaddleSolver> first_solver_, main_solver_;
    PreStepHook hook_;

    long step_ = 0;
    bool initialized_ = false;
    Vec u_prev_, u_curr_;
    Vec conv_prev_, conv_curr_;
    Vec rhs_;
    double energy_ = 0.0;

    long solves_ = 0;
    long refines_ = 0;
    double worst_residual_ = 0.0;
};

} // namespace khdns
