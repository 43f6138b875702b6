#include "khdns/timestepper.hpp"

#include <sstream>
#include <stdexcept>

namespace khdns {

Timestepper::Timestepper(const VelocitySpace& sp, Options opt)
    : sp_(&sp),
      opt_(opt),
      M_(assemble_mass(sp)),
      A_(assemble_viscous(sp, opt.sip_alpha)),
      conv_(sp, opt.conv_npts1d > 0 ? opt.conv_npts1d : sp.npts_convection())
{
    if (!(opt_.dt > 0.0))
        throw std::invalid_argument("Timestepper: dt must be positive");
    if (opt_.nu < 0.0)
        throw std::invalid_argument("Timestepper: negative viscosity");
    rhs_ = Vec::Zero(sp.num_system_dofs());
}

void Timestepper::set_initial(const Vec& velocity)
{
    if (velocity.size() != sp_->num_velocity_dofs())
        throw std::invalid_argument("Timestepper: state size mismatch");
    u_curr_ = velocity;
    u_prev_ = Vec();
    conv_prev_ = Vec();
    step_ = 0;
    initialized_ = true;
    energy_ = 0.5 * u_curr_.dot(M_ * u_curr_);
}

void Timestepper::restore(long step, const Vec& prev, const Vec& curr)
{
    if (step < 0 || curr.size() != sp_->num_velocity_dofs() ||
        (step > 0 && prev.size() != sp_->num_velocity_dofs()))
        throw std::invalid_argument("Timestepper: bad restore state");
    u_curr_ = curr;
    step_ = step;
    initialized_ = true;
    energy_ = 0.5 * u_curr_.dot(M_ * u_curr_);
    if (step > 0) {
        u_prev_ = prev;
        conv_.apply(u_prev_, conv_prev_);
    } else {
        u_prev_ = Vec();
        conv_prev_ = Vec();
    }
}

const SaddleSolver& Timestepper::solver_for_step()
{
    const double nu_dt = opt_.nu * opt_.dt;
    if (step_ == 0) {
        if (!first_solver_)
            first_solver_ = std::make_unique<SaddleSolver>(
                assemble_saddle(*sp_, 1.0, nu_dt, opt_.sip_alpha), *sp_,
                opt_.solver);
        return *first_solver_;
    }
    if (!main_solver_)
        main_solver_ = std::make_unique<SaddleSolver>(
            assemble_saddle(*sp_, 1.0, 2.0 / 3.0 * nu_dt, opt_.sip_alpha),
            *sp_, opt_.solver);
    return *main_solver_;
}

void Timestepper::step()
{
    if (!initialized_)
        throw std::logic_error("Timestepper: no initial state");
    if (hook_)
        hook_(step_, u_curr_);

    conv_.apply(u_curr_, conv_curr_);

    const double dt = opt_.dt;
    const double nu = opt_.nu;
    const int nvel = sp_->num_velocity_dofs();
    auto mom = rhs_.head(nvel);
    if (step_ == 0) {
        mom = -dt * (conv_curr_ + nu * (A_ * u_curr_));
    } else {
        mom = (1.0 / 3.0) * (M_ * (u_curr_ - u_prev_));
        mom -= dt * ((4.0 / 3.0) * conv_curr_ - (2.0 / 3.0) * conv_prev_);
        mom -= (2.0 / 3.0) * dt * nu * (A_ * u_curr_);
    }
    const auto& fixed = sp_->wall_constrained();
    for (int d = 0; d < nvel; ++d)
        if (fixed[d])
            rhs_[d] = 0.0;

    const SaddleSolver& solver = solver_for_step();
    SolveReport rep;
    const Vec sol = solver.solve(rhs_, &rep);
    ++solves_;
    refines_ += rep.refine_steps;
    worst_residual_ = std::max(worst_residual_, rep.final_residual);

    u_prev_ = u_curr_;
    conv_prev_ = conv_curr_;
    u_curr_ += sol.head(nvel);
    ++step_;
    if (step_ == 1)
        first_solver_.reset(); // used exactly once

    const double enow = 0.5 * u_curr_.dot(M_ * u_curr_);
    if (enow > 1.01 * energy_ + 1e-300) {
        std::ostringstream msg;
        msg << "Timestepper: kinetic energy grew from " << energy_ << " to "
            << enow << " in step " << step_
            << "; dt too large for the current velocity";
        throw std::runtime_error(msg.str());
    }
    energy_ = enow;
}

} // namespace khdns
