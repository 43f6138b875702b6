#include "khdns/selforg.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace khdns {

double eigenvalue(int k1, int k2, double a, double b)
{
    return 4.0 * a * a * k1 * k1 + b * b * k2 * k2;
}

EigenMode make_eigen_mode(int k1, int k2, XVariant variant, double a, double b)
{
    if (k1 < 0 || k2 < 0)
        throw std::invalid_argument("make_eigen_mode: negative index");
    if (a <= 0.0 || b <= 0.0)
        throw std::invalid_argument("make_eigen_mode: domain scales must be positive");
    EigenMode m;
    m.k1 = k1;
    m.k2 = k2;
    m.variant = variant;
    m.a = a;
    m.b = b;
    m.lambda = eigenvalue(k1, k2, a, b);

    // Unit L2 norm on [0, pi/a] x [0, pi/b] from the separable factors.
    // Mean of the squared x-factor: 1/2, except cos(0) = 1; the y-factor
    // is identically zero for k2 = 0 (and so is sin(0 x) for k1 = 0).
    const bool xzero = k1 == 0 && variant == XVariant::sine;
    if (xzero || k2 == 0) {
        m.norm = 0.0;
        return m;
    }
    const double xmean = k1 == 0 ? 1.0 : 0.5;
    m.norm = 1.0 / std::sqrt(xmean * 0.5 * (M_PI / a) * (M_PI / b));
    return m;
}

double smallest_eigenvalue(double a, double b, Mu1Convention conv)
{
    return conv == Mu1Convention::nonzero_modes_only ? b * b : 4.0 * a * a;
}

namespace {

double xfactor(const EigenMode& m, double x)
{
    const double arg = 2.0 * m.a * m.k1 * x;
    return m.variant == XVariant::sine ? std::sin(arg) : std::cos(arg);
}

double dxfactor(const EigenMode& m, double x)
{
    const double w = 2.0 * m.a * m.k1;
    return m.variant == XVariant::sine ? w * std::cos(w * x)
                                       : -w * std::sin(w * x);
}

} // namespace

double EigenMode::vorticity(double x, double y) const
{
    if (is_zero())
        return 0.0;
    return norm * xfactor(*this, x) * std::sin(b * k2 * y);
}

std::array<double, 2> EigenMode::vorticity_grad(double x, double y) const
{
    if (is_zero())
        return {0.0, 0.0};
    const double sy = std::sin(b * k2 * y);
    const double cy = b * k2 * std::cos(b * k2 * y);
    return {norm * dxfactor(*this, x) * sy, norm * xfactor(*this, x) * cy};
}

TaylorVortex::TaylorVortex(EigenMode mode, double nu) : mode_(mode), nu_(nu)
{
    if (mode_.is_zero())
        throw std::invalid_argument(
            "TaylorVortex: the mode's eigenfunction vanishes identically");
    if (nu_ < 0.0)
        throw std::invalid_argument("TaylorVortex: negative viscosity");
}

double TaylorVortex::vorticity(double x, double y, double t) const
{
    return mode_.vorticity(x, y) * std::exp(-nu_ * mode_.lambda * t);
}

std::array<double, 2> TaylorVortex::velocity(double x, double y, double t) const
{
    // u = (d_y psi, -d_x psi) with psi = w/lambda.
    const auto g = mode_.vorticity_grad(x, y);
    const double decay = std::exp(-nu_ * mode_.lambda * t) / mode_.lambda;
    return {g[1] * decay, -g[0] * decay};
}

AnalyticVelocity TaylorVortex::initial_velocity() const
{
    const EigenMode m = mode_;
    return [m](double x, double y) {
        const auto g = m.vorticity_grad(x, y);
        return std::array<double, 2>{g[1] / m.lambda, -g[0] / m.lambda};
    };
}

double TaylorVortex::kinetic_energy(double t) const
{
    return std::exp(-2.0 * nu_ * mode_.lambda * t) / (2.0 * mode_.lambda);
}

double TaylorVortex::enstrophy(double t) const
{
    return 0.5 * std::exp(-2.0 * nu_ * mode_.lambda * t);
}

double TaylorVortex::palinstrophy(double t) const
{
    return 0.5 * mode_.lambda * std::exp(-2.0 * nu_ * mode_.lambda * t);
}

void KETrajectory::push_back(double t_, double K_, double E_, double P_)
{
    t.push_back(t_);
    K.push_back(K_);
    E.push_back(E_);
    P.push_back(P_);
}

DecayBoundReport decay_bound_check(const KETrajectory& traj, double nu,
                                   double mu1, double tol)
{
    if (traj.size() == 0)
        return {};
    DecayBoundReport rep;
    const double t0 = traj.t.front();
    const double K0 = traj.K.front();
    const double E0 = traj.E.front();
    double qprev = 0.0;
    bool have_q = false;
    for (int i = 0; i < traj.size(); ++i) {
        const double decay = std::exp(-2.0 * nu * mu1 * (traj.t[i] - t0));
        const double ebound = E0 * decay;
        const double kbound = K0 * decay;
        const double eexc = ebound > 0.0 ? traj.E[i] / ebound - 1.0
                                         : (traj.E[i] > 0.0 ? 1.0 : 0.0);
        const double kexc = kbound > 0.0 ? traj.K[i] / kbound - 1.0
                                         : (traj.K[i] > 0.0 ? 1.0 : 0.0);
        rep.max_energy_excess = std::max(rep.max_energy_excess, eexc);
        rep.max_kinetic_excess = std::max(rep.max_kinetic_excess, kexc);
        if (eexc > tol && rep.first_energy_violation < 0)
            rep.first_energy_violation = i;
        if (kexc > tol && rep.first_kinetic_violation < 0)
            rep.first_kinetic_violation = i;

        if (traj.K[i] > 0.0) {
            const double q = traj.Q(i);
            if (have_q) {
                const double growth = q / qprev - 1.0;
                rep.max_quotient_growth =
                    std::max(rep.max_quotient_growth, growth);
                if (growth > tol && rep.first_quotient_violation < 0)
                    rep.first_quotient_violation = i;
            }
            qprev = q;
            have_q = true;
        }
    }
    rep.energy_bound_ok = rep.first_energy_violation < 0;
    rep.kinetic_bound_ok = rep.first_kinetic_violation < 0;
    rep.quotient_monotone = rep.first_quotient_violation < 0;
    return rep;
}

void write_ke_csv(std::ostream& os, const KETrajectory& traj)
{
    os << "t,K,E,Q,Lambda\n";
    char buf[128];
    for (int i = 0; i < traj.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", traj.t[i],
                      traj.K[i], traj.E[i]);
        os << buf;
        if (traj.K[i] > 0.0 && traj.E[i] > 0.0) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", traj.Q(i),
                          traj.Lam(i));
            os << buf;
        } else {
            os << ",,";
        }
        os << '\n';
    }
}

} // namespace khdns
