#include "khdns/kh_setup.hpp"

#include <cmath>

namespace khdns {

AnalyticVelocity kh_initial_velocity(const KHParams& p)
{
    const double d0 = p.delta0;
    const double ui = p.u_inf;
    const double cn = p.cn;
    const double h2 = p.second_harmonic ? 1.0 : 0.0;
    return [d0, ui, cn, h2](double x, double y) {
        const double t = y - 0.5;
        const double gauss = ui * std::exp(-t * t / (d0 * d0));
        const double cx =
            std::cos(8.0 * M_PI * x) + h2 * std::cos(20.0 * M_PI * x);
        const double dcx = -8.0 * M_PI * std::sin(8.0 * M_PI * x) -
                           h2 * 20.0 * M_PI * std::sin(20.0 * M_PI * x);
        const double psi_y = gauss * (-2.0 * t / (d0 * d0)) * cx;
        const double psi_x = gauss * dcx;
        return std::array<double, 2>{ui * std::tanh(2.0 * t / d0) + cn * psi_y,
                                     -cn * psi_x};
    };
}

AnalyticScalar kh_initial_vorticity(const KHParams& p)
{
    const double d0 = p.delta0;
    const double ui = p.u_inf;
    const double cn = p.cn;
    const double h2 = p.second_harmonic ? 1.0 : 0.0;
    return [d0, ui, cn, h2](double x, double y) {
        const double t = y - 0.5;
        const double s = 1.0 / std::cosh(2.0 * t / d0);
        const double dU = ui * (2.0 / d0) * s * s;
        const double a = 1.0 / (d0 * d0);
        const double gauss = ui * std::exp(-t * t * a);
        const double gpp = (4.0 * t * t * a - 2.0) * a * gauss;
        const double a1 = 8.0 * M_PI, a2 = 20.0 * M_PI;
        const double cx = std::cos(a1 * x) + h2 * std::cos(a2 * x);
        const double ddcx =
            -a1 * a1 * std::cos(a1 * x) - h2 * a2 * a2 * std::cos(a2 * x);
        return -dU - cn * (gpp * cx + gauss * ddcx);
    };
}

KHInitialInvariants kh_initial_invariants(const KHParams& p)
{
    const double d0 = p.delta0;
    const double ui = p.u_inf;
    const double cn = p.cn;
    const double pi = M_PI;

    // 1D pieces.  y: Gaussian moments of exp(-2 t^2/d0^2); the x profile
    // cos(8 pi x) [+ cos(20 pi x)] has wavenumbers a1 = 8 pi, a2 = 20 pi.
    const double M0 = d0 * std::sqrt(pi / 2.0); // int exp(-2 t^2/d0^2)
    const double a1 = 8.0 * pi, a2 = 20.0 * pi;
    const double h2 = p.second_harmonic ? 1.0 : 0.0;
    const double s0 = 0.5 * (1.0 + h2);                    // int C^2
    const double s2 = 0.5 * (a1 * a1 + h2 * a2 * a2);      // int C'^2
    const double s4 =
        0.5 * (std::pow(a1, 4) + h2 * std::pow(a2, 4)); // int C''^2
    const double s6 =
        0.5 * (std::pow(a1, 6) + h2 * std::pow(a2, 6)); // int C'''^2

    KHInitialInvariants out;

    // Mean profile U = u_inf tanh((2y-1)/d0):
    //   int U^2      = u^2 (1 - d0 tanh(1/d0))
    //   int U'^2     = u^2 8/(3 d0)
    //   int U''^2    = u^2 128/(15 d0^3)
    const double u2 = ui * ui;
    const double K_mean = 0.5 * u2 * (1.0 - d0 * std::tanh(1.0 / d0));
    const double E_mean = 0.5 * u2 * 8.0 / (3.0 * d0);
    const double P_mean = 0.5 * u2 * 128.0 / (15.0 * d0 * d0 * d0);

    // Perturbation, with G = exp(-t^2/d0^2):
    //   int |grad psi|^2     = u^2 M0 (s0/d0^2 + s2)
    //   int (lap psi)^2      = u^2 M0 (s4 + 2 s2/d0^2 + 3 s0/d0^4)
    //   int |grad lap psi|^2 = u^2 M0 (s6 + 3 s4/d0^2 + 9 s2/d0^4 + 15 s0/d0^6)
    // from Gaussian moments int t^{2m} G^2 = (2m-1)!! (d0^2/4)^m M0.
    const double id2 = 1.0 / (d0 * d0);
    const double K_pert = 0.5 * cn * cn * u2 * M0 * (s0 * id2 + s2);
    const double E_pert =
        0.5 * cn * cn * u2 * M0 * (s4 + 2.0 * s2 * id2 + 3.0 * s0 * id2 * id2);
    const double P_pert =
        0.5 * cn * cn * u2 * M0 *
        (s6 + 3.0 * s4 * id2 + 9.0 * s2 * id2 * id2 +
         15.0 * s0 * id2 * id2 * id2);

    out.kinetic_energy = K_mean + K_pert;
    out.enstrophy = E_mean + E_pert;
    out.palinstrophy = P_mean + P_pert;
    return out;
}

} // namespace khdns
