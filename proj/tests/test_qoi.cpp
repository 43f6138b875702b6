#include "khdns/qoi.hpp"

#include "khdns/kh_setup.hpp"
#include "khdns/timestepper.hpp"

#include "field_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace khdns;
using khdns::testing::make_separable;
using khdns::testing::project_velocity;

namespace {

constexpr double kLambda = 5.0 * M_PI * M_PI;

AnalyticVelocity taylor_velocity()
{
    return [](double x, double y) {
        const double ax = 2.0 * M_PI * x, ay = M_PI * y;
        return std::array<double, 2>{
            (2.0 * M_PI / kLambda) * std::sin(ax) * std::cos(ay),
            (-4.0 * M_PI / kLambda) * std::cos(ax) * std::sin(ay)};
    };
}

/// Shared shear-layer projection (n=16, k=6), built once.
const VelocitySpace& kh_space()
{
    static const StructuredMesh mesh(16);
    static const VelocitySpace sp(mesh, 6, PressureMode::reduced);
    return sp;
}

const Vec& kh_u0()
{
    static const Vec u0 =
        project_velocity(kh_space(), kh_initial_velocity(KHParams{}));
    return u0;
}

} // namespace

TEST_CASE("constructor validation")
{
    const StructuredMesh mesh(3);
    const VelocitySpace sp(mesh, 2, PressureMode::reduced);
    CHECK_THROWS_AS(QoiEvaluator(sp, 1, 9), std::invalid_argument);
    CHECK_THROWS_AS(QoiEvaluator(sp, 8, 10), std::invalid_argument); // 10 % 3
    CHECK_NOTHROW(QoiEvaluator(sp, 8, 9));
}

TEST_CASE("uniform flow: energy one half, derivatives zero")
{
    const StructuredMesh mesh(4);
    const VelocitySpace sp(mesh, 3, PressureMode::reduced);
    const VelocityField u = make_separable(
        sp, [](double) { return 1.0; }, [](double) { return 0.0; });
    const QoiEvaluator qoi(sp, 16, 16);
    CHECK(qoi.kinetic_energy(u.v) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(qoi.enstrophy(u.v) < 1e-24);
    CHECK(qoi.palinstrophy(u.v) < 1e-20);

    // All spectral energy in the mean mode.
    const SpectrumRecord s = qoi.spectrum(u.v, 0.0);
    CHECK(s.energy[0] == doctest::Approx(1.0).epsilon(1e-13));
    for (size_t kk = 1; kk < s.energy.size(); ++kk)
        CHECK(s.energy[kk] < 1e-24);

    // Flat profile, no fluctuations, no mean vorticity.
    const ProfileRecord p = qoi.profile(u.v, 0.0);
    for (int j = 0; j < qoi.num_lines(); ++j) {
        CHECK(p.mean_u1[j] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(p.rms_u1[j] < 1e-12);
    }
    CHECK_THROWS_AS(qoi.vorticity_thickness(u.v), std::domain_error);
}

TEST_CASE("kinetic energy agrees with the mass matrix quadratic form")
{
    const StructuredMesh mesh(4);
    const VelocitySpace sp(mesh, 3, PressureMode::reduced);
    Vec u(sp.num_velocity_dofs());
    unsigned long long s = 12345;
    for (int d = 0; d < u.size(); ++d) {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        u[d] = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
    }
    const QoiEvaluator qoi(sp, 8, 8);
    const SpMat M = assemble_mass(sp);
    CHECK(qoi.kinetic_energy(u) ==
          doctest::Approx(0.5 * u.dot(M * u)).epsilon(1e-13));
}

TEST_CASE("linear shear: exact thickness and enstrophy")
{
    const StructuredMesh mesh(4);
    const VelocitySpace sp(mesh, 3, PressureMode::reduced);
    const VelocityField u = make_separable(
        sp, [](double y) { return y; }, [](double) { return 0.0; });
    const QoiEvaluator qoi(sp, 64, 16);
    // omega = -1 everywhere: E = 1/2, P = 0, delta = 2 u_ref / 1.
    CHECK(qoi.enstrophy(u.v) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(qoi.palinstrophy(u.v) < 1e-18);
    CHECK(qoi.vorticity_thickness(u.v) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(qoi.vorticity_thickness(u.v, 3.0) ==
          doctest::Approx(6.0).epsilon(1e-13));
}

TEST_CASE("eigenmode functionals: K = 1/(2 lambda), E = 1/2, P = lambda/2")
{
    const StructuredMesh mesh(8);
    const VelocitySpace sp(mesh, 4, PressureMode::reduced);
    const Vec u = project_velocity(sp, taylor_velocity());
    const QoiEvaluator qoi(sp, 64, 64);
    // The L2 projection preserves K to second order in the projection
    // error; E and P see the error once through the broken derivatives.
    CHECK(qoi.kinetic_energy(u) ==
          doctest::Approx(0.5 / kLambda).epsilon(1e-10));
    CHECK(qoi.enstrophy(u) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(qoi.palinstrophy(u) == doctest::Approx(0.5 * kLambda).epsilon(1e-3));
}

TEST_CASE("profile statistics equal direct sampling of an in-space field")
{
    // u = curl(16 x^2(1-x)^2 y^2(1-y)^2) lies in the k=3 space, so the
    // profile must match the analytic sample statistics to roundoff.
    const auto u1 = [](double x, double y) {
        const double px = x * x * (1.0 - x) * (1.0 - x);
        const double dpy = 2.0 * y * (1.0 - y) * (1.0 - 2.0 * y);
        return 16.0 * px * dpy;
    };
    const auto f = [&](double x, double y) {
        const double dpx = 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
        const double py = y * y * (1.0 - y) * (1.0 - y);
        return std::array<double, 2>{u1(x, y), -16.0 * dpx * py};
    };
    const StructuredMesh mesh(4);
    const VelocitySpace sp(mesh, 3, PressureMode::reduced);
    const Vec u = project_velocity(sp, f);

    const int nl = 17, ns = 64;
    const QoiEvaluator qoi(sp, nl, ns);
    const ProfileRecord p = qoi.profile(u, 1.25);
    CHECK(p.t == 1.25);
    for (int j = 0; j < nl; ++j) {
        const double y = static_cast<double>(j) / (nl - 1);
        CHECK(p.y[j] == doctest::Approx(y).epsilon(1e-15));
        double mean = 0.0, var = 0.0;
        for (int i = 0; i < ns; ++i)
            mean += u1(static_cast<double>(i) / ns, y);
        mean /= ns;
        for (int i = 0; i < ns; ++i) {
            const double d = u1(static_cast<double>(i) / ns, y) - mean;
            var += d * d;
        }
        CHECK(p.mean_u1[j] == doctest::Approx(mean).epsilon(1e-11).scale(1.0));
        CHECK(p.rms_u1[j] ==
              doctest::Approx(std::sqrt(var / ns)).epsilon(1e-11).scale(1.0));
    }
}

TEST_CASE("spectrum normalization pinned by a single-harmonic field")
{
    // u1 = sin(2 pi x) w'(y), w = y^2(1-y)^2: every sample line carries one
    // Fourier mode at wavenumber 1 with coefficient magnitude |w'(y)|/2.
    const auto f = [](double x, double y) {
        const double w = y * y * (1.0 - y) * (1.0 - y);
        const double dw = 2.0 * y * (1.0 - y) * (1.0 - 2.0 * y);
        return std::array<double, 2>{std::sin(2.0 * M_PI * x) * dw,
                                     -2.0 * M_PI * std::cos(2.0 * M_PI * x) *
                                         w};
    };
    const StructuredMesh mesh(8);
    const VelocitySpace sp(mesh, 6, PressureMode::reduced);
    const Vec u = project_velocity(sp, f);

    const int nl = 129, ns = 64;
    const QoiEvaluator qoi(sp, nl, ns);
    const SpectrumRecord s = qoi.spectrum(u, 0.0);
    REQUIRE(static_cast<int>(s.energy.size()) == ns / 2 + 1);

    // Reference: E(1) = trapz_y |w'(y)/2|^2 on the same lines.
    double ref = 0.0;
    const double dy = 1.0 / (nl - 1);
    for (int j = 0; j < nl; ++j) {
        const double y = static_cast<double>(j) / (nl - 1);
        const double dw = 2.0 * y * (1.0 - y) * (1.0 - 2.0 * y);
        const double wy = (j == 0 || j == nl - 1) ? 0.5 * dy : dy;
        ref += wy * 0.25 * dw * dw;
    }
    CHECK(s.energy[1] == doctest::Approx(ref).epsilon(1e-9));
    double off = 0.0;
    for (size_t kk = 0; kk < s.energy.size(); ++kk)
        if (kk != 1)
            off = std::max(off, s.energy[kk]);
    CHECK(off < 1e-12 * s.energy[1]);
}

TEST_CASE("spectrum and profile satisfy Parseval together")
{
    const QoiEvaluator qoi(kh_space(), 65, 256);
    const Vec& u = kh_u0();
    const SpectrumRecord s = qoi.spectrum(u, 0.0);
    const ProfileRecord p = qoi.profile(u, 0.0);

    // trapz_y mean(u1^2) computed two ways: mean^2 + rms^2 per line, and
    // the one-sided spectral sum with interior modes doubled.
    const int nl = qoi.num_lines();
    const double dy = 1.0 / (nl - 1);
    double phys = 0.0;
    for (int j = 0; j < nl; ++j) {
        const double wy = (j == 0 || j == nl - 1) ? 0.5 * dy : dy;
        phys += wy * (p.mean_u1[j] * p.mean_u1[j] + p.rms_u1[j] * p.rms_u1[j]);
    }
    double spec = s.energy.front() + s.energy.back();
    for (size_t kk = 1; kk + 1 < s.energy.size(); ++kk)
        spec += 2.0 * s.energy[kk];
    CHECK(spec == doctest::Approx(phys).epsilon(1e-12));
}

TEST_CASE("shear layer initial state: frozen functional values")
{
    const QoiEvaluator qoi(kh_space(), 1024, 1024);
    const Vec& u = kh_u0();
    const KHParams params;
    const KHInitialInvariants exact = kh_initial_invariants(params);

    const double K = qoi.kinetic_energy(u);
    const double E = qoi.enstrophy(u);
    const double P = qoi.palinstrophy(u);
    // n=16, k=6 resolves the tanh layer to ~7 digits in K; the broken
    // derivative functionals carry the visible discretization error.
    CHECK(K == doctest::Approx(exact.kinetic_energy).epsilon(1e-5));
    CHECK(E == doctest::Approx(exact.enstrophy).epsilon(0.02));
    CHECK(P == doctest::Approx(exact.palinstrophy).epsilon(0.08));

    const double delta = qoi.vorticity_thickness(u, params.u_inf);
    CHECK(delta / params.delta0 == doctest::Approx(1.0).epsilon(0.02));

    // Spectral peaks at the seeded wavenumbers 4 and 10 and nowhere else
    // (above the projection noise floor).
    const SpectrumRecord s = qoi.spectrum(u, 0.0);
    CHECK(s.energy[4] > 1e6 * s.energy[3]);
    CHECK(s.energy[4] > 1e6 * s.energy[5]);
    CHECK(s.energy[10] > 1e6 * s.energy[9]);
    CHECK(s.energy[10] > 1e6 * s.energy[11]);

    // Centerline: odd mean profile crosses zero, perturbation u1 vanishes.
    const ProfileRecord prof = qoi.profile(u, 0.0);
    const int mid = 512; // y = 512/1023, closest line above 1/2
    CHECK(std::abs(prof.mean_u1[mid]) < 0.06);
    CHECK(prof.rms_u1[mid] < 1e-3);
}

TEST_CASE("sampled thickness converges as the line count doubles")
{
    const Vec& u = kh_u0();
    const KHParams params;
    auto delta = [&](int nlines) {
        return QoiEvaluator(kh_space(), nlines, 256)
            .vorticity_thickness(u, params.u_inf);
    };
    const double d256 = delta(256), d512 = delta(512), d1024 = delta(1024);
    CHECK(std::abs(d512 - d1024) <= std::abs(d256 - d512) + 1e-12);
}

TEST_CASE("pure shear profile reproduces the layer thickness")
{
    const KHParams params;
    const VelocitySpace& sp = kh_space();
    const VelocityField u = make_separable(
        sp,
        [&](double y) {
            return params.u_inf * std::tanh((2.0 * y - 1.0) / params.delta0);
        },
        [](double) { return 0.0; });
    const QoiEvaluator qoi(sp, 1024, 256);
    const double delta = qoi.vorticity_thickness(u.v, params.u_inf);
    CHECK(delta / params.delta0 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("dissipation series: exact balance and degenerate cases")
{
    CHECK_THROWS_AS(numerical_dissipation({0.0, 1.0}, {1.0}, {0.0, 0.0}, 1.0),
                    std::invalid_argument);

    // Constant state: no loss, no dissipation, eps_rel defined as zero.
    {
        const std::vector<double> t{0.0, 1.0, 2.0};
        const std::vector<double> K{0.3, 0.3, 0.3}, E{0.0, 0.0, 0.0};
        const DissipationSeries d = numerical_dissipation(t, K, E, 0.0);
        for (double v : d.eps_int)
            CHECK(v == 0.0);
        for (double v : d.eps_rel)
            CHECK(v == 0.0);
    }

    // Sampled exact decay K' = -2 nu E with E = lambda K: the residual is
    // pure trapezoid error, quadratic in the sample spacing.
    auto eps_at = [](int m) {
        const double nu = 1e-2, T = 1.0;
        std::vector<double> t(m + 1), K(m + 1), E(m + 1);
        for (int i = 0; i <= m; ++i) {
            t[i] = T * i / m;
            K[i] = std::exp(-2.0 * nu * kLambda * t[i]) / (2.0 * kLambda);
            E[i] = kLambda * K[i];
        }
        const DissipationSeries d = numerical_dissipation(t, K, E, nu);
        return d.eps_rel.back();
    };
    const double e1 = eps_at(64), e2 = eps_at(128);
    CHECK(e1 > 0.0);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("time stepped trajectory keeps the dissipation defect small")
{
    const StructuredMesh mesh(8);
    const VelocitySpace sp(mesh, 4, PressureMode::reduced);
    const Vec u0 = project_velocity(sp, taylor_velocity());
    const QoiEvaluator qoi(sp, 64, 64);

    Timestepper::Options o;
    o.dt = 2e-3;
    o.nu = 1e-2;
    Timestepper st(sp, o);
    st.set_initial(u0);
    std::vector<double> t{0.0}, K{qoi.kinetic_energy(u0)},
        E{qoi.enstrophy(u0)};
    for (int s = 0; s < 50; ++s) {
        st.step();
        t.push_back(st.time());
        K.push_back(qoi.kinetic_energy(st.velocity()));
        E.push_back(qoi.enstrophy(st.velocity()));
    }
    const DissipationSeries d = numerical_dissipation(t, K, E, o.nu);
    CHECK(d.eps_int.front() == 0.0);
    CHECK(d.eps_rel.back() < 1e-4);
    for (double v : d.eps_int)
        CHECK(std::isfinite(v));
}
