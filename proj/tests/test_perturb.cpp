#include "khdns/perturb.hpp"

#include "khdns/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace khdns;
using doctest::Approx;

namespace {

/// Small, fast pair setup: coarse mesh, low order, strong viscosity, one
/// shear time.  Each pair completes in ~0.1 s.
PairConfig small_pair()
{
    PairConfig c;
    c.params.Re = 100.0;
    c.n = 8;
    c.k = 2;
    c.dt = 5e-4;
    c.t_end_tbar = 1.0;
    c.sample_stride = 10;
    return c;
}

bool same_samples(const DivergenceReport& a, const DivergenceReport& b)
{
    if (a.samples.size() != b.samples.size())
        return false;
    for (size_t i = 0; i < a.samples.size(); ++i) {
        const DivergenceSample &x = a.samples[i], &y = b.samples[i];
        if (x.t != y.t || x.kinetic != y.kinetic ||
            x.enstrophy != y.enstrophy || x.palinstrophy != y.palinstrophy)
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("spec factories validate their arguments and describe themselves")
{
    CHECK_THROWS_AS(PerturbationSpec::convection_quadrature(0),
                    std::invalid_argument);
    CHECK_THROWS_AS(PerturbationSpec::solver_rtol(0.0), std::invalid_argument);
    CHECK_THROWS_AS(PerturbationSpec::solver_rtol(-1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(PerturbationSpec::rounding_noise(-1e-16),
                    std::invalid_argument);
    CHECK_THROWS_AS(PerturbationSpec::eigenmode_seed(1, 0, 1e-8),
                    std::invalid_argument);
    CHECK_THROWS_AS(PerturbationSpec::eigenmode_seed(-1, 1, 1e-8),
                    std::invalid_argument);
    CHECK_THROWS_AS(PerturbationSpec::eigenmode_seed(1, 1, 0.0),
                    std::invalid_argument);

    CHECK(PerturbationSpec::none().describe() == "none");
    CHECK(PerturbationSpec::convection_quadrature(3).describe() ==
          "convection_quadrature npts1d=3");
    CHECK(PerturbationSpec::solver_rtol(1e-6).describe() ==
          "solver_rtol rtol=1e-06");
    CHECK(PerturbationSpec::regularized_solve().describe() ==
          "regularized_solve shift=1e-12 refine=off");
    CHECK(PerturbationSpec::eigenmode_seed(1, 1, 1e-8).describe() ==
          "eigenmode_seed k1=1 k2=1 amplitude=1e-08");

    // The noise scenario only emulates compiler/hardware rounding churn;
    // anything that serializes it must say so.
    const std::string noise = PerturbationSpec::rounding_noise().describe();
    CHECK(noise ==
          "rounding_noise rho=2.220446049250313e-16 seed=1 "
          "(emulated fma/reassociation rounding)");
    CHECK(noise.find("emulated") != std::string::npos);
}

TEST_CASE("noise draws are keyed, bounded, and reproducible")
{
    // Same key, same draw; any key component changes the draw.
    CHECK(rounding_noise_xi(7, 13, 41) == rounding_noise_xi(7, 13, 41));
    CHECK(rounding_noise_xi(1, 0, 0) != rounding_noise_xi(2, 0, 0));
    CHECK(rounding_noise_xi(1, 1, 0) != rounding_noise_xi(1, 0, 0));
    CHECK(rounding_noise_xi(1, 0, 1) != rounding_noise_xi(1, 0, 0));

    double mean = 0.0, lo = 1.0, hi = -1.0;
    for (int i = 0; i < 1000; ++i) {
        const double xi = rounding_noise_xi(3, 5, i);
        CHECK(xi >= -1.0);
        CHECK(xi < 1.0);
        mean += xi;
        lo = std::min(lo, xi);
        hi = std::max(hi, xi);
    }
    CHECK(std::abs(mean / 1000.0) < 0.05);
    CHECK(lo < -0.9); // the draws actually spread over the interval
    CHECK(hi > 0.9);

    Vec v(64);
    for (int i = 0; i < 64; ++i)
        v[i] = 1.0 + 0.01 * i;
    Vec untouched = v;
    apply_rounding_noise(untouched, 0.0, 9, 2);
    CHECK((untouched.array() == v.array()).all());

    Vec noisy = v;
    apply_rounding_noise(noisy, 1e-10, 9, 2);
    CHECK((noisy.array() != v.array()).any());
    for (int i = 0; i < 64; ++i)
        CHECK(std::abs(noisy[i] / v[i] - 1.0) <= 1e-10 * (1.0 + 1e-12));

    // The hook form applies the same transformation.
    Vec hooked = v;
    rounding_noise_hook(1e-10, 9)(2, hooked);
    CHECK((hooked.array() == noisy.array()).all());
}

TEST_CASE("a blank spec reproduces the reference bitwise")
{
    const PairConfig c = small_pair();
    const DivergenceReport r = run_pair(c, PerturbationSpec::none());

    // 71 steps, sampled at 0, every 10th, and the last.
    CHECK(r.samples.size() == 9);
    CHECK(r.complete);
    CHECK(r.bitwise_identical);
    CHECK(r.max_kinetic == 0.0);
    CHECK(r.max_enstrophy == 0.0);
    CHECK(r.max_palinstrophy == 0.0);
    CHECK(!std::isfinite(r.t_div_kinetic));
    CHECK(!std::isfinite(r.t_div_enstrophy));
    CHECK(!std::isfinite(r.t_div_palinstrophy));
    for (const DivergenceSample& s : r.samples) {
        CHECK(s.kinetic == 0.0);
        CHECK(s.enstrophy == 0.0);
        CHECK(s.palinstrophy == 0.0);
    }
    CHECK(r.reference_id == "none");
    CHECK(r.perturbed_id == "none");

    // Report generation is deterministic end to end.
    CHECK(same_samples(r, run_pair(c, PerturbationSpec::none())));

    std::ostringstream os;
    write_divergence_csv(os, r);
    const std::string csv = os.str();
    CHECK(csv.substr(0, csv.find('\n')) ==
          "t,t_over_tbar,kinetic_dev,enstrophy_dev,palinstrophy_dev");
    CHECK(csv.find("\n0,0,0,0,0\n") != std::string::npos);

    const std::string digest = summarize(r);
    CHECK(digest.find("never crossed") != std::string::npos);
    CHECK(digest.find("bitwise identical: yes") != std::string::npos);
    CHECK(digest.find("status: complete") != std::string::npos);
}

TEST_CASE("reduced convection quadrature perturbs, the exact count does not")
{
    const PairConfig c = small_pair();

    const DivergenceReport r =
        run_pair(c, PerturbationSpec::convection_quadrature(3));
    CHECK(!r.bitwise_identical);
    CHECK(r.complete);
    CHECK(r.max_kinetic > 1e-8);
    CHECK(r.max_kinetic < 1e-3);
    CHECK(r.max_enstrophy > 1e-5);
    CHECK(r.max_enstrophy < 5e-2);
    CHECK(r.max_palinstrophy > 1e-5);
    CHECK(r.max_palinstrophy < 5e-2);
    CHECK(!std::isfinite(r.t_div_palinstrophy));
    CHECK(r.samples[0].kinetic == 0.0); // shared start state

    // Asking for the space's own exact count changes nothing at all.
    const StructuredMesh mesh(c.n);
    const VelocitySpace sp(mesh, c.k, PressureMode::reduced);
    const DivergenceReport same = run_pair(
        c, PerturbationSpec::convection_quadrature(sp.npts_convection()));
    CHECK(same.bitwise_identical);
    CHECK(same.max_palinstrophy == 0.0);
}

TEST_CASE("loosened solver tolerance engages once refinement has real work")
{
    // With a double-precision factorization this small system meets 1e-12
    // in one backsolve, so a looser target changes nothing; against a
    // single-precision factorization the refinement loop runs and the
    // loosened target stops it earlier.
    PairConfig c = small_pair();
    c.solver.single_precision_factor = true;

    const DivergenceReport control = run_pair(c, PerturbationSpec::none());
    CHECK(control.bitwise_identical);
    CHECK(control.max_palinstrophy == 0.0);

    const DivergenceReport r = run_pair(c, PerturbationSpec::solver_rtol(1e-6));
    CHECK(!r.bitwise_identical);
    CHECK(r.complete);
    CHECK(r.max_palinstrophy > 1e-12);
    CHECK(r.max_palinstrophy < 1e-5);
    CHECK(!std::isfinite(r.t_div_palinstrophy));
}

TEST_CASE("regularized single-pass solve stays within rounding distance")
{
    const DivergenceReport r =
        run_pair(small_pair(), PerturbationSpec::regularized_solve());
    CHECK(!r.bitwise_identical);
    CHECK(r.complete);
    CHECK(r.max_palinstrophy > 0.0);
    CHECK(r.max_palinstrophy < 1e-12);
    CHECK(r.max_kinetic < 1e-12);
}

TEST_CASE("rounding noise stays at rounding size, distinct per seed")
{
    const PairConfig c = small_pair();

    const DivergenceReport a =
        run_pair(c, PerturbationSpec::rounding_noise(0x1p-52, 1));
    CHECK(!a.bitwise_identical);
    CHECK(a.complete);
    CHECK(a.max_palinstrophy > 0.0);
    CHECK(a.max_palinstrophy < 1e-12);
    CHECK(!std::isfinite(a.t_div_palinstrophy));
    CHECK(a.perturbed_id.find("emulated") != std::string::npos);

    // Same seed, same report; a different seed takes a different path.
    CHECK(same_samples(a, run_pair(c, PerturbationSpec::rounding_noise(0x1p-52, 1))));
    const DivergenceReport b =
        run_pair(c, PerturbationSpec::rounding_noise(0x1p-52, 2));
    CHECK(!same_samples(a, b));
}

TEST_CASE("eigenmode seed shifts the start state")
{
    const PairConfig c = small_pair();

    // An x-uniform mode overlaps the mean profile: the offset is visible
    // at the seed amplitude from the very first sample.
    const DivergenceReport r =
        run_pair(c, PerturbationSpec::eigenmode_seed(0, 1, 1e-8));
    CHECK(!r.bitwise_identical);
    CHECK(r.samples[0].kinetic > 0.0);
    CHECK(r.max_kinetic > 1e-10);
    CHECK(r.max_kinetic < 1e-7);
    CHECK(r.complete);

    // An x-varying mode is L2-orthogonal to the layer's harmonics, so the
    // quadratic remainder is all that shows up in the tracked quantities,
    // but the states still differ.
    const DivergenceReport o =
        run_pair(c, PerturbationSpec::eigenmode_seed(1, 1, 1e-8));
    CHECK(!o.bitwise_identical);
    CHECK(o.max_kinetic < 1e-12);
}

TEST_CASE("divergence time is recorded and can end the run early")
{
    PairConfig c = small_pair();
    c.threshold = 1e-18; // any nonzero deviation counts as crossed
    c.stop_after_divergence = true;

    const DivergenceReport r =
        run_pair(c, PerturbationSpec::rounding_noise(0x1p-52, 1));
    // The start sample is exactly zero; the first in-loop sample crosses
    // and stops the pair.
    CHECK(r.samples.size() == 2);
    CHECK(r.samples[0].palinstrophy == 0.0);
    CHECK(r.samples[1].palinstrophy > c.threshold);
    CHECK(r.t_div_palinstrophy == r.samples[1].t);
    CHECK(r.samples[1].t == Approx(10 * c.dt).epsilon(1e-12));

    const std::string digest = summarize(r);
    CHECK(digest.find("crossed at t=") != std::string::npos);
}

TEST_CASE("config validation")
{
    const PerturbationSpec none = PerturbationSpec::none();
    PairConfig c = small_pair();
    c.dt = 0.0;
    CHECK_THROWS_AS(run_pair(c, none), std::invalid_argument);
    c = small_pair();
    c.sample_stride = 0;
    CHECK_THROWS_AS(run_pair(c, none), std::invalid_argument);
    c = small_pair();
    c.threshold = 0.0;
    CHECK_THROWS_AS(run_pair(c, none), std::invalid_argument);
    c = small_pair();
    c.t_end_tbar = -1.0;
    CHECK_THROWS_AS(run_pair(c, none), std::invalid_argument);
    c = small_pair();
    c.n = 1;
    CHECK_THROWS_AS(run_pair(c, none), std::invalid_argument);
    c = small_pair();
    c.k = 0;
    CHECK_THROWS_AS(run_pair(c, none), std::invalid_argument);
    c = small_pair();
    c.dt = 1.0; // fewer than one step before the end time
    CHECK_THROWS_AS(run_pair(c, none), std::invalid_argument);
}

TEST_CASE("a failing run propagates with the partial report attached")
{
    // A step this large at high Reynolds number trips the energy-growth
    // guard within a few steps.
    PairConfig c = small_pair();
    c.params.Re = 10000.0;
    c.dt = 0.05;
    c.t_end_tbar = 30.0;
    c.sample_stride = 1;

    bool thrown = false;
    try {
        run_pair(c, PerturbationSpec::none());
    } catch (const PairFailure& e) {
        thrown = true;
        CHECK(!e.report.complete);
        CHECK(e.report.failure.find("reference run failed") !=
              std::string::npos);
        CHECK(std::string(e.what()) == e.report.failure);
        CHECK(e.report.samples.size() >= 2);
        const std::string digest = summarize(e.report);
        CHECK(digest.find("status: failed") != std::string::npos);
    }
    CHECK(thrown);
}
