#pragma once

#include "khdns/kh_setup.hpp"
#include "khdns/linalg.hpp"
#include "khdns/timestepper.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace khdns {

/// One controlled deviation from a reference run.  Exactly one kind per
/// run; `none` is the reference itself.  Construct through the factories,
/// which validate their arguments.
struct PerturbationSpec {
    enum class Kind {
        none,                  ///< reference run, no deviation
        convection_quadrature, ///< reduced quadrature for the nonlinear term
        solver_rtol,           ///< loosened linear-solver residual target
        regularized_solve,     ///< shifted factorization, single backsolve
        rounding_noise,        ///< per-step multiplicative state noise
        eigenmode_seed,        ///< add a scaled smooth mode to the start
    };

    Kind kind = Kind::none;
    int quad_npts1d = 0;    ///< convection_quadrature: 1D points per cell
    double rtol = 0.0;      ///< solver_rtol: residual target
    double amplitude = 0.0; ///< rounding_noise rho / eigenmode_seed scale
    std::uint64_t seed = 0; ///< rounding_noise stream key
    int k1 = 0, k2 = 0;     ///< eigenmode_seed wavenumbers

    static PerturbationSpec none();
    static PerturbationSpec convection_quadrature(int npts1d);
    static PerturbationSpec solver_rtol(double rtol);
    static PerturbationSpec regularized_solve();
    /// Multiplies every velocity entry by (1 + rho xi) at the start of each
    /// step, xi uniform in [-1, 1] keyed on (seed, step, entry).  This
    /// emulates the relative-rounding footprint of contraction/reassociation
    /// differences; it does not recompile anything, and its description
    /// says so.  rho = 0 is the exact identity.
    static PerturbationSpec rounding_noise(double rho = 0x1p-52,
                                           std::uint64_t seed = 1);
    static PerturbationSpec eigenmode_seed(int k1, int k2, double amplitude);

    /// Single-line form for run metadata, e.g.
    ///   "solver_rtol rtol=1e-06"
    ///   "rounding_noise rho=2.220446049250313e-16 seed=1 (emulated
    ///    fma/reassociation rounding)".
    std::string describe() const;
};

/// Deterministic counter-based uniform draw in [-1, 1): a keyed hash of
/// (seed, step, index), no stream state.  Same key, same value, on any
/// platform; distinct seeds give unrelated streams.
double rounding_noise_xi(std::uint64_t seed, long step, std::int64_t index);

/// v_i *= 1 + rho xi(seed, step, i).  rho = 0 leaves v bitwise untouched.
void apply_rounding_noise(Vec& v, double rho, std::uint64_t seed, long step);

/// The same, packaged for Timestepper::set_pre_step_hook.
Timestepper::PreStepHook rounding_noise_hook(double rho, std::uint64_t seed);

/// Matched reference/perturbed pair on the shear-layer problem.  Both runs
/// share the mesh, space, step size, and start-state projection; the spec
/// is the only difference.
struct PairConfig {
    KHParams params;           ///< physical setup (carries Re)
    int n = 32;                ///< mesh cells per direction
    int k = 4;                 ///< polynomial order
    double dt = 0.0;           ///< step size (must be set)
    double t_end_tbar = 50.0;  ///< run length in units of params.tbar()
    int sample_stride = 10;    ///< steps between deviation samples
    double threshold = 0.1;    ///< relative-deviation divergence threshold
    /// End the run early once palinstrophy (the most sensitive tracked
    /// quantity) has crossed the threshold.
    bool stop_after_divergence = false;
    SaddleSolver::Options solver; ///< base solver settings for both runs
};

/// Relative deviation |q_pert - q_ref| / |q_ref| of the tracked quantities
/// at one sample time.
struct DivergenceSample {
    double t = 0.0;
    double kinetic = 0.0;
    double enstrophy = 0.0;
    double palinstrophy = 0.0;
};

/// Outcome of a pair: the sampled deviation history plus, per quantity,
/// the first sampled time past the threshold (infinity when never) and the
/// largest deviation seen within the first 200 shear times.
struct DivergenceReport {
    std::string reference_id;
    std::string perturbed_id;
    double threshold = 0.1;
    double tbar = 0.0;
    std::vector<DivergenceSample> samples;

    double t_div_kinetic = std::numeric_limits<double>::infinity();
    double t_div_enstrophy = std::numeric_limits<double>::infinity();
    double t_div_palinstrophy = std::numeric_limits<double>::infinity();

    double max_kinetic = 0.0;
    double max_enstrophy = 0.0;
    double max_palinstrophy = 0.0;

    /// Velocity states compared equal (as raw bytes) at every sample.
    bool bitwise_identical = true;
    /// False when a run failed before the end time; `failure` says how.
    bool complete = true;
    std::string failure;
};

/// Thrown when either run of a pair fails mid-flight (solver stall or the
/// energy-growth guard); the samples collected so far ride along.
struct PairFailure : std::runtime_error {
    PairFailure(const std::string& what, DivergenceReport partial)
        : std::runtime_error(what), report(std::move(partial))
    {
    }
    DivergenceReport report;
};

/// Run the reference and the perturbed variant in lockstep and compare.
/// Kinetic energy, enstrophy and palinstrophy are sampled every
/// `sample_stride` steps (plus the first and last step) with the same
/// quadrature for both runs, so a `none` spec reports exact zeros.
DivergenceReport run_pair(const PairConfig& cfg, const PerturbationSpec& spec);

/// CSV form of the sample history: one header line, then
/// t,t_over_tbar,kinetic_dev,enstrophy_dev,palinstrophy_dev rows with
/// round-trip-exact numbers.
void write_divergence_csv(std::ostream& os, const DivergenceReport& rep);

/// Short human-readable digest: ids, per-quantity divergence times and
/// maxima, bitwise flag, completion status.
std::string summarize(const DivergenceReport& rep);

} // namespace khdns
