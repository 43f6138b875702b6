#include "khdns/perturb.hpp"

#include "khdns/assembly.hpp"
#include "khdns/mesh.hpp"
#include "khdns/qoi.hpp"
#include "khdns/selforg.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>

namespace khdns {

namespace {

// Diagonal shift and single-backsolve setting of the regularized scenario.
constexpr double kRegularizedShift = 1e-12;

std::string fmt(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

PerturbationSpec PerturbationSpec::none()
{
    return {};
}

PerturbationSpec PerturbationSpec::convection_quadrature(int npts1d)
{
    if (npts1d < 1)
        throw std::invalid_argument("convection quadrature needs >= 1 point");
    PerturbationSpec s;
    s.kind = Kind::convection_quadrature;
    s.quad_npts1d = npts1d;
    return s;
}

PerturbationSpec PerturbationSpec::solver_rtol(double rtol)
{
    if (!(rtol > 0.0))
        throw std::invalid_argument("solver rtol must be positive");
    PerturbationSpec s;
    s.kind = Kind::solver_rtol;
    s.rtol = rtol;
    return s;
}

PerturbationSpec PerturbationSpec::regularized_solve()
{
    PerturbationSpec s;
    s.kind = Kind::regularized_solve;
    return s;
}

PerturbationSpec PerturbationSpec::rounding_noise(double rho,
                                                  std::uint64_t seed)
{
    if (!(rho >= 0.0))
        throw std::invalid_argument("noise amplitude must be >= 0");
    PerturbationSpec s;
    s.kind = Kind::rounding_noise;
    s.amplitude = rho;
    s.seed = seed;
    return s;
}

PerturbationSpec PerturbationSpec::eigenmode_seed(int k1, int k2,
                                                  double amplitude)
{
    if (k1 < 0 || k2 < 1)
        throw std::invalid_argument("eigenmode seed needs k1 >= 0, k2 >= 1");
    if (amplitude == 0.0)
        throw std::invalid_argument("eigenmode seed amplitude must be nonzero");
    PerturbationSpec s;
    s.kind = Kind::eigenmode_seed;
    s.k1 = k1;
    s.k2 = k2;
    s.amplitude = amplitude;
    return s;
}

std::string PerturbationSpec::describe() const
{
    switch (kind) {
    case Kind::none:
        return "none";
    case Kind::convection_quadrature:
        return "convection_quadrature npts1d=" + std::to_string(quad_npts1d);
    case Kind::solver_rtol:
        return "solver_rtol rtol=" + fmt(rtol);
    case Kind::regularized_solve:
        return "regularized_solve shift=" + fmt(kRegularizedShift) +
               " refine=off";
    case Kind::rounding_noise:
        return "rounding_noise rho=" + fmt(amplitude) +
               " seed=" + std::to_string(seed) +
               " (emulated fma/reassociation rounding)";
    case Kind::eigenmode_seed:
        return "eigenmode_seed k1=" + std::to_string(k1) +
               " k2=" + std::to_string(k2) + " amplitude=" + fmt(amplitude);
    }
    return "unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

double rounding_noise_xi(std::uint64_t seed, long step, std::int64_t index)
{
    // Two chained avalanche rounds act as a keyed hash of the triple, so
    // draws never repeat across (step, index) for a fixed seed stream.
    const std::uint64_t a =
        splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(step)));
    const std::uint64_t b = splitmix64(a ^ static_cast<std::uint64_t>(index));
    // Top 53 bits -> [0, 1) on the 2^-53 grid -> [-1, 1).
    return 2.0 * (static_cast<double>(b >> 11) * 0x1.0p-53) - 1.0;
}

void apply_rounding_noise(Vec& v, double rho, std::uint64_t seed, long step)
{
    if (rho == 0.0)
        return;
    for (std::int64_t i = 0; i < v.size(); ++i)
        v[i] *= 1.0 + rho * rounding_noise_xi(seed, step, i);
}

Timestepper::PreStepHook rounding_noise_hook(double rho, std::uint64_t seed)
{
    return [rho, seed](long step, Vec& velocity) {
        apply_rounding_noise(velocity, rho, seed, step);
    };
}

namespace {

void validate(const PairConfig& cfg)
{
    if (cfg.n < 2)
        throw std::invalid_argument("pair needs n >= 2");
    if (cfg.k < 1)
        throw std::invalid_argument("pair needs k >= 1");
    if (!(cfg.dt > 0.0))
        throw std::invalid_argument("pair needs dt > 0");
    if (!(cfg.t_end_tbar > 0.0))
        throw std::invalid_argument("pair needs t_end_tbar > 0");
    if (cfg.sample_stride < 1)
        throw std::invalid_argument("pair needs sample_stride >= 1");
    if (!(cfg.threshold > 0.0))
        throw std::invalid_argument("pair needs threshold > 0");
}

double relative_deviation(double perturbed, double reference)
{
    const double den = std::abs(reference);
    if (den == 0.0)
        return perturbed == reference ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(perturbed - reference) / den;
}

bool bitwise_equal(const Vec& a, const Vec& b)
{
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(),
                       sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

} // namespace

DivergenceReport run_pair(const PairConfig& cfg, const PerturbationSpec& spec)
{
    validate(cfg);

    const StructuredMesh mesh(cfg.n);
    const VelocitySpace sp(mesh, cfg.k, PressureMode::reduced);
    const double nu = cfg.params.nu();
    const double tbar = cfg.params.tbar();
    const long nsteps = std::lround(cfg.t_end_tbar * tbar / cfg.dt);
    if (nsteps < 1)
        throw std::invalid_argument("pair ends before the first step");

    // Shared start state: one constrained L2 projection, one factorization.
    // Every kind perturbs the time loop, not the projection, except the
    // eigenmode seed, which shifts the perturbed start by a projected
    // smooth mode of the domain.
    Vec u0;
    Vec u0_perturbed;
    {
        const SaddleSolver proj(assemble_saddle(sp, 1.0, 0.0, 4.0), sp,
                                cfg.solver);
        u0 = proj.solve(projection_rhs(sp, kh_initial_velocity(cfg.params),
                                       sp.npts_projection()))
                 .head(sp.num_velocity_dofs())
                 .eval();
        u0_perturbed = u0;
        if (spec.kind == PerturbationSpec::Kind::eigenmode_seed) {
            const EigenMode md = make_eigen_mode(
                spec.k1, spec.k2,
                spec.k1 == 0 ? XVariant::cosine : XVariant::sine);
            const TaylorVortex tv(md, nu);
            const Vec mode =
                proj.solve(projection_rhs(sp, tv.initial_velocity(),
                                          sp.npts_projection()))
                    .head(sp.num_velocity_dofs())
                    .eval();
            u0_perturbed += spec.amplitude * mode;
        }
    }

    Timestepper::Options base;
    base.dt = cfg.dt;
    base.nu = nu;
    base.solver = cfg.solver;
    Timestepper::Options varied = base;
    switch (spec.kind) {
    case PerturbationSpec::Kind::convection_quadrature:
        varied.conv_npts1d = spec.quad_npts1d;
        break;
    case PerturbationSpec::Kind::solver_rtol:
        varied.solver.rtol = spec.rtol;
        break;
    case PerturbationSpec::Kind::regularized_solve:
        varied.solver.pressure_shift = kRegularizedShift;
        varied.solver.refine = false;
        break;
    default:
        break;
    }

    Timestepper reference(sp, base);
    Timestepper perturbed(sp, varied);
    reference.set_initial(u0);
    perturbed.set_initial(u0_perturbed);
    if (spec.kind == PerturbationSpec::Kind::rounding_noise)
        perturbed.set_pre_step_hook(
            rounding_noise_hook(spec.amplitude, spec.seed));

    const QoiEvaluator qoi(sp);

    DivergenceReport rep;
    rep.reference_id = PerturbationSpec::none().describe();
    rep.perturbed_id = spec.describe();
    rep.threshold = cfg.threshold;
    rep.tbar = tbar;

    const double horizon = 200.0 * tbar * (1.0 + 1e-12);

    const auto sample = [&](double t) {
        DivergenceSample s;
        s.t = t;
        s.kinetic = relative_deviation(qoi.kinetic_energy(perturbed.velocity()),
                                       qoi.kinetic_energy(reference.velocity()));
        s.enstrophy = relative_deviation(qoi.enstrophy(perturbed.velocity()),
                                         qoi.enstrophy(reference.velocity()));
        s.palinstrophy =
            relative_deviation(qoi.palinstrophy(perturbed.velocity()),
                               qoi.palinstrophy(reference.velocity()));
        rep.samples.push_back(s);

        if (s.kinetic > cfg.threshold && !std::isfinite(rep.t_div_kinetic))
            rep.t_div_kinetic = t;
        if (s.enstrophy > cfg.threshold && !std::isfinite(rep.t_div_enstrophy))
            rep.t_div_enstrophy = t;
        if (s.palinstrophy > cfg.threshold &&
            !std::isfinite(rep.t_div_palinstrophy))
            rep.t_div_palinstrophy = t;
        if (t <= horizon) {
            rep.max_kinetic = std::max(rep.max_kinetic, s.kinetic);
            rep.max_enstrophy = std::max(rep.max_enstrophy, s.enstrophy);
            rep.max_palinstrophy = std::max(rep.max_palinstrophy, s.palinstrophy);
        }
        rep.bitwise_identical =
            rep.bitwise_identical &&
            bitwise_equal(reference.velocity(), perturbed.velocity());
    };

    const auto step_or_fail = [&](Timestepper& ts, const char* which) {
        try {
            ts.step();
        } catch (const std::exception& e) {
            rep.complete = false;
            rep.failure = std::string(which) + " run failed: " + e.what();
            throw PairFailure(rep.failure, rep);
        }
    };

    sample(0.0);
    for (long s = 1; s <= nsteps; ++s) {
        step_or_fail(reference, "reference");
        step_or_fail(perturbed, "perturbed");
        if (s % cfg.sample_stride == 0 || s == nsteps) {
            sample(reference.time());
            if (cfg.stop_after_divergence &&
                std::isfinite(rep.t_div_palinstrophy))
                break;
        }
    }
    return rep;
}

void write_divergence_csv(std::ostream& os, const DivergenceReport& rep)
{
    os << "t,t_over_tbar,kinetic_dev,enstrophy_dev,palinstrophy_dev\n";
    for (const DivergenceSample& s : rep.samples)
        os << fmt(s.t) << ',' << fmt(rep.tbar > 0.0 ? s.t / rep.tbar : 0.0)
           << ',' << fmt(s.kinetic) << ',' << fmt(s.enstrophy) << ','
           << fmt(s.palinstrophy) << '\n';
}

namespace {

std::string fmt_short(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string divergence_line(const char* name, double t_div, double max_dev,
                            double tbar)
{
    std::string line = "  ";
    line += name;
    if (std::isfinite(t_div)) {
        line += ": crossed at t=" + fmt_short(t_div);
        if (tbar > 0.0)
            line += " (" + fmt_short(t_div / tbar) + " tbar)";
    } else {
        line += ": never crossed";
    }
    line += ", max dev " + fmt_short(max_dev) + "\n";
    return line;
}

} // namespace

std::string summarize(const DivergenceReport& rep)
{
    std::string out;
    out += "pair: " + rep.reference_id + " vs " + rep.perturbed_id + "\n";
    out += "threshold " + fmt_short(rep.threshold) +
           " on relative deviation, " + std::to_string(rep.samples.size()) +
           " samples";
    if (!rep.samples.empty()) {
        const double t = rep.samples.back().t;
        out += " to t=" + fmt_short(t);
        if (rep.tbar > 0.0)
            out += " (" + fmt_short(t / rep.tbar) + " tbar)";
    }
    out += "\n";
    out += divergence_line("kinetic energy", rep.t_div_kinetic,
                           rep.max_kinetic, rep.tbar);
    out += divergence_line("enstrophy", rep.t_div_enstrophy,
                           rep.max_enstrophy, rep.tbar);
    out += divergence_line("palinstrophy", rep.t_div_palinstrophy,
                           rep.max_palinstrophy, rep.tbar);
    out += std::string("states bitwise identical: ") +
           (rep.bitwise_identical ? "yes" : "no") + "\n";
    out += rep.complete ? "status: complete\n"
                        : "status: failed (" + rep.failure + ")\n";
    return out;
}

} // namespace khdns
