#pragma once

#include "khdns/space.hpp"

#include <vector>

namespace khdns {

/// One time sample of the scalar flow diagnostics.
struct QoiRecord {
    double t = 0.0;
    double kinetic_energy = 0.0;
    double enstrophy = 0.0;
    double palinstrophy = 0.0;
    double delta_ratio = 0.0; ///< vorticity thickness over its initial value
    double eps_int = 0.0;     ///< integrated numerical dissipation
    double eps_rel = 0.0;     ///< eps_int relative to the kinetic energy loss
};

/// Longitudinal spectrum of u1; energy.size() == nsamples/2 + 1 and the
/// index is the integer wavenumber.
struct SpectrumRecord {
    double t = 0.0;
    std::vector<double> energy;
};

/// x-averaged mean and RMS of u1 on the horizontal sample lines.
struct ProfileRecord {
    double t = 0.0;
    std::vector<double> y;
    std::vector<double> mean_u1;
    std::vector<double> rms_u1;
};

/// Flow diagnostics of a velocity coefficient vector.
///
/// The L2 functionals (energy, enstrophy, palinstrophy) use element
/// quadrature that integrates the squared fields exactly; derivatives are
/// broken (element-wise).  The line diagnostics use `nlines` horizontal
/// lines, equidistant in [0,1] including both walls.  On each line the
/// x-average of the vorticity is a composite Gauss quadrature (exact per
/// cell), while profiles and spectra use `nsamples` equidistant point
/// samples of u1, matching the arithmetic-average definition of those
/// observables; nsamples must be a multiple of the mesh extent.
class QoiEvaluator {
public:
    explicit QoiEvaluator(const VelocitySpace& sp, int nlines = 1024,
                          int nsamples = 1024);

    double kinetic_energy(const Vec& u) const;
    double enstrophy(const Vec& u) const;
    double palinstrophy(const Vec& u) const;

    /// 2 u_ref / max over lines of |x-averaged vorticity|.  Throws
    /// std::domain_error when the mean vorticity vanishes on every line.
    double vorticity_thickness(const Vec& u, double u_ref = 1.0) const;

    ProfileRecord profile(const Vec& u, double t) const;
    SpectrumRecord spectrum(const Vec& u, double t) const;

    int num_lines() const { return nlines_; }
    int num_samples() const { return nsamples_; }
    double line_y(int j) const { return line_y_[j]; }

private:
    void sample_u1_line(const Vec& u, double y, double* out) const;

    const VelocitySpace* sp_;
    int nlines_;
    int nsamples_;
    std::vector<double> line_y_;
    std::vector<double> sample_xhat_; ///< in-cell sample abscissae
    Rule1D line_rule_;                ///< per-cell rule for the vorticity mean
};

/// Deviation of a sampled trajectory from the continuous energy balance
/// dK/dt = -2 nu E:
///   eps_int(t_m) = |K(t_0) - K(t_m) - 2 nu int_{t_0}^{t_m} E dtau|
/// with the integral by composite trapezoid over the samples, and
/// eps_rel = eps_int / (K(t_0) - K(t_m)) (zero where the loss is zero).
struct DissipationSeries {
    std::vector<double> eps_int;
    std::vector<double> eps_rel;
};
DissipationSeries numerical_dissipation(const std::vector<double>& t,
                                        const std::vector<double>& kinetic,
                                        const std::vector<double>& enstrophy,
                                        double nu);

} // namespace khdns
