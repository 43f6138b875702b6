#pragma once

#include "khdns/space.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace khdns {

/// Pseudo-spectral reference solver for the vorticity equation
///
///   w_t + u . grad w = nu Lap w,   u = (psi_y, -psi_x),   -Lap psi = w,
///
/// on the unit square, periodic in x, free-slip at y = 0 and y = 1 (where
/// the vorticity vanishes).  The discretization shares nothing with the
/// finite element solver: the state is the set of modal coefficients
/// w_hat(k1, k2) of
///
///   w(x, y) = sum_{k2=1..m} sum_{k1=-n/2..n/2} w_hat exp(2 pi i k1 x)
///             sin(pi k2 y),
///
/// diffusion is integrated exactly per mode, and the advection term is
/// evaluated pseudo-spectrally on the collocation grid with a 2/3-rule
/// dealiasing mask (kept wavenumbers satisfy 3 k1 < n and 3 k2 < 2 (m+1),
/// so aliased images of quadratic products never land on kept modes).
/// Time stepping is the same two-step IMEX scheme as the main solver:
/// implicit diffusion, extrapolated advection, backward Euler on the
/// first step.
///
/// The uniform part of u1 (the k2 = 0 cosine mode) carries no vorticity
/// and is conserved by the dynamics; it is zero for every field this
/// solver is used with and is not part of the state.
///
/// Everything is deterministic: fixed-size buffers, FFTW_ESTIMATE plans,
/// no threading.
class SpectralOracle {
public:
    /// n: collocation points in x (Fourier modes |k1| <= n/2, n even).
    /// m: sine modes in y; the grid has m+2 rows including the walls.
    SpectralOracle(int n, int m, double nu, double dt);
    ~SpectralOracle();
    SpectralOracle(const SpectralOracle&) = delete;
    SpectralOracle& operator=(const SpectralOracle&) = delete;

    /// Sample w0 on the grid and take the trigonometric interpolant as the
    /// initial state (no dealiasing mask is applied to the state itself).
    /// Resets the clock and the multistep history.  Returns the relative
    /// L2 interpolation error, measured against w0 on a doubled grid; it is
    /// exactly 0 for band-limited fields and quantifies the spectral
    /// truncation otherwise.
    double set_initial(const AnalyticScalar& w0);

    void step();
    void advance(int nsteps);

    double time() const { return time_; }
    double dt() const { return dt_; }
    double nu() const { return nu_; }
    int n() const { return n_; }
    int m() const { return m_; }

    /// Modal coefficient for k1 in [-n/2, n/2], k2 in [1, m].  The field
    /// is real, so coefficient(-k1, k2) == conj(coefficient(k1, k2)).
    std::complex<double> coefficient(int k1, int k2) const;

    /// Modal Parseval sums; mult(k1) counts the conjugate pair once:
    ///   K = 1/4 sum mult |w_hat|^2 / lambda,   E = 1/4 sum mult |w_hat|^2,
    ///   P = 1/4 sum mult lambda |w_hat|^2,
    /// with lambda(k1, k2) = 4 pi^2 k1^2 + pi^2 k2^2 the Laplace eigenvalue.
    double kinetic_energy() const;
    double enstrophy() const;
    double palinstrophy() const;

    /// Kinetic energy by quadrature of the sampled velocity: x-mean times
    /// trapezoid in y, which is exact for the sampled band (cross-checks
    /// the modal sum against the grid transforms).
    double grid_kinetic_energy() const;

    /// 2 u_ref / max over lines of |x-averaged vorticity|, the x-average
    /// evaluated on nlines horizontal lines equidistant in [0,1] including
    /// the walls (same definition as the finite element evaluator).
    double vorticity_thickness(double u_ref = 1.0, int nlines = 1024) const;

    /// Sampled fields on the (m+2) x n grid, row-major with y outermost:
    /// entry [j*n + i] is the value at (x, y) = (i/n, j/(m+1)).
    void vorticity_grid(std::vector<double>& w) const;
    void velocity_grid(std::vector<double>& u1, std::vector<double>& u2) const;

private:
    struct Plans;
    using Cvec = std::vector<std::complex<double>>;

    /// u . grad w of the masked state, analyzed back to (masked) modes.
    void compute_nonlinear(const Cvec& w, Cvec& out) const;
    /// Fill the staging buffer with scale * w_hat (or zero where masked)
    /// and transform to the grid in gsyn_.  The y parity is sine unless
    /// cosine == true; scale may depend on the mode.
    template <class Scale>
    void synthesize(const Cvec& w, bool cosine, bool masked, Scale scale) const;
    void analyze(Cvec& out) const; ///< sine-analyze gwork_, mask, scale

    int n_, m_, nc_;        ///< nc_ = n_/2 + 1 complex columns per row
    int kmax1_, kmax2_;     ///< dealiasing cutoffs
    double nu_, dt_;
    double time_ = 0.0;
    long nsteps_ = 0;

    std::vector<double> lam_;   ///< Laplace eigenvalue per stored mode
    Cvec coef_, coef_prev_;     ///< state and previous step
    Cvec nl_, nl_prev_, scratch_;
    mutable Cvec cbuf_;               ///< (m+2) x nc staging spectrum
    mutable std::vector<double> gsyn_; ///< (m+2) x n synthesis target
    mutable std::vector<double> gfac_, gwork_; ///< factor / product grids
    std::unique_ptr<Plans> plans_;
};

} // namespace khdns
