#include "khdns/spectral_oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace khdns {

namespace {
constexpr double PI = 3.14159265358979323846;

/// Largest K with 3K < limit (strict: aliased quadratic products then fall
/// outside the kept band in both the periodic and the reflected direction).
int two_thirds_cutoff(int limit) { return (limit - 1) / 3; }
} // namespace

/// FFTW plans.  All transforms are bound to the fixed member buffers:
///  - y_sin_c / y_cos_c: DST-I / DCT-I down the columns of cbuf_ (complex
///    data as interleaved real pairs), mapping sine/cosine coefficients in
///    rows 1..m to point values on the interior/full rows.
///  - c2r: complex-to-real rows of cbuf_ into gsyn_.
///  - y_sin_g: in-place DST-I down the interior columns of gwork_.
///  - r2c: real-to-complex interior rows of gwork_ into cbuf_.
struct SpectralOracle::Plans {
    fftw_plan y_sin_c = nullptr;
    fftw_plan y_cos_c = nullptr;
    fftw_plan c2r = nullptr;
    fftw_plan y_sin_g = nullptr;
    fftw_plan r2c = nullptr;

    ~Plans()
    {
        for (fftw_plan p : {y_sin_c, y_cos_c, c2r, y_sin_g, r2c})
            if (p)
                fftw_destroy_plan(p);
    }
};

SpectralOracle::SpectralOracle(int n, int m, double nu, double dt)
    : n_(n), m_(m), nc_(n / 2 + 1), kmax1_(two_thirds_cutoff(n)),
      kmax2_(std::min(m, two_thirds_cutoff(2 * (m + 1)))), nu_(nu), dt_(dt)
{
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("SpectralOracle: n must be even and >= 4");
    if (m < 1)
        throw std::invalid_argument("SpectralOracle: m must be positive");
    if (nu < 0.0)
        throw std::invalid_argument("SpectralOracle: negative viscosity");
    if (dt <= 0.0)
        throw std::invalid_argument("SpectralOracle: non-positive time step");

    const std::size_t nmodes = static_cast<std::size_t>(m_) * nc_;
    lam_.resize(nmodes);
    for (int k2 = 1; k2 <= m_; ++k2)
        for (int k1 = 0; k1 < nc_; ++k1)
            lam_[static_cast<std::size_t>(k2 - 1) * nc_ + k1] =
                PI * PI * (4.0 * k1 * k1 + static_cast<double>(k2) * k2);
    coef_.assign(nmodes, {});
    coef_prev_.assign(nmodes, {});
    nl_.assign(nmodes, {});
    nl_prev_.assign(nmodes, {});
    scratch_.assign(nmodes, {});
    cbuf_.assign(static_cast<std::size_t>(m_ + 2) * nc_, {});
    gsyn_.assign(static_cast<std::size_t>(m_ + 2) * n_, 0.0);
    gfac_.assign(gsyn_.size(), 0.0);
    gwork_.assign(gsyn_.size(), 0.0);

    // Plans are created once against these buffers; the vectors are never
    // resized afterwards, so the data pointers stay valid.
    plans_ = std::make_unique<Plans>();
    double* cre = reinterpret_cast<double*>(cbuf_.data());
    auto* cfw = reinterpret_cast<fftw_complex*>(cbuf_.data());
    const fftw_r2r_kind sin_kind[] = {FFTW_RODFT00};
    const fftw_r2r_kind cos_kind[] = {FFTW_REDFT00};
    int len = m_;
    plans_->y_sin_c =
        fftw_plan_many_r2r(1, &len, 2 * nc_, cre + 2 * nc_, nullptr, 2 * nc_,
                           1, cre + 2 * nc_, nullptr, 2 * nc_, 1, sin_kind,
                           FFTW_ESTIMATE);
    len = m_ + 2;
    plans_->y_cos_c = fftw_plan_many_r2r(1, &len, 2 * nc_, cre, nullptr,
                                         2 * nc_, 1, cre, nullptr, 2 * nc_, 1,
                                         cos_kind, FFTW_ESTIMATE);
    len = n_;
    plans_->c2r =
        fftw_plan_many_dft_c2r(1, &len, m_ + 2, cfw, nullptr, 1, nc_,
                               gsyn_.data(), nullptr, 1, n_, FFTW_ESTIMATE);
    len = m_;
    plans_->y_sin_g = fftw_plan_many_r2r(
        1, &len, n_, gwork_.data() + n_, nullptr, n_, 1, gwork_.data() + n_,
        nullptr, n_, 1, sin_kind, FFTW_ESTIMATE);
    len = n_;
    plans_->r2c = fftw_plan_many_dft_r2c(1, &len, m_, gwork_.data() + n_,
                                         nullptr, 1, n_, cfw + nc_, nullptr, 1,
                                         nc_, FFTW_ESTIMATE);
}

SpectralOracle::~SpectralOracle() = default;

template <class Scale>
void SpectralOracle::synthesize(const Cvec& w, bool cosine, bool masked,
                                Scale scale) const
{
    // Stage half the (scaled) coefficients: both DST-I and DCT-I produce
    // 2 sum c_k sin/cos, and the wall rows are the zero DCT-I endpoints.
    std::fill(cbuf_.begin(), cbuf_.end(), std::complex<double>{});
    const int k2hi = masked ? kmax2_ : m_;
    const int k1hi = masked ? std::min(kmax1_, nc_ - 1) : nc_ - 1;
    for (int k2 = 1; k2 <= k2hi; ++k2) {
        const std::complex<double>* src = w.data() + (k2 - 1) * nc_;
        std::complex<double>* dst = cbuf_.data() + k2 * nc_;
        for (int k1 = 0; k1 <= k1hi; ++k1)
            dst[k1] = 0.5 * scale(k1, k2) * src[k1];
    }
    fftw_execute(cosine ? plans_->y_cos_c : plans_->y_sin_c);
    fftw_execute(plans_->c2r);
}

void SpectralOracle::analyze(Cvec& out) const
{
    fftw_execute(plans_->y_sin_g);
    fftw_execute(plans_->r2c);
    // DST-I contributes (m+1), the DFT contributes n.
    const double s = 1.0 / (static_cast<double>(n_) * (m_ + 1));
    for (int k2 = 1; k2 <= m_; ++k2) {
        const std::complex<double>* src = cbuf_.data() + k2 * nc_;
        std::complex<double>* dst = out.data() + (k2 - 1) * nc_;
        for (int k1 = 0; k1 < nc_; ++k1)
            dst[k1] = (k1 <= kmax1_ && k2 <= kmax2_)
                          ? s * src[k1]
                          : std::complex<double>{};
    }
}

void SpectralOracle::compute_nonlinear(const Cvec& w, Cvec& out) const
{
    const auto* lam = lam_.data();
    const int nc = nc_;
    // u1 = psi_y (cosine series), against w_x (sine series) ...
    synthesize(w, true, true, [lam, nc](int k1, int k2) {
        return std::complex<double>{PI * k2 / lam[(k2 - 1) * nc + k1], 0.0};
    });
    gfac_ = gsyn_;
    synthesize(w, false, true, [](int k1, int) {
        return std::complex<double>{0.0, 2.0 * PI * k1};
    });
    for (std::size_t i = 0; i < gwork_.size(); ++i)
        gwork_[i] = gfac_[i] * gsyn_[i];
    // ... plus u2 = -psi_x (sine) against w_y (cosine).
    synthesize(w, false, true, [lam, nc](int k1, int k2) {
        return std::complex<double>{0.0,
                                    -2.0 * PI * k1 / lam[(k2 - 1) * nc + k1]};
    });
    gfac_ = gsyn_;
    synthesize(w, true, true, [](int, int k2) {
        return std::complex<double>{PI * k2, 0.0};
    });
    for (std::size_t i = 0; i < gwork_.size(); ++i)
        gwork_[i] += gfac_[i] * gsyn_[i];
    analyze(out);
}

double SpectralOracle::set_initial(const AnalyticScalar& w0)
{
    for (int j = 1; j <= m_; ++j) {
        const double y = static_cast<double>(j) / (m_ + 1);
        for (int i = 0; i < n_; ++i)
            gwork_[static_cast<std::size_t>(j) * n_ + i] =
                w0(static_cast<double>(i) / n_, y);
    }
    fftw_execute(plans_->y_sin_g);
    fftw_execute(plans_->r2c);
    const double s = 1.0 / (static_cast<double>(n_) * (m_ + 1));
    for (int k2 = 1; k2 <= m_; ++k2)
        for (int k1 = 0; k1 < nc_; ++k1)
            coef_[static_cast<std::size_t>(k2 - 1) * nc_ + k1] =
                s * cbuf_[static_cast<std::size_t>(k2) * nc_ + k1];
    time_ = 0.0;
    nsteps_ = 0;

    // Interpolation error against w0 on a doubled grid (whose points
    // contain this grid's points).  The coarse state is zero-padded and
    // resynthesized there; the x-Nyquist coefficient stands for the
    // +/- n/2 pair and is split when it becomes an ordinary fine mode.
    const int fn = 2 * n_, fm = 2 * m_ + 1, fnc = fn / 2 + 1;
    Cvec fc(static_cast<std::size_t>(fm + 2) * fnc);
    std::vector<double> fg(static_cast<std::size_t>(fm + 2) * fn);
    double* fre = reinterpret_cast<double*>(fc.data());
    const fftw_r2r_kind sin_kind[] = {FFTW_RODFT00};
    fftw_plan fsin =
        fftw_plan_many_r2r(1, &fm, 2 * fnc, fre + 2 * fnc, nullptr, 2 * fnc,
                           1, fre + 2 * fnc, nullptr, 2 * fnc, 1, sin_kind,
                           FFTW_ESTIMATE);
    fftw_plan fc2r = fftw_plan_many_dft_c2r(
        1, &fn, fm + 2, reinterpret_cast<fftw_complex*>(fc.data()), nullptr,
        1, fnc, fg.data(), nullptr, 1, fn, FFTW_ESTIMATE);
    for (int k2 = 1; k2 <= m_; ++k2)
        for (int k1 = 0; k1 < nc_; ++k1)
            fc[static_cast<std::size_t>(k2) * fnc + k1] =
                (2 * k1 == n_ ? 0.25 : 0.5) *
                coef_[static_cast<std::size_t>(k2 - 1) * nc_ + k1];
    fftw_execute(fsin);
    fftw_execute(fc2r);
    fftw_destroy_plan(fsin);
    fftw_destroy_plan(fc2r);

    double num = 0.0, den = 0.0;
    for (int j = 0; j <= fm + 1; ++j) {
        const double wy = (j == 0 || j == fm + 1) ? 0.5 : 1.0;
        const double y = static_cast<double>(j) / (fm + 1);
        for (int i = 0; i < fn; ++i) {
            const double ex = w0(static_cast<double>(i) / fn, y);
            const double d = fg[static_cast<std::size_t>(j) * fn + i] - ex;
            num += wy * d * d;
            den += wy * ex * ex;
        }
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

void SpectralOracle::step()
{
    compute_nonlinear(coef_, nl_);
    const std::size_t nmodes = coef_.size();
    if (nsteps_ == 0) {
        for (std::size_t i = 0; i < nmodes; ++i)
            scratch_[i] =
                (coef_[i] - dt_ * nl_[i]) / (1.0 + dt_ * nu_ * lam_[i]);
    } else {
        const double c = 2.0 * dt_ / 3.0;
        for (std::size_t i = 0; i < nmodes; ++i)
            scratch_[i] = ((4.0 * coef_[i] - coef_prev_[i]) / 3.0 -
                           c * (2.0 * nl_[i] - nl_prev_[i])) /
                          (1.0 + c * nu_ * lam_[i]);
    }
    coef_prev_.swap(coef_);
    coef_.swap(scratch_);
    nl_prev_.swap(nl_);
    ++nsteps_;
    time_ = static_cast<double>(nsteps_) * dt_;
}

void SpectralOracle::advance(int nsteps)
{
    for (int i = 0; i < nsteps; ++i)
        step();
}

std::complex<double> SpectralOracle::coefficient(int k1, int k2) const
{
    if (k2 < 1 || k2 > m_ || std::abs(k1) > n_ / 2)
        throw std::out_of_range("SpectralOracle::coefficient: mode index");
    const std::complex<double> c =
        coef_[static_cast<std::size_t>(k2 - 1) * nc_ + std::abs(k1)];
    return k1 >= 0 ? c : std::conj(c);
}

namespace {
double pair_multiplicity(int k1, int n) { return (k1 == 0 || 2 * k1 == n) ? 1.0 : 2.0; }
} // namespace

double SpectralOracle::kinetic_energy() const
{
    double sum = 0.0;
    for (int k2 = 1; k2 <= m_; ++k2)
        for (int k1 = 0; k1 < nc_; ++k1) {
            const std::size_t i = static_cast<std::size_t>(k2 - 1) * nc_ + k1;
            sum += pair_multiplicity(k1, n_) * std::norm(coef_[i]) / lam_[i];
        }
    return 0.25 * sum;
}

double SpectralOracle::enstrophy() const
{
    double sum = 0.0;
    for (int k2 = 1; k2 <= m_; ++k2)
        for (int k1 = 0; k1 < nc_; ++k1)
            sum += pair_multiplicity(k1, n_) *
                   std::norm(coef_[static_cast<std::size_t>(k2 - 1) * nc_ + k1]);
    return 0.25 * sum;
}

double SpectralOracle::palinstrophy() const
{
    double sum = 0.0;
    for (int k2 = 1; k2 <= m_; ++k2)
        for (int k1 = 0; k1 < nc_; ++k1) {
            const std::size_t i = static_cast<std::size_t>(k2 - 1) * nc_ + k1;
            sum += pair_multiplicity(k1, n_) * std::norm(coef_[i]) * lam_[i];
        }
    return 0.25 * sum;
}

double SpectralOracle::grid_kinetic_energy() const
{
    const auto* lam = lam_.data();
    const int nc = nc_;
    synthesize(coef_, true, false, [lam, nc](int k1, int k2) {
        return std::complex<double>{PI * k2 / lam[(k2 - 1) * nc + k1], 0.0};
    });
    gfac_ = gsyn_;
    synthesize(coef_, false, false, [lam, nc](int k1, int k2) {
        return std::complex<double>{0.0,
                                    -2.0 * PI * k1 / lam[(k2 - 1) * nc + k1]};
    });
    double sum = 0.0;
    for (int j = 0; j <= m_ + 1; ++j) {
        const double wy = (j == 0 || j == m_ + 1) ? 0.5 : 1.0;
        const double* a = gfac_.data() + static_cast<std::size_t>(j) * n_;
        const double* b = gsyn_.data() + static_cast<std::size_t>(j) * n_;
        for (int i = 0; i < n_; ++i)
            sum += wy * (a[i] * a[i] + b[i] * b[i]);
    }
    return 0.5 * sum / (static_cast<double>(n_) * (m_ + 1));
}

double SpectralOracle::vorticity_thickness(double u_ref, int nlines) const
{
    if (nlines < 2)
        throw std::invalid_argument("vorticity_thickness: nlines too small");
    // The x-average keeps only the k1 = 0 column (real up to roundoff).
    double worst = 0.0;
    for (int l = 0; l < nlines; ++l) {
        const double y = static_cast<double>(l) / (nlines - 1);
        double mean = 0.0;
        for (int k2 = 1; k2 <= m_; ++k2)
            mean += coef_[static_cast<std::size_t>(k2 - 1) * nc_].real() *
                    std::sin(PI * k2 * y);
        worst = std::max(worst, std::abs(mean));
    }
    if (worst <= 0.0)
        throw std::domain_error(
            "vorticity_thickness: mean vorticity vanishes on every line");
    return 2.0 * u_ref / worst;
}

void SpectralOracle::vorticity_grid(std::vector<double>& w) const
{
    synthesize(coef_, false, false,
               [](int, int) { return std::complex<double>{1.0, 0.0}; });
    w.assign(gsyn_.begin(), gsyn_.end());
}

void SpectralOracle::velocity_grid(std::vector<double>& u1,
                                   std::vector<double>& u2) const
{
    const auto* lam = lam_.data();
    const int nc = nc_;
    synthesize(coef_, true, false, [lam, nc](int k1, int k2) {
        return std::complex<double>{PI * k2 / lam[(k2 - 1) * nc + k1], 0.0};
    });
    u1.assign(gsyn_.begin(), gsyn_.end());
    synthesize(coef_, false, false, [lam, nc](int k1, int k2) {
        return std::complex<double>{0.0,
                                    -2.0 * PI * k1 / lam[(k2 - 1) * nc + k1]};
    });
    u2.assign(gsyn_.begin(), gsyn_.end());
}

} // namespace khdns
