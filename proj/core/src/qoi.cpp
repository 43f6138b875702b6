#include "khdns/qoi.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace khdns {

namespace {

void gather(const VelocitySpace& sp, const Vec& u, int eid, Vec& c)
{
    const auto& map = sp.element_dofs(eid);
    for (int l = 0; l < sp.ldim(); ++l)
        c[l] = u[map[l]];
}

} // namespace

QoiEvaluator::QoiEvaluator(const VelocitySpace& sp, int nlines, int nsamples)
    : sp_(&sp), nlines_(nlines), nsamples_(nsamples)
{
    if (nlines < 2)
        throw std::invalid_argument("QoiEvaluator: need at least two lines");
    const int n = sp.mesh().n();
    if (nsamples < 2 || nsamples % n != 0)
        throw std::invalid_argument(
            "QoiEvaluator: nsamples must be a positive multiple of the mesh "
            "extent");
    line_y_.resize(nlines);
    for (int j = 0; j < nlines; ++j)
        line_y_[j] = static_cast<double>(j) / (nlines - 1);
    const int per_cell = nsamples / n;
    sample_xhat_.resize(per_cell);
    for (int q = 0; q < per_cell; ++q)
        sample_xhat_[q] = static_cast<double>(q) / per_cell;
    // The x-averaged vorticity is a polynomial of degree k+1 per cell.
    line_rule_ = gauss_rule(points_for_order(sp.k() + 1));
}

double QoiEvaluator::kinetic_energy(const Vec& u) const
{
    const auto& t = sp_->tables(sp_->npts_exact());
    Vec c(sp_->ldim()), ux, uy;
    double acc = 0.0;
    for (int e = 0; e < sp_->mesh().num_elements(); ++e) {
        gather(*sp_, u, e, c);
        ux.noalias() = t.vx * c;
        uy.noalias() = t.vy * c;
        acc += t.wvol.dot(ux.cwiseAbs2() + uy.cwiseAbs2());
    }
    return 0.5 * acc;
}

double QoiEvaluator::enstrophy(const Vec& u) const
{
    const auto& t = sp_->tables(sp_->npts_exact());
    Vec c(sp_->ldim()), w;
    double acc = 0.0;
    for (int e = 0; e < sp_->mesh().num_elements(); ++e) {
        gather(*sp_, u, e, c);
        w.noalias() = t.curl * c;
        acc += t.wvol.dot(w.cwiseAbs2());
    }
    return 0.5 * acc;
}

double QoiEvaluator::palinstrophy(const Vec& u) const
{
    const auto& t = sp_->tables(sp_->npts_exact());
    Vec c(sp_->ldim()), gx, gy;
    double acc = 0.0;
    for (int e = 0; e < sp_->mesh().num_elements(); ++e) {
        gather(*sp_, u, e, c);
        gx.noalias() = t.cgx * c;
        gy.noalias() = t.cgy * c;
        acc += t.wvol.dot(gx.cwiseAbs2() + gy.cwiseAbs2());
    }
    return 0.5 * acc;
}

double QoiEvaluator::vorticity_thickness(const Vec& u, double u_ref) const
{
    const StructuredMesh& mesh = sp_->mesh();
    const int n = mesh.n();
    const int k = sp_->k();
    Vec c(sp_->ldim()), wq, vb;
    double worst = 0.0;
    double vint = 0.0; // integrated |u1| bound, anchors the roundoff floor
    for (int j = 0; j < nlines_; ++j) {
        const auto lt = sp_->build_line_tables(line_y_[j], line_rule_.x);
        double mean = 0.0, vabs = 0.0;
        for (int i = 0; i < n; ++i) {
            gather(*sp_, u, mesh.element_id(i, lt.row), c);
            wq.noalias() = lt.curl * c;
            vb.noalias() = lt.valx.cwiseAbs() * c.cwiseAbs();
            for (int q = 0; q < line_rule_.size(); ++q) {
                mean += line_rule_.w[q] * wq[q];
                vabs += line_rule_.w[q] * vb[q];
            }
        }
        mean *= mesh.h(); // per-cell averages -> integral over x
        worst = std::max(worst, std::abs(mean));
        vint = std::max(vint, vabs * mesh.h());
    }
    // The broken curl of a velocity this size carries roundoff of order
    // eps * |u| * (k+1)^2 / h (inverse estimate); a mean vorticity far
    // below that is indistinguishable from an identically zero average.
    const double floor =
        1e-10 * vint * static_cast<double>((k + 1) * (k + 1)) * n;
    if (worst <= floor)
        throw std::domain_error(
            "vorticity_thickness: mean vorticity vanishes on every line");
    return 2.0 * u_ref / worst;
}

void QoiEvaluator::sample_u1_line(const Vec& u, double y, double* out) const
{
    const StructuredMesh& mesh = sp_->mesh();
    const int n = mesh.n();
    const int per_cell = nsamples_ / n;
    const auto lt = sp_->build_line_tables(y, sample_xhat_);
    Vec c(sp_->ldim()), vals;
    for (int i = 0; i < n; ++i) {
        gather(*sp_, u, mesh.element_id(i, lt.row), c);
        vals.noalias() = lt.valx * c;
        for (int q = 0; q < per_cell; ++q)
            out[i * per_cell + q] = vals[q];
    }
}

ProfileRecord QoiEvaluator::profile(const Vec& u, double t) const
{
    ProfileRecord rec;
    rec.t = t;
    rec.y = line_y_;
    rec.mean_u1.resize(nlines_);
    rec.rms_u1.resize(nlines_);
    std::vector<double> s(nsamples_);
    for (int j = 0; j < nlines_; ++j) {
        sample_u1_line(u, line_y_[j], s.data());
        double mean = 0.0;
        for (double v : s)
            mean += v;
        mean /= nsamples_;
        double var = 0.0;
        for (double v : s)
            var += (v - mean) * (v - mean);
        rec.mean_u1[j] = mean;
        rec.rms_u1[j] = std::sqrt(var / nsamples_);
    }
    return rec;
}

SpectrumRecord QoiEvaluator::spectrum(const Vec& u, double t) const
{
    const int N = nsamples_;
    const int nk = N / 2 + 1;
    SpectrumRecord rec;
    rec.t = t;
    rec.energy.assign(nk, 0.0);

    double* in = fftw_alloc_real(N);
    fftw_complex* out = fftw_alloc_complex(nk);
    fftw_plan plan =
        fftw_plan_dft_r2c_1d(N, in, out, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);

    // Trapezoid in y over the lines; |u^(kappa)|^2 with the 1/N transform
    // normalization (the kappa=1 coefficient of cos(2 pi x) is 1/2).
    const double dy = 1.0 / (nlines_ - 1);
    for (int j = 0; j < nlines_; ++j) {
        const double wy = (j == 0 || j == nlines_ - 1) ? 0.5 * dy : dy;
        sample_u1_line(u, line_y_[j], in);
        fftw_execute(plan);
        for (int kk = 0; kk < nk; ++kk) {
            const double re = out[kk][0] / N, im = out[kk][1] / N;
            rec.energy[kk] += wy * (re * re + im * im);
        }
    }
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
    return rec;
}

DissipationSeries numerical_dissipation(const std::vector<double>& t,
                                        const std::vector<double>& kinetic,
                                        const std::vector<double>& enstrophy,
                                        double nu)
{
    const size_t m = t.size();
    if (kinetic.size() != m || enstrophy.size() != m)
        throw std::invalid_argument(
            "numerical_dissipation: series length mismatch");
    DissipationSeries out;
    out.eps_int.resize(m);
    out.eps_rel.resize(m);
    double integral = 0.0;
    for (size_t i = 0; i < m; ++i) {
        if (i > 0)
            integral +=
                0.5 * (enstrophy[i] + enstrophy[i - 1]) * (t[i] - t[i - 1]);
        const double loss = kinetic[0] - kinetic[i];
        const double eps = std::abs(loss - 2.0 * nu * integral);
        out.eps_int[i] = eps;
        out.eps_rel[i] = loss != 0.0 ? eps / std::abs(loss) : 0.0;
    }
    return out;
}

} // namespace khdns
