#include "khdns/space.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace khdns {

namespace {

/// 1D family evaluations at a single point.
struct Fam {
    double nod_v[2];
    double nod_d[2];
    std::vector<double> leg_v, leg_d, leg_d2;
    std::vector<double> bub_v;
};

Fam fam_eval(double t, int k)
{
    Fam f;
    f.nod_v[0] = 1.0 - t;
    f.nod_v[1] = t;
    f.nod_d[0] = -1.0;
    f.nod_d[1] = 1.0;
    f.leg_v.resize(k + 1);
    f.leg_d.resize(k + 1);
    f.leg_d2.resize(k + 1);
    legendre_eval2(t, k, f.leg_v.data(), f.leg_d.data(), f.leg_d2.data());
    f.bub_v.resize(std::max(k, 1));
    if (k >= 1)
        bubble_eval(t, k, f.bub_v.data(), nullptr);
    return f;
}

/// Value, first and second derivative of family member (fam, idx).
/// Bubbles use b_m' = P~_m, b_m'' = P~_m'.
inline void fam_get(const Fam& f, int fam, int idx, double& v, double& d,
                    double& d2)
{
    switch (fam) {
    case 0:
        v = f.nod_v[idx];
        d = f.nod_d[idx];
        d2 = 0.0;
        break;
    case 1:
        v = f.leg_v[idx];
        d = f.leg_d[idx];
        d2 = f.leg_d2[idx];
        break;
    default:
        v = f.bub_v[idx - 1];
        d = f.leg_v[idx];
        d2 = f.leg_d[idx];
        break;
    }
}

struct FullPoint {
    // Per full dof: values and derivatives of both components.
    std::vector<double> vx, vy, dxx, dyx, dxy, dyy, div, curl, cgx, cgy;
};

/// Evaluate the full (untransformed) local basis at one reference point.
void eval_full(const std::vector<std::array<int, 5>>& dofs, int k, double xh,
               double yh, FullPoint& out)
{
    const Fam fx = fam_eval(xh, k);
    const Fam fy = fam_eval(yh, k);
    const int nd = static_cast<int>(dofs.size());
    out.vx.assign(nd, 0.0);
    out.vy.assign(nd, 0.0);
    out.dxx.assign(nd, 0.0);
    out.dyx.assign(nd, 0.0);
    out.dxy.assign(nd, 0.0);
    out.dyy.assign(nd, 0.0);
    out.div.assign(nd, 0.0);
    out.curl.assign(nd, 0.0);
    out.cgx.assign(nd, 0.0);
    out.cgy.assign(nd, 0.0);
    for (int i = 0; i < nd; ++i) {
        const auto& d = dofs[i];
        double fv, fd, fd2, gv, gd, gd2;
        fam_get(fx, d[1], d[2], fv, fd, fd2);
        fam_get(fy, d[3], d[4], gv, gd, gd2);
        const double val = fv * gv;
        if (d[0] == 0) {
            out.vx[i] = val;
            out.dxx[i] = fd * gv;
            out.dyx[i] = fv * gd;
            out.div[i] = fd * gv;
            out.curl[i] = -fv * gd;
            out.cgx[i] = -fd * gd;
            out.cgy[i] = -fv * gd2;
        } else {
            out.vy[i] = val;
            out.dxy[i] = fd * gv;
            out.dyy[i] = fv * gd;
            out.div[i] = fv * gd;
            out.curl[i] = fd * gv;
            out.cgx[i] = fd2 * gv;
            out.cgy[i] = fd * gd;
        }
    }
}

} // namespace

VelocitySpace::VelocitySpace(const StructuredMesh& mesh, int k,
                             PressureMode mode)
    : mesh_(&mesh), k_(k), mode_(mode)
{
    if (k < 1 || k > 8)
        throw std::invalid_argument("VelocitySpace: order k must be in 1..8");

    fdim_ = 2 * (k + 1) * (k + 2);
    if (mode == PressureMode::full) {
        nbub_ = 2 * k * (k + 1);
        npres_ = (k + 1) * (k + 1);
    } else {
        nbub_ = k * k;
        npres_ = 1;
    }
    ldim_ = 4 * (k + 1) + nbub_;

    // Full local dof enumeration; facet moments first, in the order
    // {L, R, B, T}, then x bubbles, then y bubbles.
    full_dofs_.reserve(fdim_);
    for (int j = 0; j <= k; ++j)
        full_dofs_.push_back({0, 0, 0, 1, j}); // L: (1-x) P~_j(y)
    for (int j = 0; j <= k; ++j)
        full_dofs_.push_back({0, 0, 1, 1, j}); // R: x P~_j(y)
    for (int i = 0; i <= k; ++i)
        full_dofs_.push_back({1, 1, i, 0, 0}); // B: P~_i(x) (1-y)
    for (int i = 0; i <= k; ++i)
        full_dofs_.push_back({1, 1, i, 0, 1}); // T: P~_i(x) y
    for (int m = 1; m <= k; ++m)
        for (int j = 0; j <= k; ++j)
            full_dofs_.push_back({0, 2, m, 1, j}); // b_m(x) P~_j(y)
    for (int m = 1; m <= k; ++m)
        for (int i = 0; i <= k; ++i)
            full_dofs_.push_back({1, 1, i, 2, m}); // P~_i(x) b_m(y)

    build_transform();
    tcols_.resize(ldim_);
    for (int l = 0; l < ldim_; ++l)
        for (int f = 0; f < fdim_; ++f)
            if (transform_(f, l) != 0.0)
                tcols_[l].push_back({f, transform_(f, l)});

    const int nfac = mesh.num_facets();
    const int nel = mesh.num_elements();
    nvel_ = nfac * (k_ + 1) + nel * nbub_;
    npres_total_ = nel * npres_;

    elem_dofs_.resize(nel);
    const int bub_base = nfac * (k_ + 1);
    for (int e = 0; e < nel; ++e) {
        auto& map = elem_dofs_[e];
        map.reserve(ldim_);
        const auto fids = mesh.element_facets(e);
        for (int s = 0; s < 4; ++s)
            for (int m = 0; m <= k_; ++m)
                map.push_back(facet_dof(fids[s], m));
        for (int b = 0; b < nbub_; ++b)
            map.push_back(bub_base + e * nbub_ + b);
    }

    wall_constrained_.assign(nvel_, 0);
    for (int fid : mesh.wall_facets())
        for (int m = 0; m <= k_; ++m)
            wall_constrained_[facet_dof(fid, m)] = 1;

    build_element_matrices();
}

void VelocitySpace::build_transform()
{
    const int k = k_;
    auto xbub_idx = [k](int m, int j) {
        return 4 * (k + 1) + (m - 1) * (k + 1) + j;
    };
    auto ybub_idx = [k](int m, int i) {
        return 4 * (k + 1) + k * (k + 1) + (m - 1) * (k + 1) + i;
    };

    transform_ = Mat::Zero(fdim_, ldim_);
    if (mode_ == PressureMode::full) {
        transform_.setIdentity(fdim_, ldim_);
        return;
    }

    // Reduced: facet moments corrected to have constant (j=0) or zero
    // (j>=1) divergence, plus exactly divergence-free curl bubbles.
    int col = 0;
    for (int j = 0; j <= k; ++j, ++col) { // L
        transform_(j, col) = 1.0;
        if (j >= 1)
            transform_(ybub_idx(j, 0), col) = 1.0;
    }
    for (int j = 0; j <= k; ++j, ++col) { // R
        transform_((k + 1) + j, col) = 1.0;
        if (j >= 1)
            transform_(ybub_idx(j, 0), col) = -1.0;
    }
    for (int i = 0; i <= k; ++i, ++col) { // B
        transform_(2 * (k + 1) + i, col) = 1.0;
        if (i >= 1)
            transform_(xbub_idx(i, 0), col) = 1.0;
    }
    for (int i = 0; i <= k; ++i, ++col) { // T
        transform_(3 * (k + 1) + i, col) = 1.0;
        if (i >= 1)
            transform_(xbub_idx(i, 0), col) = -1.0;
    }
    // curl(b_a(x) b_c(y)) = (b_a P~_c, -P~_a b_c)
    for (int a = 1; a <= k; ++a)
        for (int c = 1; c <= k; ++c, ++col) {
            transform_(xbub_idx(a, c), col) = 1.0;
            transform_(ybub_idx(c, a), col) = -1.0;
        }
}

std::unique_ptr<VelocitySpace::Tables>
VelocitySpace::make_tables(int npts1d) const
{
    auto t = std::make_unique<Tables>();
    t->rule = gauss_rule(npts1d);
    t->npts1d = npts1d;
    t->npts = npts1d * npts1d;
    const double h = mesh_->h();
    const double sv = 1.0 / h;       // value scale
    const double sg = 1.0 / (h * h); // first derivative / div / curl scale
    const double sc = sg / h;        // curl gradient scale

    Mat Fvx(t->npts, fdim_), Fvy(t->npts, fdim_), Fdxx(t->npts, fdim_),
        Fdyx(t->npts, fdim_), Fdxy(t->npts, fdim_), Fdyy(t->npts, fdim_),
        Fdiv(t->npts, fdim_), Fcurl(t->npts, fdim_), Fcgx(t->npts, fdim_),
        Fcgy(t->npts, fdim_);
    t->pval.resize(t->npts, npres_);
    t->wvol.resize(t->npts);

    FullPoint fp;
    std::vector<double> lx(k_ + 1), ly(k_ + 1);
    for (int qy = 0; qy < npts1d; ++qy) {
        for (int qx = 0; qx < npts1d; ++qx) {
            const int q = qy * npts1d + qx;
            const double xh = t->rule.x[qx];
            const double yh = t->rule.x[qy];
            eval_full(full_dofs_, k_, xh, yh, fp);
            for (int i = 0; i < fdim_; ++i) {
                Fvx(q, i) = fp.vx[i];
                Fvy(q, i) = fp.vy[i];
                Fdxx(q, i) = fp.dxx[i];
                Fdyx(q, i) = fp.dyx[i];
                Fdxy(q, i) = fp.dxy[i];
                Fdyy(q, i) = fp.dyy[i];
                Fdiv(q, i) = fp.div[i];
                Fcurl(q, i) = fp.curl[i];
                Fcgx(q, i) = fp.cgx[i];
                Fcgy(q, i) = fp.cgy[i];
            }
            t->wvol[q] = h * h * t->rule.w[qx] * t->rule.w[qy];
            if (mode_ == PressureMode::full) {
                legendre_eval(xh, k_, lx.data());
                legendre_eval(yh, k_, ly.data());
                for (int a = 0; a <= k_; ++a)
                    for (int b = 0; b <= k_; ++b)
                        t->pval(q, a * (k_ + 1) + b) = lx[a] * ly[b] / h;
            } else {
                t->pval(q, 0) = 1.0 / h;
            }
        }
    }
    t->vx = sv * (Fvx * transform_);
    t->vy = sv * (Fvy * transform_);
    t->dxx = sg * (Fdxx * transform_);
    t->dyx = sg * (Fdyx * transform_);
    t->dxy = sg * (Fdxy * transform_);
    t->dyy = sg * (Fdyy * transform_);
    t->div = sg * (Fdiv * transform_);
    t->curl = sg * (Fcurl * transform_);
    t->cgx = sc * (Fcgx * transform_);
    t->cgy = sc * (Fcgy * transform_);

    // Facet traces; side 0..3 = {x=0, x=1, y=0, y=1}.
    t->wfac.resize(npts1d);
    for (int q = 0; q < npts1d; ++q)
        t->wfac[q] = h * t->rule.w[q];
    for (int side = 0; side < 4; ++side) {
        Mat Tvx(npts1d, fdim_), Tvy(npts1d, fdim_), Tdnx(npts1d, fdim_),
            Tdny(npts1d, fdim_), Tcurl(npts1d, fdim_);
        for (int q = 0; q < npts1d; ++q) {
            double xh, yh;
            const double tq = t->rule.x[q];
            switch (side) {
            case 0: xh = 0.0; yh = tq; break;
            case 1: xh = 1.0; yh = tq; break;
            case 2: xh = tq; yh = 0.0; break;
            default: xh = tq; yh = 1.0; break;
            }
            eval_full(full_dofs_, k_, xh, yh, fp);
            const bool vertical = side < 2;
            for (int i = 0; i < fdim_; ++i) {
                Tvx(q, i) = fp.vx[i];
                Tvy(q, i) = fp.vy[i];
                Tdnx(q, i) = vertical ? fp.dxx[i] : fp.dyx[i];
                Tdny(q, i) = vertical ? fp.dxy[i] : fp.dyy[i];
                Tcurl(q, i) = fp.curl[i];
            }
        }
        t->tvx[side] = sv * (Tvx * transform_);
        t->tvy[side] = sv * (Tvy * transform_);
        t->tdnx[side] = sg * (Tdnx * transform_);
        t->tdny[side] = sg * (Tdny * transform_);
        t->tcurl[side] = sg * (Tcurl * transform_);
    }
    return t;
}

const VelocitySpace::Tables& VelocitySpace::tables(int npts1d) const
{
    auto it = tables_.find(npts1d);
    if (it == tables_.end())
        it = tables_.emplace(npts1d, make_tables(npts1d)).first;
    return *it->second;
}

void VelocitySpace::build_element_matrices()
{
    const Tables& t = tables(npts_exact());
    const auto W = t.wvol.asDiagonal();
    mass_ = t.vx.transpose() * W * t.vx + t.vy.transpose() * W * t.vy;
    visc_vol_ = t.dxx.transpose() * W * t.dxx +
                t.dyx.transpose() * W * t.dyx +
                t.dxy.transpose() * W * t.dxy +
                t.dyy.transpose() * W * t.dyy;
    div_ = t.pval.transpose() * W * t.div;
    pres_mean_ = t.pval.transpose() * t.wvol;
}

const Mat& VelocitySpace::facet_viscous(int orientation, double alpha) const
{
    long bits;
    static_assert(sizeof(double) == sizeof(long));
    std::memcpy(&bits, &alpha, sizeof(double));
    const auto key = std::make_pair(orientation, bits);
    auto it = facet_visc_.find(key);
    if (it != facet_visc_.end())
        return *it->second;

    const Tables& t = tables(npts_exact());
    const int L = ldim_;
    const int own = orientation == 0 ? 1 : 3; // owner trace side (R or T)
    const int nei = orientation == 0 ? 0 : 2; // neighbor side (L or B)
    const double sigma = alpha * (k_ + 1) * (k_ + 1) / mesh_->h();

    auto block = std::make_unique<Mat>(Mat::Zero(2 * L, 2 * L));
    Vec Jx(2 * L), Jy(2 * L), Ax(2 * L), Ay(2 * L);
    for (int q = 0; q < t.npts1d; ++q) {
        for (int i = 0; i < L; ++i) {
            Jx[i] = t.tvx[own](q, i);
            Jy[i] = t.tvy[own](q, i);
            Ax[i] = 0.5 * t.tdnx[own](q, i);
            Ay[i] = 0.5 * t.tdny[own](q, i);
            Jx[L + i] = -t.tvx[nei](q, i);
            Jy[L + i] = -t.tvy[nei](q, i);
            Ax[L + i] = 0.5 * t.tdnx[nei](q, i);
            Ay[L + i] = 0.5 * t.tdny[nei](q, i);
        }
        const double w = t.wfac[q];
        block->noalias() += (w * sigma) * (Jx * Jx.transpose());
        block->noalias() += (w * sigma) * (Jy * Jy.transpose());
        block->noalias() -= w * (Jx * Ax.transpose() + Ax * Jx.transpose());
        block->noalias() -= w * (Jy * Ay.transpose() + Ay * Jy.transpose());
    }
    const Mat& ref = *block;
    facet_visc_.emplace(key, std::move(block));
    return ref;
}

void VelocitySpace::eval_basis(double xhat, double yhat, double* valx,
                               double* valy, double* curl, double* div) const
{
    FullPoint fp;
    eval_full(full_dofs_, k_, xhat, yhat, fp);
    const double h = mesh_->h();
    const double sv = 1.0 / h;
    const double sg = 1.0 / (h * h);
    for (int l = 0; l < ldim_; ++l) {
        double ax = 0.0, ay = 0.0, ac = 0.0, ad = 0.0;
        for (const auto& [f, tf] : tcols_[l]) {
            ax += tf * fp.vx[f];
            ay += tf * fp.vy[f];
            ac += tf * fp.curl[f];
            ad += tf * fp.div[f];
        }
        if (valx)
            valx[l] = sv * ax;
        if (valy)
            valy[l] = sv * ay;
        if (curl)
            curl[l] = sg * ac;
        if (div)
            div[l] = sg * ad;
    }
}

VelocitySpace::DofCounts VelocitySpace::reported_dof_counts() const
{
    const long n = mesh_->n();
    const long k = k_;
    DofCounts c;
    const long facet_edges = 2 * n * (n + 1); // per-edge, pre-identification
    const long divfree_interior = 2 * k * (k + 1) - ((k + 1) * (k + 1) - 1);
    c.velocity = facet_edges * (k + 1) + n * n * divfree_interior;
    c.pressure = n * n;
    return c;
}

VelocitySpace::LineTables
VelocitySpace::build_line_tables(double y, std::vector<double> xhat) const
{
    LineTables lt;
    const int n = mesh_->n();
    double yc = std::min(std::max(y, 0.0), 1.0);
    lt.row = std::min(static_cast<int>(yc * n), n - 1);
    lt.yhat = yc * n - lt.row;
    lt.xhat = std::move(xhat);
    const int m = static_cast<int>(lt.xhat.size());
    lt.valx.resize(m, ldim_);
    lt.valy.resize(m, ldim_);
    lt.curl.resize(m, ldim_);
    std::vector<double> vx(ldim_), vy(ldim_), cu(ldim_);
    for (int r = 0; r < m; ++r) {
        eval_basis(lt.xhat[r], lt.yhat, vx.data(), vy.data(), cu.data());
        for (int l = 0; l < ldim_; ++l) {
            lt.valx(r, l) = vx[l];
            lt.valy(r, l) = vy[l];
            lt.curl(r, l) = cu[l];
        }
    }
    return lt;
}

namespace {

/// Locate the element containing (x, y) and its reference coordinates.
/// x wraps periodically, y clamps; facet points go to the upper element.
void locate(const StructuredMesh& mesh, double x, double y, int& eid,
            double& xh, double& yh)
{
    const int n = mesh.n();
    double xw = x - std::floor(x);
    double yc = std::min(std::max(y, 0.0), 1.0);
    int i = std::min(static_cast<int>(xw * n), n - 1);
    int j = std::min(static_cast<int>(yc * n), n - 1);
    xh = xw * n - i;
    yh = yc * n - j;
    eid = mesh.element_id(i, j);
}

} // namespace

std::array<double, 2> evaluate(const VelocityField& f, double x, double y)
{
    const VelocitySpace& sp = *f.space;
    int eid;
    double xh, yh;
    locate(sp.mesh(), x, y, eid, xh, yh);
    std::vector<double> vx(sp.ldim()), vy(sp.ldim());
    sp.eval_basis(xh, yh, vx.data(), vy.data());
    const auto& map = sp.element_dofs(eid);
    double u1 = 0.0, u2 = 0.0;
    for (int l = 0; l < sp.ldim(); ++l) {
        const double c = f.v[map[l]];
        u1 += c * vx[l];
        u2 += c * vy[l];
    }
    return {u1, u2};
}

double broken_curl_at(const VelocityField& f, double x, double y)
{
    const VelocitySpace& sp = *f.space;
    int eid;
    double xh, yh;
    locate(sp.mesh(), x, y, eid, xh, yh);
    std::vector<double> cu(sp.ldim());
    sp.eval_basis(xh, yh, nullptr, nullptr, cu.data());
    const auto& map = sp.element_dofs(eid);
    double w = 0.0;
    for (int l = 0; l < sp.ldim(); ++l)
        w += f.v[map[l]] * cu[l];
    return w;
}

double max_normal_jump(const VelocityField& f)
{
    const VelocitySpace& sp = *f.space;
    const auto& t = sp.tables(sp.npts_exact());
    const StructuredMesh& mesh = sp.mesh();
    const int L = sp.ldim();
    Vec cown(L), cnei(L);
    double worst = 0.0;
    for (int fid : mesh.interior_facets()) {
        const auto& fc = mesh.facet(fid);
        const int own_side = fc.vertical ? 1 : 3;
        const int nei_side = fc.vertical ? 0 : 2;
        const auto& mo = sp.element_dofs(fc.owner);
        const auto& mn = sp.element_dofs(fc.neighbor);
        for (int l = 0; l < L; ++l) {
            cown[l] = f.v[mo[l]];
            cnei[l] = f.v[mn[l]];
        }
        const Mat& to = fc.vertical ? t.tvx[own_side] : t.tvy[own_side];
        const Mat& tn = fc.vertical ? t.tvx[nei_side] : t.tvy[nei_side];
        const Vec jump = to * cown - tn * cnei;
        worst = std::max(worst, jump.cwiseAbs().maxCoeff());
    }
    return worst;
}

DivergenceCheck divergence_check(const VelocityField& f)
{
    const VelocitySpace& sp = *f.space;
    const auto& t = sp.tables(sp.npts_exact());
    const int L = sp.ldim();
    Vec ce(L);
    double div2 = 0.0, vel2 = 0.0;
    for (int e = 0; e < sp.mesh().num_elements(); ++e) {
        const auto& map = sp.element_dofs(e);
        for (int l = 0; l < L; ++l)
            ce[l] = f.v[map[l]];
        const Vec dv = t.div * ce;
        const Vec ux = t.vx * ce;
        const Vec uy = t.vy * ce;
        div2 += (t.wvol.array() * dv.array().square()).sum();
        vel2 += (t.wvol.array() *
                 (ux.array().square() + uy.array().square()))
                    .sum();
    }
    return {std::sqrt(div2), std::sqrt(vel2)};
}

} // namespace khdns
