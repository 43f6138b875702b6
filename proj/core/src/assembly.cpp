#include "khdns/assembly.hpp"

#include <vector>

namespace khdns {

namespace {

using Trip = Eigen::Triplet<double>;

void scatter_block(std::vector<Trip>& out, const Mat& block,
                   const std::vector<int>& rows, const std::vector<int>& cols)
{
    for (int r = 0; r < block.rows(); ++r)
        for (int c = 0; c < block.cols(); ++c) {
            const double v = block(r, c);
            if (v != 0.0)
                out.emplace_back(rows[r], cols[c], v);
        }
}

} // namespace

SpMat assemble_mass(const VelocitySpace& sp)
{
    const int nel = sp.mesh().num_elements();
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(nel) * sp.ldim() * sp.ldim());
    const Mat& M = sp.element_mass();
    for (int e = 0; e < nel; ++e) {
        const auto& map = sp.element_dofs(e);
        scatter_block(trips, M, map, map);
    }
    SpMat out(sp.num_velocity_dofs(), sp.num_velocity_dofs());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SpMat assemble_viscous(const VelocitySpace& sp, double alpha)
{
    const StructuredMesh& mesh = sp.mesh();
    const int L = sp.ldim();
    std::vector<Trip> trips;
    const Mat& A = sp.element_viscous_volume();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& map = sp.element_dofs(e);
        scatter_block(trips, A, map, map);
    }
    std::vector<int> pair(2 * L);
    for (int fid : mesh.interior_facets()) {
        const auto& f = mesh.facet(fid);
        const Mat& B = sp.facet_viscous(f.vertical ? 0 : 1, alpha);
        const auto& mo = sp.element_dofs(f.owner);
        const auto& mn = sp.element_dofs(f.neighbor);
        for (int l = 0; l < L; ++l) {
            pair[l] = mo[l];
            pair[L + l] = mn[l];
        }
        scatter_block(trips, B, pair, pair);
    }
    SpMat out(sp.num_velocity_dofs(), sp.num_velocity_dofs());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SpMat assemble_saddle(const VelocitySpace& sp, double mass_coef,
                      double visc_coef, double alpha)
{
    const StructuredMesh& mesh = sp.mesh();
    const int L = sp.ldim();
    const int npres = sp.npres_local();
    const auto& fixed = sp.wall_constrained();
    const int nsys = sp.num_system_dofs();
    const int mult = sp.multiplier_dof();

    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(mesh.num_elements()) *
                  (L + npres) * (L + npres));

    Mat elem = mass_coef * sp.element_mass();
    if (visc_coef != 0.0)
        elem += visc_coef * sp.element_viscous_volume();
    const Mat& D = sp.element_div();
    const Vec& em = sp.element_pressure_mean();

    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto& map = sp.element_dofs(e);
        for (int r = 0; r < L; ++r) {
            if (fixed[map[r]])
                continue;
            for (int c = 0; c < L; ++c) {
                const double v = elem(r, c);
                if (v != 0.0 && !fixed[map[c]])
                    trips.emplace_back(map[r], map[c], v);
            }
        }
        for (int a = 0; a < npres; ++a) {
            const int pdof = sp.pressure_dof(e, a);
            for (int c = 0; c < L; ++c) {
                const double v = D(a, c);
                if (v != 0.0 && !fixed[map[c]]) {
                    trips.emplace_back(pdof, map[c], v);
                    trips.emplace_back(map[c], pdof, v);
                }
            }
            if (em[a] != 0.0) {
                trips.emplace_back(mult, pdof, em[a]);
                trips.emplace_back(pdof, mult, em[a]);
            }
        }
    }

    if (visc_coef != 0.0) {
        std::vector<int> pair(2 * L);
        for (int fid : mesh.interior_facets()) {
            const auto& f = mesh.facet(fid);
            const Mat& B = sp.facet_viscous(f.vertical ? 0 : 1, alpha);
            const auto& mo = sp.element_dofs(f.owner);
            const auto& mn = sp.element_dofs(f.neighbor);
            for (int l = 0; l < L; ++l) {
                pair[l] = mo[l];
                pair[L + l] = mn[l];
            }
            for (int r = 0; r < 2 * L; ++r) {
                if (fixed[pair[r]])
                    continue;
                for (int c = 0; c < 2 * L; ++c) {
                    const double v = B(r, c);
                    if (v != 0.0 && !fixed[pair[c]])
                        trips.emplace_back(pair[r], pair[c], visc_coef * v);
                }
            }
        }
    }

    for (int d = 0; d < sp.num_velocity_dofs(); ++d)
        if (fixed[d])
            trips.emplace_back(d, d, 1.0);

    SpMat out(nsys, nsys);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

Vec projection_rhs(const VelocitySpace& sp, const AnalyticVelocity& f,
                   int npts1d)
{
    const StructuredMesh& mesh = sp.mesh();
    const auto& t = sp.tables(npts1d);
    const double h = mesh.h();
    Vec rhs = Vec::Zero(sp.num_system_dofs());
    Vec f1(t.npts), f2(t.npts);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto o = mesh.element_origin(e);
        for (int qy = 0; qy < npts1d; ++qy)
            for (int qx = 0; qx < npts1d; ++qx) {
                const int q = qy * npts1d + qx;
                const auto u =
                    f(o[0] + h * t.rule.x[qx], o[1] + h * t.rule.x[qy]);
                f1[q] = t.wvol[q] * u[0];
                f2[q] = t.wvol[q] * u[1];
            }
        const Vec re = t.vx.transpose() * f1 + t.vy.transpose() * f2;
        const auto& map = sp.element_dofs(e);
        for (int l = 0; l < sp.ldim(); ++l)
            rhs[map[l]] += re[l];
    }
    const auto& fixed = sp.wall_constrained();
    for (int d = 0; d < sp.num_velocity_dofs(); ++d)
        if (fixed[d])
            rhs[d] = 0.0;
    return rhs;
}

ConvectionOperator::ConvectionOperator(const VelocitySpace& sp, int npts1d)
    : sp_(&sp), npts1d_(npts1d)
{
    sp.tables(npts1d); // build and cache now
}

void ConvectionOperator::apply(const Vec& v, Vec& out) const
{
    const VelocitySpace& sp = *sp_;
    const StructuredMesh& mesh = sp.mesh();
    const auto& t = sp.tables(npts1d_);
    const int L = sp.ldim();
    const int nel = mesh.num_elements();

    out = Vec::Zero(sp.num_velocity_dofs());

    // Volume term, all elements at once.
    C_.resize(L, nel);
    for (int e = 0; e < nel; ++e) {
        const auto& map = sp.element_dofs(e);
        for (int l = 0; l < L; ++l)
            C_(l, e) = v[map[l]];
    }
    UX_.noalias() = t.vx * C_;
    UY_.noalias() = t.vy * C_;
    G11_.noalias() = t.dxx * C_;
    G12_.noalias() = t.dyx * C_;
    G21_.noalias() = t.dxy * C_;
    G22_.noalias() = t.dyy * C_;
    W1_ = (UX_.array() * G11_.array() + UY_.array() * G12_.array()).matrix();
    W2_ = (UX_.array() * G21_.array() + UY_.array() * G22_.array()).matrix();
    W1_.array().colwise() *= t.wvol.array();
    W2_.array().colwise() *= t.wvol.array();
    R_.noalias() = t.vx.transpose() * W1_;
    R_.noalias() += t.vy.transpose() * W2_;
    for (int e = 0; e < nel; ++e) {
        const auto& map = sp.element_dofs(e);
        for (int l = 0; l < L; ++l)
            out[map[l]] += R_(l, e);
    }

    // Facet terms, batched per orientation.  Sides: owner trace is the
    // right/top side of the owner element, neighbor trace the left/bottom.
    for (int orientation = 0; orientation < 2; ++orientation) {
        const bool vertical = orientation == 0;
        const int so = vertical ? 1 : 3;
        const int sn = vertical ? 0 : 2;
        std::vector<int> own, nei;
        for (int fid : mesh.interior_facets()) {
            const auto& f = mesh.facet(fid);
            if (f.vertical == vertical) {
                own.push_back(f.owner);
                nei.push_back(f.neighbor);
            }
        }
        const int nf = static_cast<int>(own.size());
        if (nf == 0)
            continue;
        Co_.resize(L, nf);
        Cn_.resize(L, nf);
        for (int f = 0; f < nf; ++f) {
            Co_.col(f) = C_.col(own[f]);
            Cn_.col(f) = C_.col(nei[f]);
        }
        TO_[0].noalias() = t.tvx[so] * Co_;
        TO_[1].noalias() = t.tvy[so] * Co_;
        TN_[0].noalias() = t.tvx[sn] * Cn_;
        TN_[1].noalias() = t.tvy[sn] * Cn_;
        JX_ = TO_[0] - TN_[0];
        JY_ = TO_[1] - TN_[1];
        // Normal velocity is single valued; take the owner trace.
        const Mat& S = vertical ? TO_[0] : TO_[1];
        FO_ = 0.5 * (S.array().abs() - S.array()).matrix(); // upwind: owner
        FN_ = 0.5 * (S.array().abs() + S.array()).matrix();
        FO_.array().colwise() *= t.wfac.array();
        FN_.array().colwise() *= t.wfac.array();
        RO_.noalias() = t.tvx[so].transpose() * (FO_.array() * JX_.array()).matrix();
        RO_.noalias() += t.tvy[so].transpose() * (FO_.array() * JY_.array()).matrix();
        RN_.noalias() = t.tvx[sn].transpose() * (FN_.array() * JX_.array()).matrix();
        RN_.noalias() += t.tvy[sn].transpose() * (FN_.array() * JY_.array()).matrix();
        for (int f = 0; f < nf; ++f) {
            const auto& mo = sp.element_dofs(own[f]);
            const auto& mn = sp.element_dofs(nei[f]);
            for (int l = 0; l < L; ++l) {
                out[mo[l]] += RO_(l, f);
                out[mn[l]] -= RN_(l, f);
            }
        }
    }
}

} // namespace khdns
