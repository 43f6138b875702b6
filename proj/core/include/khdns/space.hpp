#pragma once

#include "khdns/basis1d.hpp"
#include "khdns/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace khdns {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using AnalyticVelocity =
    std::function<std::array<double, 2>(double x, double y)>;
using AnalyticScalar = std::function<double(double x, double y)>;

/// Pressure/velocity pairing.
///
/// `full`:    velocity Q_{k+1,k} x Q_{k,k+1} (normal-continuous across
///            facets), pressure Q_k discontinuous.
/// `reduced`: same facet degrees of freedom, but the element-interior basis
///            keeps only exactly divergence-free bubbles and the facet
///            functions are corrected so their divergence is constant per
///            element; pressure is one constant per element.  Spans the same
///            divergence-free subspace, so constrained projections and
///            divergence-free dynamics coincide with `full` up to solver
///            tolerance.
enum class PressureMode { full, reduced };

/// H(div)-conforming velocity space on a uniform periodic-channel quad grid.
///
/// Local basis (reference element [0,1]^2, contravariant scaling u = u^/h):
///   x-component: {1-x, x, b_1..b_k}(x) tensor P~_0..P~_k(y)
///   y-component: P~_0..P~_k(x) tensor {1-y, y, b_1..b_k}(y)
/// Facet moments are shared between neighbors with a global +x/+y normal
/// orientation, which makes the normal component exactly continuous.
/// All wall facet moments are strongly constrained to zero (no penetration).
class VelocitySpace {
public:
    VelocitySpace(const StructuredMesh& mesh, int k, PressureMode mode);

    const StructuredMesh& mesh() const { return *mesh_; }
    int k() const { return k_; }
    PressureMode mode() const { return mode_; }

    /// Active per-element local basis size (velocity).
    int ldim() const { return ldim_; }
    /// Bubble (element-interior) dofs per element.
    int nbub() const { return nbub_; }
    /// Pressure dofs per element.
    int npres_local() const { return npres_; }

    int num_velocity_dofs() const { return nvel_; }
    int num_pressure_dofs() const { return npres_total_; }
    /// Velocity + pressure + one mean-pressure multiplier.
    int num_system_dofs() const { return nvel_ + npres_total_ + 1; }
    int multiplier_dof() const { return nvel_ + npres_total_; }

    /// Global velocity dofs of an element, local ordering
    /// {L_0..L_k, R_0..R_k, B_0..B_k, T_0..T_k, bubbles}.
    const std::vector<int>& element_dofs(int eid) const
    {
        return elem_dofs_[eid];
    }
    int facet_dof(int fid, int m) const { return fid * (k_ + 1) + m; }
    int pressure_dof(int eid, int a) const
    {
        return nvel_ + eid * npres_ + a;
    }

    /// True for velocity dofs pinned to zero by the wall constraint.
    const std::vector<std::uint8_t>& wall_constrained() const
    {
        return wall_constrained_;
    }

    /// Quadrature tables in the active basis with physical scaling.
    /// Cached per 1D point count.
    struct Tables {
        Rule1D rule;
        int npts1d = 0;
        int npts = 0; ///< npts1d^2 volume points, row-major (qy*npts1d+qx)
        Mat vx, vy;                 ///< component values      (npts x ldim)
        Mat dxx, dyx, dxy, dyy;     ///< d(comp)/d(dir)        (npts x ldim)
        Mat div, curl;              ///< (npts x ldim)
        Mat cgx, cgy;               ///< gradient of curl      (npts x ldim)
        Mat pval;                   ///< pressure values       (npts x npres)
        Vec wvol;                   ///< physical volume weights (npts)
        /// Facet traces, side 0..3 = {left,right,bottom,top} of the element.
        std::array<Mat, 4> tvx, tvy;   ///< (npts1d x ldim)
        std::array<Mat, 4> tdnx, tdny; ///< normal derivative of components
        std::array<Mat, 4> tcurl;      ///< curl trace (npts1d x ldim)
        Vec wfac; ///< physical facet weights (npts1d)
    };
    const Tables& tables(int npts1d) const;

    /// Default 1D point counts: exact for the bilinear forms / for the
    /// convection trilinear form (order 3(k+1)) / for projecting analytic
    /// initial data.
    int npts_exact() const { return k_ + 2; }
    int npts_convection() const { return points_for_order(3 * (k_ + 1)); }
    int npts_projection() const { return std::max(2 * (k_ + 1), 24); }

    /// Evaluate the active local basis at one reference point.
    /// Outputs are ldim-sized; null pointers skip that quantity.
    void eval_basis(double xhat, double yhat, double* valx, double* valy,
                    double* curl = nullptr, double* div = nullptr) const;

    /// Dof counts in the reporting convention of resolution tables for this
    /// discretization: facet dofs counted per element edge before periodic
    /// identification, interior dofs counted as the exactly divergence-free
    /// subset, pressure as one constant per element.
    struct DofCounts {
        long velocity = 0;
        long pressure = 0;
    };
    DofCounts reported_dof_counts() const;

    /// Active-basis element matrices (identical for every element):
    /// mass, viscous volume part, divergence coupling (npres x ldim),
    /// and the element mean vector (integral of pressure basis).
    const Mat& element_mass() const { return mass_; }
    const Mat& element_viscous_volume() const { return visc_vol_; }
    const Mat& element_div() const { return div_; }
    const Vec& element_pressure_mean() const { return pres_mean_; }

    /// Interior-facet coupling block of the symmetric interior penalty
    /// viscous form, (2*ldim x 2*ldim) over (owner, neighbor) dofs.
    /// Orientation 0 = vertical facet, 1 = horizontal.
    const Mat& facet_viscous(int orientation, double alpha) const;

    /// Active-basis tables along a horizontal line y=const, evaluated at the
    /// given in-cell reference abscissae (shared by every cell of the row).
    struct LineTables {
        std::vector<double> xhat;
        double yhat = 0.0;
        int row = 0; ///< element row containing the line
        Mat valx, valy, curl; ///< (xhat.size() x ldim)
    };
    LineTables build_line_tables(double y, std::vector<double> xhat) const;

private:
    void build_transform();
    void build_element_matrices();
    std::unique_ptr<Tables> make_tables(int npts1d) const;

    const StructuredMesh* mesh_;
    int k_;
    PressureMode mode_;
    int fdim_;  ///< full local dim 2(k+1)(k+2)
    int ldim_;  ///< active local dim
    int nbub_;
    int npres_;
    int nvel_ = 0;
    int npres_total_ = 0;

    /// Sparse full->active transform, stored densely (fdim x ldim) for the
    /// table builds, plus per-column nonzero lists for point evaluation.
    Mat transform_;
    std::vector<std::vector<std::pair<int, double>>> tcols_;

    /// Full local basis: per dof {component, xfam, xidx, yfam, yidx} with
    /// family codes 0 = nodal {1-t, t}, 1 = Legendre, 2 = bubble.
    std::vector<std::array<int, 5>> full_dofs_;

    std::vector<std::vector<int>> elem_dofs_;
    std::vector<std::uint8_t> wall_constrained_;

    Mat mass_, visc_vol_, div_;
    Vec pres_mean_;
    mutable std::map<int, std::unique_ptr<Tables>> tables_;
    mutable std::map<std::pair<int, long>, std::unique_ptr<Mat>> facet_visc_;
};

/// Discrete state: velocity coefficients, pressure coefficients, and the
/// scalar mean-pressure multiplier slot used by the saddle-point solves.
struct VelocityField {
    const VelocitySpace* space = nullptr;
    Vec v; ///< velocity coefficients (num_velocity_dofs)
    Vec p; ///< pressure coefficients (num_pressure_dofs)

    explicit VelocityField(const VelocitySpace& s)
        : space(&s),
          v(Vec::Zero(s.num_velocity_dofs())),
          p(Vec::Zero(s.num_pressure_dofs()))
    {
    }
};

/// Point evaluation.  x wraps periodically; y is clamped to [0,1].  Points
/// on facet lines evaluate from the element above/right (tangential
/// components of the velocity may jump across facets).
std::array<double, 2> evaluate(const VelocityField& f, double x, double y);

/// Broken (element-wise) curl of the velocity at a point.
double broken_curl_at(const VelocityField& f, double x, double y);

/// Max over interior facets and quadrature nodes of |jump(u . n)|;
/// zero to roundoff by construction of the shared facet dofs.
double max_normal_jump(const VelocityField& f);

/// L2 norm of the element-wise divergence, and the L2 norm of the velocity.
struct DivergenceCheck {
    double div_l2 = 0.0;
    double vel_l2 = 0.0;
};
DivergenceCheck divergence_check(const VelocityField& f);

} // namespace khdns
