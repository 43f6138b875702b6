#pragma once

#include <array>
#include <vector>

namespace khdns {

/// Domain: unit square (0,1)^2, periodic in x, solid walls at y=0 and y=1.
/// Uniform n-by-n quad grid.  Elements are numbered lexicographically,
/// eid = j*n + i with i the column (x) and j the row (y) index.
///
/// Facets are identified across the periodic boundary, so the column of
/// vertical facets at x=0 and x=1 is a single set of n*n facets.  Layout:
///   vertical facets:   fid = j*n + i        (left edge of element (i,j))
///   horizontal facets: fid = n*n + j*n + i  (bottom edge of element (i,j),
///                                            j = 0..n, j=0 / j=n are walls)
/// Total: 2*n^2 + n facets, of which 2n are walls.
class StructuredMesh {
public:
    enum class WallTag { none, bottom, top };

    struct Facet {
        int id = -1;
        int owner = -1;    ///< left (vertical) or lower (horizontal) element
        int neighbor = -1; ///< -1 for wall facets
        bool vertical = false;
        WallTag wall = WallTag::none;
        /// Unit normal; for interior facets it points owner -> neighbor
        /// (+x for vertical, +y for horizontal), for walls it points out
        /// of the domain.
        std::array<double, 2> normal{0.0, 0.0};
    };

    explicit StructuredMesh(int n);

    int n() const { return n_; }
    double h() const { return h_; }

    int num_elements() const { return n_ * n_; }
    int num_facets() const { return static_cast<int>(facets_.size()); }

    const Facet& facet(int fid) const { return facets_[fid]; }

    /// Interior facets, periodic ones included; fixed ascending id order.
    const std::vector<int>& interior_facets() const { return interior_; }
    const std::vector<int>& wall_facets() const { return walls_; }

    int element_id(int i, int j) const { return j * n_ + i; }
    int element_col(int eid) const { return eid % n_; }
    int element_row(int eid) const { return eid / n_; }

    /// Lower-left corner of an element.
    std::array<double, 2> element_origin(int eid) const
    {
        return {element_col(eid) * h_, element_row(eid) * h_};
    }

    /// Facet ids of an element in fixed order {left, right, bottom, top}.
    std::array<int, 4> element_facets(int eid) const;

    /// Neighbor across the given side (0=left,1=right,2=bottom,3=top);
    /// -1 past a wall.  x wraps periodically.
    int element_neighbor(int eid, int side) const;

    /// Outward unit normal of facet `fid` as seen from element `eid`,
    /// which must be its owner or neighbor.
    std::array<double, 2> outward_normal(int fid, int eid) const;

private:
    int n_;
    double h_;
    std::vector<Facet> facets_;
    std::vector<int> interior_;
    std::vector<int> walls_;
};

} // namespace khdns
