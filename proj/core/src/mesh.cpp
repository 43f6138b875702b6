#include "khdns/mesh.hpp"

#include <stdexcept>

namespace khdns {

StructuredMesh::StructuredMesh(int n) : n_(n), h_(1.0 / n)
{
    if (n < 1)
        throw std::invalid_argument("StructuredMesh: n must be >= 1");
    if (n > 4096)
        throw std::invalid_argument("StructuredMesh: n out of supported range");

    facets_.resize(2 * n * n + n);

    // Vertical facets: periodic in x, all interior.
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int fid = j * n + i;
            Facet& f = facets_[fid];
            f.id = fid;
            f.vertical = true;
            f.owner = element_id((i + n - 1) % n, j);
            f.neighbor = element_id(i, j);
            f.normal = {1.0, 0.0};
        }
    }
    // Horizontal facets: rows j = 0..n; j=0 and j=n are walls.
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int fid = n * n + j * n + i;
            Facet& f = facets_[fid];
            f.id = fid;
            f.vertical = false;
            if (j == 0) {
                f.owner = element_id(i, 0);
                f.wall = WallTag::bottom;
                f.normal = {0.0, -1.0};
            } else if (j == n) {
                f.owner = element_id(i, n - 1);
                f.wall = WallTag::top;
                f.normal = {0.0, 1.0};
            } else {
                f.owner = element_id(i, j - 1);
                f.neighbor = element_id(i, j);
                f.normal = {0.0, 1.0};
            }
        }
    }

    for (const Facet& f : facets_) {
        if (f.wall == WallTag::none)
            interior_.push_back(f.id);
        else
            walls_.push_back(f.id);
    }
}

std::array<int, 4> StructuredMesh::element_facets(int eid) const
{
    const int i = element_col(eid);
    const int j = element_row(eid);
    return {
        j * n_ + i,                 // left
        j * n_ + (i + 1) % n_,      // right
        n_ * n_ + j * n_ + i,       // bottom
        n_ * n_ + (j + 1) * n_ + i, // top
    };
}

int StructuredMesh::element_neighbor(int eid, int side) const
{
    const int i = element_col(eid);
    const int j = element_row(eid);
    switch (side) {
    case 0: return element_id((i + n_ - 1) % n_, j);
    case 1: return element_id((i + 1) % n_, j);
    case 2: return j == 0 ? -1 : element_id(i, j - 1);
    case 3: return j == n_ - 1 ? -1 : element_id(i, j + 1);
    default: throw std::invalid_argument("element_neighbor: bad side");
    }
}

std::array<double, 2> StructuredMesh::outward_normal(int fid, int eid) const
{
    const Facet& f = facets_[fid];
    if (eid == f.owner)
        return f.normal;
    if (eid == f.neighbor)
        return {-f.normal[0], -f.normal[1]};
    throw std::invalid_argument("outward_normal: element not adjacent");
}

} // namespace khdns
