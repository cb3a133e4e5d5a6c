#pragma once

// Low-dimensional convex hull helpers for the capacity-region builder.
// Not installed; desk-scale point clouds only.

#include <vector>

#include <Eigen/Dense>

namespace switchsim::detail {

/// Hull polygon in counter-clockwise order (collinear points dropped).
std::vector<Eigen::Vector2d> hull_2d(std::vector<Eigen::Vector2d> pts);

struct HullFace3 {
    Eigen::Vector3d normal;  // unit, outward
    double offset = 0.0;     // <normal, x> = offset on the face plane
};

/// Faces of the 3-D convex hull (triangulated; coplanar triangles repeat the
/// same plane). Throws GeometryError if the point set is not full-dimensional.
std::vector<HullFace3> hull_3d(const std::vector<Eigen::Vector3d>& pts);

}  // namespace switchsim::detail
