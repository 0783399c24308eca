#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "asmplan/geometry/pose.hpp"

namespace asmplan {

inline constexpr double kHullTolerance = 1e-7;

enum class HullSide { inside, boundary, outside };

/// Convex hull of planar points.
///
/// `vertices` are strictly convex corners in counter-clockwise order, starting
/// at the lowest-y vertex (largest x on ties). `rank` is the affine dimension
/// of the input: 0 = single point, 1 = segment (two endpoints), 2 = polygon.
struct Hull2D {
    std::vector<Vec2> vertices;
    std::vector<std::size_t> source_index;
    int rank = 0;
};

/// Convex hull of spatial points.
///
/// rank 3: `faces` index into `vertices`, wound counter-clockwise seen from
/// outside, with `normals` pointing away from the hull centroid.
/// rank 2: `vertices` is the boundary polygon (CCW about `plane_normal`), no faces.
/// rank 1: the two segment endpoints. rank 0: one point.
struct Hull3D {
    std::vector<Vec3> vertices;
    std::vector<std::size_t> source_index;
    std::vector<std::array<std::size_t, 3>> faces;
    std::vector<Vec3> normals;
    Vec3 plane_normal = Vec3::Zero();
    int rank = 0;

    Vec3 centroid() const;
};

Hull2D convex_hull(std::span<const Vec2> points, double tol = kHullTolerance);
Hull3D convex_hull(std::span<const Vec3> points, double tol = kHullTolerance);

/// |distance to hull boundary| <= tol is reported as `boundary`.
HullSide point_vs_hull(const Hull2D& hull, const Vec2& p, double tol);
HullSide point_vs_hull(const Hull3D& hull, const Vec3& p, double tol);

/// Signed distance of p to the hull boundary: positive inside, negative outside.
/// Degenerate hulls have no interior, so the value is minus the distance.
double signed_distance(const Hull2D& hull, const Vec2& p);
double signed_distance(const Hull3D& hull, const Vec3& p);

/// Orthonormal basis (u, v) of the plane with the given unit normal.
std::pair<Vec3, Vec3> plane_basis(const Vec3& normal);

}  // namespace asmplan
