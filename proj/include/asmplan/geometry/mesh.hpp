#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "asmplan/geometry/pose.hpp"

namespace asmplan {

using Triangle = std::array<std::uint32_t, 3>;

/// Closed, consistently oriented triangle mesh with outward normals.
///
/// A Mesh can only be obtained through `Mesh::build`, which rejects open or
/// inconsistently wound surfaces, so every Mesh in the program is a valid
/// solid. Mass properties assume uniform density.
class Mesh {
public:
    static constexpr double kMinTriangleArea = 1e-9;

    /// Validates and builds. Throws NonManifold on out-of-range indices,
    /// degenerate triangles, open or non-manifold edges, inconsistent winding,
    /// or inward (negative volume) orientation.
    static Mesh build(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Vec3& com() const { return com_; }
    double volume() const { return volume_; }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t triangle_count() const { return triangles_.size(); }

    const Vec3& corner(std::size_t tri, int k) const { return vertices_[triangles_[tri][k]]; }
    Vec3 face_normal(std::size_t tri) const;
    double face_area(std::size_t tri) const;
    double surface_area() const;

    /// Builds a new mesh from this one by mapping every vertex through `pose`.
    Mesh transformed(const Pose& pose) const;

    /// Counts connected components (vertex-sharing triangles).
    std::size_t component_count() const;

private:
    Mesh() = default;
    void compute_mass_properties();

    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    Vec3 com_ = Vec3::Zero();
    double volume_ = 0.0;
};

inline Mesh transform_mesh(const Mesh& m, const Pose& p) { return m.transformed(p); }

/// Axis-aligned box [lo, hi] as a mesh.
Mesh make_box(const Vec3& lo, const Vec3& hi);

/// Concatenates solids into one mesh (indices offset, no welding).
Mesh merge_meshes(const std::vector<Mesh>& parts);

}  // namespace asmplan
