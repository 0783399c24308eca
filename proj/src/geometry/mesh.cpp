#include "asmplan/geometry/mesh.hpp"

#include <numeric>
#include <string>
#include <unordered_map>

#include "asmplan/errors.hpp"

namespace asmplan {
namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

Mesh Mesh::build(std::vector<Vec3> vertices, std::vector<Triangle> triangles) {
    if (triangles.empty()) throw NonManifold("mesh has no triangles");
    const auto nv = static_cast<std::uint32_t>(vertices.size());
    for (const auto& v : vertices) {
        if (!v.allFinite()) throw NonManifold("mesh has a non-finite vertex");
    }

    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(triangles.size() * 3);
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] >= nv) {
                throw NonManifold("triangle " + std::to_string(t) + " references vertex " +
                                  std::to_string(tri[k]) + " of " + std::to_string(nv));
            }
        }
        const Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
        const Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
        if (0.5 * e1.cross(e2).norm() <= kMinTriangleArea) {
            throw NonManifold("triangle " + std::to_string(t) + " is degenerate");
        }
        for (int k = 0; k < 3; ++k) {
            if (++directed[edge_key(tri[k], tri[(k + 1) % 3])] > 1) {
                throw NonManifold("edge " + std::to_string(tri[k]) + "-" +
                                  std::to_string(tri[(k + 1) % 3]) +
                                  " is used twice with the same winding");
            }
        }
    }
    for (const auto& [key, count] : directed) {
        const auto a = static_cast<std::uint32_t>(key >> 32);
        const auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
        if (!directed.contains(edge_key(b, a))) {
            throw NonManifold("edge " + std::to_string(a) + "-" + std::to_string(b) +
                              " has no opposite half-edge (open surface)");
        }
    }

    Mesh m;
    m.vertices_ = std::move(vertices);
    m.triangles_ = std::move(triangles);
    m.compute_mass_properties();
    if (!(m.volume_ > 0.0)) throw NonManifold("mesh is inside out (non-positive volume)");
    return m;
}

void Mesh::compute_mass_properties() {
    Vec3 lo = vertices_.front(), hi = vertices_.front();
    for (const auto& v : vertices_) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    const Vec3 ref = 0.5 * (lo + hi);
    double vol = 0.0;
    Vec3 moment = Vec3::Zero();
    for (const auto& t : triangles_) {
        const Vec3 a = vertices_[t[0]] - ref;
        const Vec3 b = vertices_[t[1]] - ref;
        const Vec3 c = vertices_[t[2]] - ref;
        const double v = a.dot(b.cross(c)) / 6.0;
        vol += v;
        moment += v * (a + b + c) / 4.0;
    }
    volume_ = vol;
    com_ = vol != 0.0 ? Vec3(ref + moment / vol) : ref;
}

Vec3 Mesh::face_normal(std::size_t tri) const {
    const Vec3 e1 = corner(tri, 1) - corner(tri, 0);
    const Vec3 e2 = corner(tri, 2) - corner(tri, 0);
    return e1.cross(e2).normalized();
}

double Mesh::face_area(std::size_t tri) const {
    const Vec3 e1 = corner(tri, 1) - corner(tri, 0);
    const Vec3 e2 = corner(tri, 2) - corner(tri, 0);
    return 0.5 * e1.cross(e2).norm();
}

double Mesh::surface_area() const {
    double a = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) a += face_area(t);
    return a;
}

Mesh Mesh::transformed(const Pose& pose) const {
    Mesh m;
    m.vertices_.reserve(vertices_.size());
    for (const auto& v : vertices_) m.vertices_.push_back(pose.apply(v));
    m.triangles_ = triangles_;
    m.volume_ = volume_;
    m.com_ = pose.apply(com_);
    return m;
}

std::size_t Mesh::component_count() const {
    std::vector<std::uint32_t> parent(vertices_.size());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& t : triangles_) {
        parent[find(t[1])] = find(t[0]);
        parent[find(t[2])] = find(t[0]);
    }
    std::vector<bool> root_seen(vertices_.size(), false);
    std::size_t n = 0;
    for (const auto& t : triangles_) {
        const auto r = find(t[0]);
        if (!root_seen[r]) {
            root_seen[r] = true;
            ++n;
        }
    }
    return n;
}

Mesh make_box(const Vec3& lo, const Vec3& hi) {
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i) {
        v.emplace_back((i & 1) ? hi.x() : lo.x(), (i & 2) ? hi.y() : lo.y(), (i & 4) ? hi.z() : lo.z());
    }
    // Outward-wound quads split into two triangles each.
    std::vector<Triangle> t = {
        {0, 2, 1}, {1, 2, 3},  // -z
        {4, 5, 6}, {5, 7, 6},  // +z
        {0, 1, 4}, {1, 5, 4},  // -y
        {2, 6, 3}, {3, 6, 7},  // +y
        {0, 4, 2}, {2, 4, 6},  // -x
        {1, 3, 5}, {3, 7, 5},  // +x
    };
    return Mesh::build(std::move(v), std::move(t));
}

Mesh merge_meshes(const std::vector<Mesh>& parts) {
    std::vector<Vec3> v;
    std::vector<Triangle> t;
    for (const auto& m : parts) {
        const auto base = static_cast<std::uint32_t>(v.size());
        v.insert(v.end(), m.vertices().begin(), m.vertices().end());
        for (const auto& tri : m.triangles()) t.push_back({tri[0] + base, tri[1] + base, tri[2] + base});
    }
    return Mesh::build(std::move(v), std::move(t));
}

}  // namespace asmplan
