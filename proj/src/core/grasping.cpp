#include "asmplan/grasping.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace asmplan {
namespace {

struct BoxSpec {
    Vec3 center;
    Vec3 half;
};

std::array<BoxSpec, 3> hand_boxes(const GripperModel& g, double width) {
    const double l = g.finger.x(), w = g.finger.y(), t = g.finger.z();
    const double fz = w / 2 - l / 2;
    const double px = width / 2 + t / 2;
    return {{
        {{px, 0, fz}, {t / 2, w / 2, l / 2}},
        {{-px, 0, fz}, {t / 2, w / 2, l / 2}},
        {{0, 0, w / 2 - g.standoff - g.palm.z() / 2}, g.palm / 2},
    }};
}

double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Uniform double in [0, 1) from the top 53 bits; independent of the
/// standard library's distribution implementations.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Pose Grasp::hand_pose() const {
    Mat3 r;
    r.col(0) = jaw_axis;
    r.col(1) = approach.cross(jaw_axis);
    r.col(2) = approach;
    return {r, center};
}

Grasp Grasp::transformed(const Pose& p) const {
    return {p.apply(center), p.apply_direction(jaw_axis), p.apply_direction(approach), width};
}

bool antipodal_force_closure(const Vec3& p, const Vec3& n_p, const Vec3& q, const Vec3& n_q, double mu) {
    const Vec3 d = q - p;
    if (d.norm() <= 0.0) return false;
    const double cone = std::atan(mu);
    // The jaw pushes p toward q and q toward p.
    return angle_between(d, -n_p) <= cone && angle_between(-d, -n_q) <= cone;
}

CollisionModel gripper_model(const GripperModel& g, const Grasp& grasp, double shrink) {
    const Pose hand = grasp.hand_pose();
    std::vector<Vec3> verts;
    std::vector<Triangle> tris;
    for (const auto& b : hand_boxes(g, grasp.width)) {
        const CollisionModel box = CollisionModel::box(hand * Pose::from_translation(b.center),
                                                       (b.half.array() - shrink).max(1e-6).matrix());
        const auto base = static_cast<std::uint32_t>(verts.size());
        verts.insert(verts.end(), box.vertices().begin(), box.vertices().end());
        for (const auto& t : box.triangles()) tris.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
    return CollisionModel(std::move(verts), std::move(tris));
}

std::vector<Vec3> gripper_vertices(const GripperModel& g, const Grasp& grasp) {
    const Pose hand = grasp.hand_pose();
    std::vector<Vec3> out;
    for (const auto& b : hand_boxes(g, grasp.width)) {
        for (int i = 0; i < 8; ++i) {
            const Vec3 corner((i & 1) ? b.half.x() : -b.half.x(), (i & 2) ? b.half.y() : -b.half.y(),
                              (i & 4) ? b.half.z() : -b.half.z());
            out.push_back(hand.apply(b.center + corner));
        }
    }
    return out;
}

std::vector<Grasp> sample_force_closure_grasps(const Mesh& mesh, const GripperModel& g, int n_samples, int n_rolls,
                                               std::uint64_t seed, double contact_tol) {
    std::vector<Grasp> out;
    const CollisionModel model(mesh);
    std::vector<double> cumulative(mesh.triangle_count());
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) cumulative[t] = total += mesh.face_area(t);

    std::mt19937_64 rng(seed);
    for (int s = 0; s < n_samples; ++s) {
        const double pick = unit_draw(rng) * total;
        const double r1 = unit_draw(rng), r2 = unit_draw(rng);
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
        const std::size_t tri = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                      cumulative.size() - 1);
        const double sr = std::sqrt(r1);
        const Vec3 p = (1 - sr) * mesh.corner(tri, 0) + sr * (1 - r2) * mesh.corner(tri, 1) + sr * r2 * mesh.corner(tri, 2);
        const Vec3 n_p = mesh.face_normal(tri);

        std::uint32_t hit_tri = 0;
        const double width = raycast(model, p, -n_p, 1e-6, &hit_tri);
        if (width <= 0.0 || width > g.max_width) continue;
        const Vec3 q = p - n_p * width;
        const Vec3 n_q = mesh.face_normal(hit_tri);
        if (!antipodal_force_closure(p, n_p, q, n_q, g.mu)) continue;

        const Vec3 jaw = (q - p).normalized();
        int axis = 0;
        for (int k = 1; k < 3; ++k) {
            if (std::abs(jaw[k]) < std::abs(jaw[axis])) axis = k;
        }
        const Vec3 e = Vec3::Unit(axis);
        const Vec3 a0 = (e - e.dot(jaw) * jaw).normalized();
        const Vec3 a1 = jaw.cross(a0);
        for (int r = 0; r < n_rolls; ++r) {
            const double ang = 2.0 * std::numbers::pi * r / n_rolls;
            Vec3 approach = std::cos(ang) * a0 + std::sin(ang) * a1;
            approach = (approach - approach.dot(jaw) * jaw).normalized();
            const Grasp grasp{(p + q) / 2, jaw, approach, width};
            if (meshes_intersect(gripper_model(g, grasp, contact_tol), model, 0.0)) continue;
            out.push_back(grasp);
        }
    }
    return out;
}

bool gripper_collides(const GripperModel& g, const Grasp& world_grasp, std::span<const CollisionModel* const> obstacles,
                      bool with_table, double contact_tol) {
    if (with_table) {
        for (const auto& v : gripper_vertices(g, world_grasp)) {
            if (v.z() < -contact_tol) return true;
        }
    }
    if (obstacles.empty()) return false;
    const CollisionModel hand = gripper_model(g, world_grasp, contact_tol);
    for (const auto* obs : obstacles) {
        if (meshes_intersect(hand, *obs, 0.0)) return true;
    }
    return false;
}

std::vector<std::size_t> accessible_grasps(const std::vector<Grasp>& grasps, const Pose& obj_pose, const GripperModel& g,
                                           std::span<const CollisionModel* const> obstacles, bool with_table,
                                           double contact_tol, std::vector<Grasp>* world) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < grasps.size(); ++i) {
        const Grasp wg = grasps[i].transformed(obj_pose);
        if (gripper_collides(g, wg, obstacles, with_table, contact_tol)) continue;
        keep.push_back(i);
        if (world) world->push_back(wg);
    }
    return keep;
}

}  // namespace asmplan
