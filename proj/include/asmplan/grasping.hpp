#pragma once

#include <span>
#include <vector>

#include "asmplan/geometry/collision.hpp"
#include "asmplan/geometry/mesh.hpp"
#include "asmplan/problem.hpp"

namespace asmplan {

struct Grasp {
    Vec3 center = Vec3::Zero();
    Vec3 jaw_axis = Vec3::UnitX();
    Vec3 approach = Vec3::UnitZ();
    double width = 0.0;

    /// x = jaw_axis, z = approach, y = z x jaw_axis, origin = center.
    Pose hand_pose() const;
    Grasp transformed(const Pose& p) const;
    bool operator==(const Grasp&) const = default;
};

/// Two-contact force closure: the segment p -> q lies inside both friction
/// cones (half-angle atan(mu)) around the inward normals.
bool antipodal_force_closure(const Vec3& p, const Vec3& n_p, const Vec3& q, const Vec3& n_q, double mu);

/// Finger and palm boxes of the gripper at `grasp`, as one soup. Boxes are
/// shrunk by `shrink` on every side.
CollisionModel gripper_model(const GripperModel& g, const Grasp& grasp, double shrink = 0.0);

/// World-space vertices of the gripper boxes (unshrunk), for table checks.
std::vector<Vec3> gripper_vertices(const GripperModel& g, const Grasp& grasp);

/// Force-closure grasps in the mesh frame. Surface points are drawn by area;
/// each is paired with the surface hit by the inward ray; `n_rolls` approach
/// directions are spread uniformly about the jaw axis and grasps whose
/// gripper overlaps the object are dropped. Deterministic in `seed`.
std::vector<Grasp> sample_force_closure_grasps(const Mesh& mesh, const GripperModel& g, int n_samples, int n_rolls,
                                               std::uint64_t seed, double contact_tol = 0.1);

/// Gripper against obstacles and (optionally) the table plane.
bool gripper_collides(const GripperModel& g, const Grasp& world_grasp, std::span<const CollisionModel* const> obstacles,
                      bool with_table, double contact_tol);

/// Grasps mapped to the world by `obj_pose` that clear the table and every
/// obstacle. Returns indices into `grasps`; `world` (optional) receives the
/// retained grasps in world coordinates.
std::vector<std::size_t> accessible_grasps(const std::vector<Grasp>& grasps, const Pose& obj_pose, const GripperModel& g,
                                           std::span<const CollisionModel* const> obstacles, bool with_table,
                                           double contact_tol, std::vector<Grasp>* world = nullptr);

}  // namespace asmplan
