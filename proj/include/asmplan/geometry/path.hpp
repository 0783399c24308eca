#pragma once

#include <span>
#include <vector>

#include "asmplan/geometry/pose.hpp"

namespace asmplan {

/// Poses of a straight-line approach ending at `goal`:
/// pose_k = goal translated by -dir * offset * (1 - k/steps), k = 0..steps.
/// The last pose is `goal` exactly.
std::vector<Pose> sweep_poses(const Pose& goal, const Vec3& dir, double offset, int steps);

struct PolylinePoint {
    Vec3 point;
    double distance = 0.0;
    std::size_t segment = 0;
};

/// Nearest point on the closed loop v0 -> v1 -> ... -> v{n-1} -> v0.
/// Ties (within a relative 1e-12) go to the lowest segment index.
PolylinePoint nearest_on_polyline(std::span<const Vec3> loop, const Vec3& p);

}  // namespace asmplan
