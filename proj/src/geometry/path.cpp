#include "asmplan/geometry/path.hpp"

#include <algorithm>
#include <limits>

namespace asmplan {

std::vector<Pose> sweep_poses(const Pose& goal, const Vec3& dir, double offset, int steps) {
    std::vector<Pose> poses;
    poses.reserve(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k < steps; ++k) {
        const double back = offset * (1.0 - static_cast<double>(k) / steps);
        poses.emplace_back(goal.rotation(), goal.translation() - dir * back);
    }
    poses.push_back(goal);
    return poses;
}

PolylinePoint nearest_on_polyline(std::span<const Vec3> loop, const Vec3& p) {
    PolylinePoint best;
    best.distance = std::numeric_limits<double>::infinity();
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = loop[i];
        const Vec3& b = loop[(i + 1) % n];
        const Vec3 ab = b - a;
        const double len2 = ab.squaredNorm();
        const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
        const Vec3 q = a + t * ab;
        const double d = (p - q).norm();
        if (d < best.distance * (1.0 - 1e-12)) best = {q, d, i};
    }
    return best;
}

}  // namespace asmplan
