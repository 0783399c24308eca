#include "asmplan/stability.hpp"

#include <cmath>
#include <numbers>

#include "asmplan/geometry/hull.hpp"
#include "asmplan/geometry/path.hpp"

namespace asmplan {

StabilityResult evaluate_stability(const Mesh& object, const ContactSet& supports, double eps_stab) {
    return evaluate_stability(object.com(), supports, eps_stab);
}

StabilityResult evaluate_stability(const Vec3& com, const ContactSet& supports, double eps_stab) {
    StabilityResult r;
    std::vector<Vec3> lifted;
    for (const auto& c : supports.contacts) {
        for (const auto& piece : c.pieces) lifted.insert(lifted.end(), piece.begin(), piece.end());
    }
    if (lifted.empty()) return r;

    std::vector<Vec2> flat;
    flat.reserve(lifted.size());
    for (const auto& p : lifted) flat.emplace_back(p.x(), p.y());
    const Hull2D hull = convex_hull(std::span<const Vec2>(flat));
    r.support_rank = hull.rank;
    if (hull.rank < 2) return r;

    // Strictly inside by the margin; the boundary band counts as unstable.
    if (signed_distance(hull, Vec2(com.x(), com.y())) <= eps_stab) return r;

    for (auto s : hull.source_index) r.boundary.push_back(lifted[s]);
    const auto near = nearest_on_polyline(r.boundary, com);
    const Vec3 v = com - near.point;
    r.stable = true;
    r.p_b = near.point;
    const double len = v.norm();
    r.theta = len > 0.0 ? std::asin(std::min(1.0, std::abs(v.z()) / len)) : std::numbers::pi / 2;
    r.quality = 1.0 - r.theta / (std::numbers::pi / 2);
    return r;
}

}  // namespace asmplan
