#pragma once

#include <vector>

#include "asmplan/contacts.hpp"
#include "asmplan/geometry/mesh.hpp"

namespace asmplan {

struct StabilityResult {
    bool stable = false;
    Vec3 p_b = Vec3::Zero();
    double theta = 0.0;    // radians
    double quality = 0.0;  // 1 - theta / (pi/2), zero when unstable
    int support_rank = 0;  // affine rank of the projected support region
    std::vector<Vec3> boundary;  // closed 3D support loop, hull order
};

/// Stability of `object` (world frame) on `supports` (already filtered by
/// support_contacts). An empty support set is reported as unstable.
StabilityResult evaluate_stability(const Mesh& object, const ContactSet& supports, double eps_stab = 0.1);

/// Same, from a centre of mass and support patches.
StabilityResult evaluate_stability(const Vec3& com, const ContactSet& supports, double eps_stab = 0.1);

}  // namespace asmplan
