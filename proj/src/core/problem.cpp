#include "asmplan/problem.hpp"

#include <set>
#include <sstream>

#include "asmplan/contacts.hpp"
#include "asmplan/errors.hpp"
#include "asmplan/geometry/collision.hpp"

namespace asmplan {

std::optional<std::size_t> AssemblyProblem::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].id == id) return i;
    }
    return std::nullopt;
}

void validate_problem(const AssemblyProblem& problem) {
    if (problem.parts.empty()) throw ValidationError("problem has no parts");
    std::set<std::string> seen;
    for (const auto& p : problem.parts) {
        if (p.id.empty()) throw ValidationError("part with empty id");
        if (p.id == kTableId) throw ValidationError("part id 'table' is reserved");
        if (!seen.insert(p.id).second) throw ValidationError("duplicate part id '" + p.id + "'");
        if (!is_rotation(p.pose.rotation(), 1e-6)) throw ValidationError("pose of '" + p.id + "' is not a rotation");
    }
    if (!is_rotation(problem.world_pose.rotation(), 1e-6)) throw ValidationError("world_pose is not a rotation");

    const auto& g = problem.gripper;
    if (!(g.max_width > 0 && (g.finger.array() > 0).all() && (g.palm.array() > 0).all() && g.standoff > 0 && g.mu > 0)) {
        throw ValidationError("gripper dimensions and mu must be positive");
    }
    const auto& t = problem.tolerances;
    if (!(t.delta_c > 0 && t.eps_stab >= 0 && t.alpha_sup >= 0 && t.alpha_sup < 90 && t.assembly_offset_mm > 0 &&
          t.sweep_steps >= 1 && t.a_min > 0 && t.eps_n > 0 && t.eps_class > 0)) {
        throw ValidationError("tolerances out of range");
    }
    if (problem.sampler.n_samples < 1 || problem.sampler.n_rolls < 1) {
        throw ValidationError("sampler needs n_samples >= 1 and n_rolls >= 1");
    }

    const std::size_t n = problem.size();
    std::vector<Mesh> world;
    std::vector<CollisionModel> models;
    world.reserve(n);
    models.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        world.push_back(problem.parts[i].mesh.transformed(problem.world_pose_of(i)));
        models.emplace_back(world.back());
        double min_z = std::numeric_limits<double>::infinity();
        for (const auto& v : world.back().vertices()) min_z = std::min(min_z, v.z());
        if (min_z < -t.delta_c) {
            std::ostringstream msg;
            msg << "part '" << problem.parts[i].id << "' reaches " << -min_z << " mm below the table";
            throw ValidationError(msg.str());
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!collides(world[i], Pose::identity(), models[j], t.delta_c)) continue;
            const double depth = estimate_penetration_depth(world[i], Pose::identity(), world[j], Pose::identity(), t.delta_c);
            std::ostringstream msg;
            msg << "parts '" << problem.parts[i].id << "' and '" << problem.parts[j].id
                << "' overlap: penetration depth about " << depth << " mm exceeds delta_c " << t.delta_c;
            throw ValidationError(msg.str());
        }
    }
    const ContactParams cp{t.delta_c, t.eps_n, t.a_min};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<BaseEntity> others;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) others.push_back({problem.parts[j].id, &world[j], &models[j]});
        }
        if (detect_contacts(problem.parts[i].id, world[i], others, true, cp).empty()) {
            throw ValidationError("part '" + problem.parts[i].id + "' touches nothing in the finished assembly");
        }
    }
}

}  // namespace asmplan
