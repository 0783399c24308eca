#include "asmplan/evaluation.hpp"

#include <atomic>
#include <thread>

#include "asmplan/errors.hpp"

namespace asmplan {
namespace {

std::size_t require_index(const AssemblyProblem& problem, const std::string& id) {
    const auto i = problem.index_of(id);
    if (!i) throw ValidationError("unknown part id '" + id + "'");
    return *i;
}

PartMask mask_from_ids(const AssemblyProblem& problem, const std::vector<std::string>& ids) {
    PartMask m = 0;
    for (const auto& id : ids) m |= PartMask{1} << require_index(problem, id);
    return m;
}

}  // namespace

Workspace::Workspace(const AssemblyProblem& problem) : problem_(problem) {
    const std::size_t n = problem.size();
    if (n > 64) throw TooManyParts("at most 64 parts can be represented");
    poses_.reserve(n);
    meshes_.reserve(n);
    models_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        poses_.push_back(problem.world_pose_of(i));
        meshes_.push_back(problem.parts[i].mesh.transformed(poses_.back()));
        models_.emplace_back(meshes_.back());
    }
    grasp_once_ = std::make_unique<std::once_flag[]>(n);
    grasps_.resize(n);
}

const std::vector<Grasp>& Workspace::grasps(std::size_t i) const {
    std::call_once(grasp_once_[i], [&] {
        const auto& s = problem_.sampler;
        grasps_[i] = sample_force_closure_grasps(problem_.parts[i].mesh, problem_.gripper, s.n_samples, s.n_rolls,
                                                 s.seed, problem_.tolerances.delta_c);
    });
    return grasps_[i];
}

void Workspace::prepare_grasps(int threads) const {
    const std::size_t n = size();
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) grasps(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) grasps(i);
        });
    }
}

ContactSet Workspace::contacts(std::size_t part, PartMask placed) const {
    std::vector<BaseEntity> bases;
    for (std::size_t j = 0; j < size(); ++j) {
        if (placed >> j & 1) bases.push_back({id(j), &meshes_[j], &models_[j]});
    }
    const auto& t = problem_.tolerances;
    return detect_contacts(id(part), meshes_[part], bases, true, {t.delta_c, t.eps_n, t.a_min});
}

std::vector<const CollisionModel*> Workspace::obstacles(PartMask placed) const {
    std::vector<const CollisionModel*> out;
    for (std::size_t j = 0; j < size(); ++j) {
        if (placed >> j & 1) out.push_back(&models_[j]);
    }
    return out;
}

PartMask mask_of(std::span<const std::size_t> parts) {
    PartMask m = 0;
    for (auto p : parts) m |= PartMask{1} << p;
    return m;
}

StabilityResult step_stability(const Workspace& ws, std::size_t part, PartMask placed) {
    const auto& t = ws.problem().tolerances;
    const ContactSet supports = support_contacts(ws.contacts(part, placed), t.alpha_sup);
    return evaluate_stability(ws.world_mesh(part), supports, t.eps_stab);
}

GraspabilityResult step_graspability(const Workspace& ws, std::size_t part, PartMask placed) {
    const auto obstacles = ws.obstacles(placed);
    GraspabilityResult r;
    r.indices = accessible_grasps(ws.grasps(part), ws.pose(part), ws.problem().gripper, obstacles, true,
                                  ws.problem().tolerances.delta_c);
    r.count = r.indices.size();
    return r;
}

AssemblabilityResult step_assemblability(const Workspace& ws, std::size_t part, PartMask placed) {
    const auto& t = ws.problem().tolerances;
    const ContactSet cs = ws.contacts(part, placed);
    AssemblabilityResult r;
    if (cs.empty()) {
        r.floating = true;
        return r;
    }
    const auto normals = cs.normals();
    const CaseLabel label = classify(normals, t.eps_n, t.eps_class);
    const AssemblyDirection d = optimal_direction(label, normals, t.eps_n);
    const auto finished = ws.obstacles(placed);
    r.direction = swept_reset(d, ws.problem().parts[part].mesh, ws.pose(part), finished,
                              {t.delta_c, t.assembly_offset_mm, t.sweep_steps, true});
    return r;
}

std::vector<double> stability_row(const std::vector<std::string>& order, const AssemblyProblem& problem) {
    const Workspace ws(problem);
    std::vector<double> row;
    PartMask placed = 0;
    for (const auto& id : order) {
        const auto i = require_index(problem, id);
        row.push_back(step_stability(ws, i, placed).quality);
        if (row.back() <= 0.0) break;
        placed |= PartMask{1} << i;
    }
    return row;
}

std::size_t graspability(const std::string& object_id, const std::vector<std::string>& placed,
                         const AssemblyProblem& problem) {
    const Workspace ws(problem);
    return step_graspability(ws, require_index(problem, object_id), mask_from_ids(problem, placed)).count;
}

AssemblyDirection evaluate_assemblability(const std::string& object_id, const std::vector<std::string>& placed,
                                          const AssemblyProblem& problem) {
    const Workspace ws(problem);
    const auto r = step_assemblability(ws, require_index(problem, object_id), mask_from_ids(problem, placed));
    if (r.floating) throw EmptyNormals("'" + object_id + "' touches nothing");
    return r.direction;
}

}  // namespace asmplan
