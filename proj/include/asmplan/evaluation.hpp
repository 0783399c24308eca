#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "asmplan/assemblability.hpp"
#include "asmplan/contacts.hpp"
#include "asmplan/grasping.hpp"
#include "asmplan/problem.hpp"
#include "asmplan/stability.hpp"

namespace asmplan {

/// Bit i set = part i already placed.
using PartMask = std::uint64_t;

/// World-frame geometry of a problem plus the per-part grasp sets, which are
/// sampled on first use (thread-safe, write-once).
class Workspace {
public:
    explicit Workspace(const AssemblyProblem& problem);

    const AssemblyProblem& problem() const { return problem_; }
    std::size_t size() const { return poses_.size(); }
    const Pose& pose(std::size_t i) const { return poses_[i]; }
    const Mesh& world_mesh(std::size_t i) const { return meshes_[i]; }
    const CollisionModel& model(std::size_t i) const { return models_[i]; }
    const std::string& id(std::size_t i) const { return problem_.parts[i].id; }

    /// Force-closure grasps of part i in its own frame.
    const std::vector<Grasp>& grasps(std::size_t i) const;
    /// Samples every part's grasps using up to `threads` workers.
    void prepare_grasps(int threads) const;

    ContactSet contacts(std::size_t part, PartMask placed) const;
    std::vector<const CollisionModel*> obstacles(PartMask placed) const;

private:
    const AssemblyProblem& problem_;
    std::vector<Pose> poses_;
    std::vector<Mesh> meshes_;
    std::vector<CollisionModel> models_;
    mutable std::unique_ptr<std::once_flag[]> grasp_once_;
    mutable std::vector<std::vector<Grasp>> grasps_;
};

PartMask mask_of(std::span<const std::size_t> parts);

StabilityResult step_stability(const Workspace& ws, std::size_t part, PartMask placed);

struct GraspabilityResult {
    std::size_t count = 0;
    std::vector<std::size_t> indices;  // into ws.grasps(part)
};
GraspabilityResult step_graspability(const Workspace& ws, std::size_t part, PartMask placed);

/// Contacts -> case analysis -> sweep test. An object with no contacts gets
/// quality 0 and `floating` set.
struct AssemblabilityResult {
    AssemblyDirection direction;
    bool floating = false;
};
AssemblabilityResult step_assemblability(const Workspace& ws, std::size_t part, PartMask placed);

/// Stability qualities along `order` (part ids), stopping after the first zero.
std::vector<double> stability_row(const std::vector<std::string>& order, const AssemblyProblem& problem);

/// Number of accessible grasps of `object_id` with `placed` parts as obstacles.
std::size_t graspability(const std::string& object_id, const std::vector<std::string>& placed,
                         const AssemblyProblem& problem);

AssemblyDirection evaluate_assemblability(const std::string& object_id, const std::vector<std::string>& placed,
                                          const AssemblyProblem& problem);

}  // namespace asmplan
