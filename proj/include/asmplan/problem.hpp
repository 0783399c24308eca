#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asmplan/geometry/mesh.hpp"
#include "asmplan/geometry/pose.hpp"

namespace asmplan {

/// Parallel-jaw gripper built from three boxes.
///
/// Hand frame: x = jaw (closing) axis, z = approach, y = z cross x, origin at
/// the grasp centre. `finger` is (l, w, t): length along the approach axis,
/// width along y, thickness along the jaw axis. `palm` is (x, y, z) extents.
/// `standoff` is the distance from the fingertips back to the palm face.
struct GripperModel {
    double max_width = 80.0;
    Vec3 finger{40.0, 10.0, 6.0};
    Vec3 palm{100.0, 30.0, 20.0};
    double standoff = 40.0;
    double mu = 0.5;
};

struct Tolerances {
    double delta_c = 0.1;             // contact tolerance, mm
    double eps_stab = 0.1;            // stability margin, mm
    double alpha_sup = 30.0;          // support cone half-angle, degrees
    double assembly_offset_mm = 150.0;
    int sweep_steps = 32;
    double a_min = 1.0;               // minimum contact area, mm^2
    double eps_n = 0.5;               // normal clustering angle, degrees
    double eps_class = 1e-6;          // hull classification tolerance
};

struct SamplerSettings {
    int n_samples = 200;
    int n_rolls = 8;
    std::uint64_t seed = 1;
};

struct PartSpec {
    std::string id;
    std::filesystem::path mesh_path;  // empty for generated meshes
    Mesh mesh;                        // part frame
    Pose pose;                        // part frame -> assembly frame
};

struct AssemblyProblem {
    std::vector<PartSpec> parts;
    Pose world_pose;                  // assembly frame -> world (table at z = 0)
    GripperModel gripper;
    Tolerances tolerances;
    SamplerSettings sampler;

    std::size_t size() const { return parts.size(); }
    Pose world_pose_of(std::size_t i) const { return world_pose * parts[i].pose; }
    std::optional<std::size_t> index_of(const std::string& id) const;
};

/// Structural and geometric checks. Throws ValidationError on duplicate or
/// empty ids, bad gripper or tolerance values, parts below the table or
/// penetrating one another beyond delta_c (message cites the estimated
/// depth), and parts that touch nothing in the finished assembly.
void validate_problem(const AssemblyProblem& problem);

}  // namespace asmplan
