#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "asmplan/planner.hpp"
#include "asmplan/problem.hpp"

namespace asmplan {

using Json = nlohmann::ordered_json;

/// Reads a problem file; mesh paths are relative to the file's directory.
/// Omitted world_pose, gripper, tolerances and sampler fields take defaults.
/// Throws SchemaError (field-level), ParseError/NonManifold (mesh files) and
/// ValidationError (missing mesh file, duplicate ids, penetration, ...).
AssemblyProblem parse_problem(const std::filesystem::path& path, bool validate = true);
AssemblyProblem problem_from_json(const Json& j, const std::filesystem::path& base_dir);

/// Problem document with the given mesh paths (one per part, as written).
Json problem_to_json(const AssemblyProblem& problem, const std::vector<std::string>& mesh_paths);

/// Writes `<id>.obj` per part (part frame) and problem.json into `dir`.
/// Returns the path of problem.json.
std::filesystem::path write_problem(const AssemblyProblem& problem, const std::filesystem::path& dir);

Json pose_to_json(const Pose& p);
Pose pose_from_json(const Json& j, const std::string& where);

/// `max_grasps` caps the grasps listed per step; `g` always carries the full count.
Json plan_to_json(const AssemblyPlan& plan, std::size_t max_grasps = 50);
AssemblyPlan plan_from_json(const Json& j);

Json settings_to_json(const PlanSettings& s);
Json report_to_json(const std::vector<Infeasibility>& report);

/// S, G, A, A' with "unevaluated" markers, feasibility flags and per-row minima.
Json matrices_to_json(const Evaluation& ev, bool exhaustive);

}  // namespace asmplan
