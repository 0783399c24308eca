#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asmplan/geometry/mesh.hpp"
#include "asmplan/planner.hpp"
#include "asmplan/problem.hpp"

namespace asmplan {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,   // I/O, parse, schema or validation failure
    kExitNoSolution = 2,
    kExitLimits = 3,       // too many parts without --force
};

struct PlanCommand {
    std::filesystem::path problem;
    std::optional<std::filesystem::path> output;  // stdout when absent
    bool all = false;
    bool exhaustive = false;
    std::optional<std::uint64_t> seed;
    std::size_t max_grasps = 50;
    bool force = false;
    int threads = 1;
};

struct MatricesCommand {
    std::filesystem::path problem;
    std::optional<std::filesystem::path> output;
    bool exhaustive = false;
    std::optional<std::uint64_t> seed;
    bool force = false;
    int threads = 1;
};

/// Writes the plan (or, with no solution, the infeasibility report) and
/// returns an ExitCode.
int cmd_plan(const PlanCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_matrices(const MatricesCommand& cmd, std::ostream& out, std::ostream& err);

/// One OBJ per step: finished parts, the incoming part at its start pose and
/// an arrow along its assembly direction. Returns the files written.
/// Throws InconsistentPlan when the plan's ids do not match the problem.
std::vector<std::filesystem::path> cmd_export(const AssemblyProblem& problem, const AssemblyPlan& plan,
                                              const std::filesystem::path& dir);

/// Writes each part's mesh and a problem.json for a built-in scene.
/// Returns the path of problem.json.
std::filesystem::path cmd_gen(const std::string& scene, const std::filesystem::path& dir);

/// Closed arrow from `tail` to `tip`.
Mesh arrow_mesh(const Vec3& tail, const Vec3& tip, double shaft_half_width = 1.5, double head_half_width = 4.0);

/// Full command line: plan | matrices | export | gen.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace asmplan
