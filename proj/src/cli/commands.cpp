#include "asmplan/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"

#include "asmplan/errors.hpp"
#include "asmplan/fixtures.hpp"
#include "asmplan/geometry/hull.hpp"
#include "asmplan/geometry/mesh_io.hpp"
#include "asmplan/io.hpp"

namespace asmplan {
namespace {

namespace fs = std::filesystem;

void emit(const Json& j, const std::optional<fs::path>& path, std::ostream& out) {
    const std::string text = j.dump(2) + "\n";
    if (!path) {
        out << text;
        return;
    }
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw ParseError("cannot write '" + path->string() + "'");
    f << text;
    if (!f) throw ParseError("failed writing '" + path->string() + "'");
}

AssemblyProblem load_checked(const fs::path& path, bool force, std::optional<std::uint64_t> seed) {
    AssemblyProblem problem = parse_problem(path, false);
    check_part_limit(problem.size(), kDefaultMaxParts, force);
    validate_problem(problem);
    if (seed) problem.sampler.seed = *seed;
    return problem;
}

/// Maps library errors to exit codes; the body returns the success code.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const TooManyParts& e) {
        err << "error: " << e.what() << '\n';
        return kExitLimits;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

Pose rotation_to(const Vec3& dir) {
    const auto [u, w0] = plane_basis(dir);
    Mat3 r;
    r.col(0) = u.normalized();
    r.col(1) = dir.cross(r.col(0));
    r.col(2) = dir;
    return {r, Vec3::Zero()};
}

}  // namespace

Mesh arrow_mesh(const Vec3& tail, const Vec3& tip, double shaft_half_width, double head_half_width) {
    const Vec3 d = tip - tail;
    const double len = d.norm();
    if (len <= 0.0) throw ValidationError("arrow needs distinct end points");
    const double head = std::min(0.25 * len, 4.0 * head_half_width);
    const double s = shaft_half_width, h = head_half_width;
    // Local frame: axis along +z, tail at the origin.
    std::vector<Vec3> v;
    for (double z : {0.0, len - head}) {
        v.push_back({-s, -s, z});
        v.push_back({s, -s, z});
        v.push_back({s, s, z});
        v.push_back({-s, s, z});
    }
    v.push_back({-h, -h, len - head});
    v.push_back({h, -h, len - head});
    v.push_back({h, h, len - head});
    v.push_back({-h, h, len - head});
    v.push_back({0, 0, len});
    std::vector<Triangle> t;
    auto quad = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t e) {
        t.push_back({a, b, c});
        t.push_back({a, c, e});
    };
    quad(0, 3, 2, 1);  // tail cap, facing -z
    for (std::uint32_t k = 0; k < 4; ++k) {
        const std::uint32_t n = (k + 1) % 4;
        quad(k, n, 4 + n, 4 + k);      // shaft side
        quad(4 + k, 4 + n, 8 + n, 8 + k);  // ring under the head, facing -z
        t.push_back({8 + k, 8 + n, 12});
    }
    const Pose place = Pose::from_translation(tail) * rotation_to(d / len);
    for (auto& p : v) p = place.apply(p);
    return Mesh::build(std::move(v), std::move(t));
}

int cmd_plan(const PlanCommand& cmd, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const AssemblyProblem problem = load_checked(cmd.problem, cmd.force, cmd.seed);
        PlannerOptions options;
        options.exhaustive = cmd.exhaustive;
        options.threads = cmd.threads;
        options.force = cmd.force;
        try {
            const auto plans = cmd.all ? plan_all(problem, options) : std::vector<AssemblyPlan>{plan(problem, options)};
            Json j = plan_to_json(plans.front(), cmd.max_grasps);
            if (cmd.all) {
                Json every = Json::array();
                for (const auto& p : plans) every.push_back(plan_to_json(p, cmd.max_grasps));
                j["all_plans"] = every;
            }
            emit(j, cmd.output, out);
            return static_cast<int>(kExitOk);
        } catch (const NoFeasibleSequence& e) {
            const PlanSettings settings{problem.sampler, problem.tolerances, problem.gripper, cmd.exhaustive};
            const Json j = {{"status", "no_feasible_sequence"},
                            {"message", e.what()},
                            {"infeasible", report_to_json(e.report())},
                            {"settings", settings_to_json(settings)}};
            emit(j, cmd.output, out);
            err << "error: " << e.what() << '\n';
            return static_cast<int>(kExitNoSolution);
        }
    });
}

int cmd_matrices(const MatricesCommand& cmd, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const AssemblyProblem problem = load_checked(cmd.problem, cmd.force, cmd.seed);
        PlannerOptions options;
        options.exhaustive = cmd.exhaustive;
        options.threads = cmd.threads;
        options.force = cmd.force;
        const Workspace ws(problem);
        const Evaluation ev = evaluate_all(ws, options);
        emit(matrices_to_json(ev, cmd.exhaustive), cmd.output, out);
        return static_cast<int>(kExitOk);
    });
}

std::vector<fs::path> cmd_export(const AssemblyProblem& problem, const AssemblyPlan& plan, const fs::path& dir) {
    if (plan.order.size() != problem.size() || plan.steps.size() != problem.size()) {
        throw InconsistentPlan("plan has " + std::to_string(plan.order.size()) + " parts, problem has " +
                               std::to_string(problem.size()));
    }
    std::vector<std::size_t> index;
    std::set<std::string> seen;
    for (std::size_t k = 0; k < plan.order.size(); ++k) {
        const auto i = problem.index_of(plan.order[k]);
        if (!i) throw InconsistentPlan("plan part '" + plan.order[k] + "' is not in the problem");
        if (!seen.insert(plan.order[k]).second) throw InconsistentPlan("plan lists '" + plan.order[k] + "' twice");
        if (plan.steps[k].id != plan.order[k]) throw InconsistentPlan("step " + std::to_string(k + 1) + " does not match the order");
        index.push_back(*i);
    }

    fs::create_directories(dir);
    const double offset = problem.tolerances.assembly_offset_mm;
    std::vector<fs::path> written;
    for (std::size_t k = 0; k < index.size(); ++k) {
        const Vec3 dir_k = plan.steps[k].direction;
        if (dir_k.norm() < 0.5) throw InconsistentPlan("step " + std::to_string(k + 1) + " has no assembly direction");
        const Vec3 n = dir_k.normalized();
        std::vector<std::pair<std::string, Mesh>> solids;
        for (std::size_t j = 0; j < k; ++j) {
            solids.emplace_back(plan.order[j], problem.parts[index[j]].mesh.transformed(problem.world_pose_of(index[j])));
        }
        const Pose goal = problem.world_pose_of(index[k]);
        const Pose start = Pose::from_translation(-n * offset) * goal;
        const Mesh incoming = problem.parts[index[k]].mesh.transformed(start);
        const Vec3 tail = incoming.com();
        solids.emplace_back(plan.order[k], incoming);
        solids.emplace_back("arrow", arrow_mesh(tail, tail + n * offset));

        const fs::path path = dir / ("step_" + std::to_string(k + 1) + ".obj");
        std::ofstream f(path);
        if (!f) throw ParseError("cannot write '" + path.string() + "'");
        write_obj_scene(f, solids);
        written.push_back(path);
    }
    return written;
}

fs::path cmd_gen(const std::string& scene, const fs::path& dir) { return write_problem(make_scene(scene), dir); }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Assembly sequence planner", "asmplan"};
    app.require_subcommand(1);

    PlanCommand plan_cmd;
    std::string plan_out;
    auto* plan_app = app.add_subcommand("plan", "Find the optimal assembly order");
    plan_app->add_option("problem", plan_cmd.problem, "Problem JSON")->required();
    plan_app->add_option("-o,--output", plan_out, "Plan JSON (stdout when omitted)");
    plan_app->add_flag("--all", plan_cmd.all, "Emit every co-optimal plan");
    plan_app->add_flag("--exhaustive", plan_cmd.exhaustive, "Evaluate every cell without pruning");
    auto* plan_seed = plan_app->add_option("--seed", "Grasp sampler seed");
    plan_app->add_option("--max-grasps", plan_cmd.max_grasps, "Grasps listed per step")->capture_default_str();
    plan_app->add_flag("--force", plan_cmd.force, "Run with more parts than the limit");
    plan_app->add_option("--threads", plan_cmd.threads, "Worker threads")->check(CLI::PositiveNumber);

    MatricesCommand mat_cmd;
    std::string mat_out;
    auto* mat_app = app.add_subcommand("matrices", "Dump the quality matrices");
    mat_app->add_option("problem", mat_cmd.problem, "Problem JSON")->required();
    mat_app->add_option("-o,--output", mat_out, "Matrices JSON (stdout when omitted)");
    mat_app->add_flag("--exhaustive", mat_cmd.exhaustive, "Evaluate every cell without pruning");
    auto* mat_seed = mat_app->add_option("--seed", "Grasp sampler seed");
    mat_app->add_flag("--force", mat_cmd.force, "Run with more parts than the limit");
    mat_app->add_option("--threads", mat_cmd.threads, "Worker threads")->check(CLI::PositiveNumber);

    fs::path export_problem, export_plan, export_dir;
    auto* exp_app = app.add_subcommand("export", "Write one OBJ per assembly step");
    exp_app->add_option("problem", export_problem, "Problem JSON")->required();
    exp_app->add_option("plan", export_plan, "Plan JSON")->required();
    exp_app->add_option("-d,--dir,-o,--output", export_dir, "Output directory")->required();

    std::string gen_scene;
    fs::path gen_dir;
    auto* gen_app = app.add_subcommand("gen", "Write a built-in scene");
    gen_app->add_option("scene", gen_scene, "Scene name")->required();
    gen_app->add_option("-d,--dir,-o,--output", gen_dir, "Output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitInputError);
    }

    auto seed_of = [](CLI::Option* opt) -> std::optional<std::uint64_t> {
        if (opt->count() == 0) return std::nullopt;
        return opt->as<std::uint64_t>();
    };

    if (plan_app->parsed()) {
        if (!plan_out.empty()) plan_cmd.output = plan_out;
        plan_cmd.seed = seed_of(plan_seed);
        return cmd_plan(plan_cmd, out, err);
    }
    if (mat_app->parsed()) {
        if (!mat_out.empty()) mat_cmd.output = mat_out;
        mat_cmd.seed = seed_of(mat_seed);
        return cmd_matrices(mat_cmd, out, err);
    }
    if (exp_app->parsed()) {
        return guarded(err, [&] {
            const AssemblyProblem problem = parse_problem(export_problem);
            std::ifstream in(export_plan);
            if (!in) throw ParseError("cannot open plan file '" + export_plan.string() + "'");
            Json j;
            try {
                j = Json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw SchemaError(export_plan.string() + ": invalid JSON: " + e.what());
            }
            for (const auto& p : cmd_export(problem, plan_from_json(j), export_dir)) out << p.string() << '\n';
            return static_cast<int>(kExitOk);
        });
    }
    return guarded(err, [&] {
        out << cmd_gen(gen_scene, gen_dir).string() << '\n';
        return static_cast<int>(kExitOk);
    });
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace asmplan
