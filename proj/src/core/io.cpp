#include "asmplan/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "asmplan/errors.hpp"
#include "asmplan/geometry/mesh_io.hpp"

namespace asmplan {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void schema(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

void require_object(const Json& j, const std::string& where) {
    if (!j.is_object()) schema(where.empty() ? "document" : where, "expected an object");
}

void allow_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) schema(join(where, k), "unknown field");
    }
}

double number(const Json& j, const std::string& where) {
    if (!j.is_number()) schema(where, "expected a number");
    return j.get<double>();
}

void read(const Json& obj, const char* key, const std::string& where, double& out) {
    if (obj.contains(key)) out = number(obj[key], join(where, key));
}

void read(const Json& obj, const char* key, const std::string& where, int& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj[key];
    if (!v.is_number_integer()) schema(join(where, key), "expected an integer");
    out = v.get<int>();
}

void read(const Json& obj, const char* key, const std::string& where, std::uint64_t& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj[key];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        schema(join(where, key), "expected a non-negative integer");
    }
    out = v.get<std::uint64_t>();
}

std::vector<double> numbers(const Json& j, const std::string& where, std::size_t n) {
    if (!j.is_array() || j.size() != n) schema(where, "expected " + std::to_string(n) + " numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Vec3 vec3(const Json& j, const std::string& where) {
    const auto v = numbers(j, where, 3);
    return {v[0], v[1], v[2]};
}

void read(const Json& obj, const char* key, const std::string& where, Vec3& out) {
    if (obj.contains(key)) out = vec3(obj[key], join(where, key));
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) schema(join(where, key), "missing");
    if (!obj[key].is_string()) schema(join(where, key), "expected a string");
    return obj[key].get<std::string>();
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

GripperModel gripper_from_json(const Json& j, const std::string& where) {
    require_object(j, where);
    allow_keys(j, where, {"max_width", "finger", "palm", "standoff", "mu"});
    GripperModel g;
    read(j, "max_width", where, g.max_width);
    read(j, "finger", where, g.finger);
    read(j, "palm", where, g.palm);
    read(j, "standoff", where, g.standoff);
    read(j, "mu", where, g.mu);
    return g;
}

Tolerances tolerances_from_json(const Json& j, const std::string& where) {
    require_object(j, where);
    allow_keys(j, where, {"delta_c", "eps_stab", "alpha_sup", "assembly_offset_mm", "sweep_steps", "a_min", "eps_n",
                          "eps_class"});
    Tolerances t;
    read(j, "delta_c", where, t.delta_c);
    read(j, "eps_stab", where, t.eps_stab);
    read(j, "alpha_sup", where, t.alpha_sup);
    read(j, "assembly_offset_mm", where, t.assembly_offset_mm);
    read(j, "sweep_steps", where, t.sweep_steps);
    read(j, "a_min", where, t.a_min);
    read(j, "eps_n", where, t.eps_n);
    read(j, "eps_class", where, t.eps_class);
    return t;
}

SamplerSettings sampler_from_json(const Json& j, const std::string& where) {
    require_object(j, where);
    allow_keys(j, where, {"n_samples", "n_rolls", "seed"});
    SamplerSettings s;
    read(j, "n_samples", where, s.n_samples);
    read(j, "n_rolls", where, s.n_rolls);
    read(j, "seed", where, s.seed);
    return s;
}

Json gripper_json(const GripperModel& g) {
    return {{"max_width", g.max_width}, {"finger", vec_json(g.finger)}, {"palm", vec_json(g.palm)},
            {"standoff", g.standoff}, {"mu", g.mu}};
}

Json tolerances_json(const Tolerances& t) {
    return {{"delta_c", t.delta_c},     {"eps_stab", t.eps_stab},
            {"alpha_sup", t.alpha_sup}, {"assembly_offset_mm", t.assembly_offset_mm},
            {"sweep_steps", t.sweep_steps}, {"a_min", t.a_min},
            {"eps_n", t.eps_n},         {"eps_class", t.eps_class}};
}

Json sampler_json(const SamplerSettings& s) {
    return {{"n_samples", s.n_samples}, {"n_rolls", s.n_rolls}, {"seed", s.seed}};
}

Json grasp_json(const Grasp& g) {
    return {{"center", vec_json(g.center)}, {"jaw_axis", vec_json(g.jaw_axis)}, {"approach", vec_json(g.approach)},
            {"width", g.width}};
}

Json ids_json(const std::vector<std::string>& ids) {
    Json a = Json::array();
    for (const auto& id : ids) a.push_back(id);
    return a;
}

std::vector<std::string> ids_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) schema(where, "expected an array of ids");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) schema(where + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

Json case_json(const std::optional<CaseLabel>& c) { return c ? Json(to_string(*c)) : Json(nullptr); }

std::optional<CaseLabel> case_from_json(const Json& j, const std::string& where) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_string()) schema(where, "expected a case name or null");
    const auto c = case_from_string(j.get<std::string>());
    if (!c) schema(where, "unknown case '" + j.get<std::string>() + "'");
    return c;
}

}  // namespace

Json pose_to_json(const Pose& p) {
    Json r = Json::array();
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) r.push_back(p.rotation()(i, k));
    }
    return {{"r", r}, {"t", vec_json(p.translation())}};
}

Pose pose_from_json(const Json& j, const std::string& where) {
    require_object(j, where);
    allow_keys(j, where, {"r", "t"});
    Mat3 r = Mat3::Identity();
    if (j.contains("r")) {
        const auto v = numbers(j["r"], join(where, "r"), 9);
        for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = v[i];
        if (!is_rotation(r, 1e-6)) schema(join(where, "r"), "not a rotation matrix");
    }
    Vec3 t = Vec3::Zero();
    if (j.contains("t")) t = vec3(j["t"], join(where, "t"));
    return {r, t};
}

AssemblyProblem problem_from_json(const Json& j, const fs::path& base_dir) {
    require_object(j, "");
    allow_keys(j, "", {"parts", "world_pose", "gripper", "tolerances", "sampler"});
    if (!j.contains("parts")) schema("parts", "missing");
    const Json& parts = j["parts"];
    if (!parts.is_array() || parts.empty()) schema("parts", "expected a non-empty array");

    AssemblyProblem problem;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string where = "parts[" + std::to_string(i) + "]";
        const Json& pj = parts[i];
        require_object(pj, where);
        allow_keys(pj, where, {"id", "mesh", "pose"});
        const std::string id = string_field(pj, "id", where);
        const std::string mesh = string_field(pj, "mesh", where);
        const fs::path mesh_path = fs::path(mesh).is_absolute() ? fs::path(mesh) : base_dir / mesh;
        const Pose pose = pj.contains("pose") ? pose_from_json(pj["pose"], join(where, "pose")) : Pose::identity();
        if (!fs::is_regular_file(mesh_path)) {
            throw ValidationError(join(where, "mesh") + ": missing mesh file '" + mesh_path.string() + "'");
        }
        PartSpec part{id, mesh_path, load_mesh(mesh_path), pose};
        problem.parts.push_back(std::move(part));
    }
    if (j.contains("world_pose")) problem.world_pose = pose_from_json(j["world_pose"], "world_pose");
    if (j.contains("gripper")) problem.gripper = gripper_from_json(j["gripper"], "gripper");
    if (j.contains("tolerances")) problem.tolerances = tolerances_from_json(j["tolerances"], "tolerances");
    if (j.contains("sampler")) problem.sampler = sampler_from_json(j["sampler"], "sampler");
    return problem;
}

AssemblyProblem parse_problem(const fs::path& path, bool validate) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open problem file '" + path.string() + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(path.string() + ": invalid JSON: " + e.what());
    }
    AssemblyProblem problem = problem_from_json(j, path.parent_path());
    if (validate) validate_problem(problem);
    return problem;
}

Json problem_to_json(const AssemblyProblem& problem, const std::vector<std::string>& mesh_paths) {
    if (mesh_paths.size() != problem.size()) throw ValidationError("one mesh path per part is required");
    Json parts = Json::array();
    for (std::size_t i = 0; i < problem.size(); ++i) {
        parts.push_back({{"id", problem.parts[i].id}, {"mesh", mesh_paths[i]}, {"pose", pose_to_json(problem.parts[i].pose)}});
    }
    return {{"parts", parts},
            {"world_pose", pose_to_json(problem.world_pose)},
            {"gripper", gripper_json(problem.gripper)},
            {"tolerances", tolerances_json(problem.tolerances)},
            {"sampler", sampler_json(problem.sampler)}};
}

fs::path write_problem(const AssemblyProblem& problem, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<std::string> meshes;
    for (const auto& part : problem.parts) {
        meshes.push_back(part.id + ".obj");
        write_obj(dir / meshes.back(), part.mesh);
    }
    const fs::path path = dir / "problem.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << problem_to_json(problem, meshes).dump(2) << '\n';
    return path;
}

Json settings_to_json(const PlanSettings& s) {
    return {{"sampler", sampler_json(s.sampler)},
            {"tolerances", tolerances_json(s.tolerances)},
            {"gripper", gripper_json(s.gripper)},
            {"exhaustive", s.exhaustive}};
}

Json plan_to_json(const AssemblyPlan& plan, std::size_t max_grasps) {
    Json steps = Json::array();
    for (const auto& s : plan.steps) {
        Json grasps = Json::array();
        for (std::size_t k = 0; k < std::min(max_grasps, s.grasps.size()); ++k) grasps.push_back(grasp_json(s.grasps[k]));
        steps.push_back({{"id", s.id},
                         {"direction", vec_json(s.direction)},
                         {"s", s.s},
                         {"g", s.g},
                         {"a", s.a},
                         {"case", case_json(s.label)},
                         {"grasps", grasps}});
    }
    Json ties = Json::array();
    for (const auto& t : plan.ties) ties.push_back(ids_json(t));
    return {{"order", ids_json(plan.order)},
            {"steps", steps},
            {"score", plan.score},
            {"ties", ties},
            {"settings", settings_to_json(plan.settings)}};
}

AssemblyPlan plan_from_json(const Json& j) {
    require_object(j, "");
    for (const char* key : {"order", "steps", "score", "ties"}) {
        if (!j.contains(key)) schema(key, "missing");
    }
    AssemblyPlan plan;
    plan.order = ids_from_json(j["order"], "order");
    plan.score = number(j["score"], "score");
    const Json& steps = j["steps"];
    if (!steps.is_array()) schema("steps", "expected an array");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string where = "steps[" + std::to_string(i) + "]";
        const Json& sj = steps[i];
        require_object(sj, where);
        PlanStep step;
        step.id = string_field(sj, "id", where);
        if (!sj.contains("direction")) schema(join(where, "direction"), "missing");
        step.direction = vec3(sj["direction"], join(where, "direction"));
        read(sj, "s", where, step.s);
        read(sj, "a", where, step.a);
        int g = 0;
        read(sj, "g", where, g);
        if (g < 0) schema(join(where, "g"), "expected a non-negative integer");
        step.g = static_cast<std::size_t>(g);
        if (sj.contains("case")) step.label = case_from_json(sj["case"], join(where, "case"));
        if (sj.contains("grasps")) {
            const Json& gs = sj["grasps"];
            if (!gs.is_array()) schema(join(where, "grasps"), "expected an array");
            for (std::size_t k = 0; k < gs.size(); ++k) {
                const std::string gw = join(where, "grasps") + "[" + std::to_string(k) + "]";
                require_object(gs[k], gw);
                Grasp grasp;
                for (const char* key : {"center", "jaw_axis", "approach", "width"}) {
                    if (!gs[k].contains(key)) schema(join(gw, key), "missing");
                }
                read(gs[k], "center", gw, grasp.center);
                read(gs[k], "jaw_axis", gw, grasp.jaw_axis);
                read(gs[k], "approach", gw, grasp.approach);
                read(gs[k], "width", gw, grasp.width);
                step.grasps.push_back(grasp);
            }
        }
        plan.steps.push_back(std::move(step));
    }
    const Json& ties = j["ties"];
    if (!ties.is_array()) schema("ties", "expected an array");
    for (std::size_t i = 0; i < ties.size(); ++i) plan.ties.push_back(ids_from_json(ties[i], "ties[" + std::to_string(i) + "]"));
    if (j.contains("settings")) {
        const Json& s = j["settings"];
        require_object(s, "settings");
        if (s.contains("sampler")) plan.settings.sampler = sampler_from_json(s["sampler"], "settings.sampler");
        if (s.contains("tolerances")) plan.settings.tolerances = tolerances_from_json(s["tolerances"], "settings.tolerances");
        if (s.contains("gripper")) plan.settings.gripper = gripper_from_json(s["gripper"], "settings.gripper");
        if (s.contains("exhaustive")) {
            if (!s["exhaustive"].is_boolean()) schema("settings.exhaustive", "expected a boolean");
            plan.settings.exhaustive = s["exhaustive"].get<bool>();
        }
    }
    if (plan.order.size() != plan.steps.size()) schema("steps", "one step per entry of order is required");
    for (std::size_t i = 0; i < plan.order.size(); ++i) {
        if (plan.order[i] != plan.steps[i].id) schema("steps[" + std::to_string(i) + "].id", "does not match order");
    }
    return plan;
}

Json report_to_json(const std::vector<Infeasibility>& report) {
    Json out = Json::array();
    for (const auto& f : report) {
        out.push_back({{"prefix", ids_json(f.prefix)},
                       {"part", f.part},
                       {"reason", f.reason},
                       {"case", case_json(f.label)},
                       {"floating", f.floating},
                       {"swept_blocked", f.swept_blocked}});
    }
    return out;
}

Json matrices_to_json(const Evaluation& ev, bool exhaustive) {
    const auto& Q = ev.Q;
    auto cell = [&](std::size_t r, std::size_t j, Stage s, double v) {
        return Q.has(r, j, s) ? Json(v) : Json("unevaluated");
    };
    auto minimum = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    Json rows = Json::array();
    for (std::size_t r = 0; r < Q.rows(); ++r) {
        Json order = Json::array(), S = Json::array(), G = Json::array(), A = Json::array(), Ap = Json::array(),
             cases = Json::array();
        for (std::size_t j = 0; j < Q.cols(); ++j) {
            order.push_back(Q.ids[Q.P[r][j]]);
            S.push_back(cell(r, j, kStability, Q.S[r][j]));
            G.push_back(cell(r, j, kGraspability, Q.G[r][j]));
            A.push_back(cell(r, j, kAssemblability, Q.A[r][j]));
            Ap.push_back(Q.has(r, j, kAssemblability) ? vec_json(Q.Aprime[r][j]) : Json("unevaluated"));
            cases.push_back(Q.has(r, j, kAssemblability) ? case_json(Q.cases[r][j]) : Json("unevaluated"));
        }
        rows.push_back({{"order", order},
                        {"feasible", static_cast<bool>(Q.m[r])},
                        {"S", S},
                        {"G", G},
                        {"A", A},
                        {"Aprime", Ap},
                        {"cases", cases},
                        {"row_min",
                         {{"s", minimum(Q.row_min(Q.S, r, kStability))},
                          {"g", minimum(Q.row_min(Q.G, r, kGraspability))},
                          {"a", minimum(Q.row_min(Q.A, r, kAssemblability))}}},
                        {"score", Q.m[r] ? row_score(Q, r) : 0.0}});
    }
    const auto& st = ev.state.stats;
    return {{"ids", ids_json(Q.ids)},
            {"exhaustive", exhaustive},
            {"rows", rows},
            {"stats",
             {{"cells_evaluated", st.cells_evaluated},
              {"rows_pruned", st.rows_pruned},
              {"memo_hits", st.memo_hits},
              {"memo_entries", st.memo_entries}}},
            {"failures", report_to_json(ev.failures)}};
}

}  // namespace asmplan
