#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numbers>
#include <set>

#include "asmplan/evaluation.hpp"
#include "asmplan/fixtures.hpp"
#include "asmplan/grasping.hpp"
#include "support.hpp"

using namespace asmplan;
using testing::Rng;

namespace {

double degrees(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

// Outward normal of the face that contains p, found by brute force.
std::optional<Vec3> normal_at(const Mesh& m, const Vec3& p) {
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        if (point_triangle_distance(p, {m.corner(t, 0), m.corner(t, 1), m.corner(t, 2)}) < 1e-7) return m.face_normal(t);
    }
    return std::nullopt;
}

// Gripper boxes rebuilt from the documented hand frame.
std::vector<Mesh> hand_boxes(const GripperModel& g, const Grasp& grasp, double shrink) {
    Mat3 r;
    r.col(0) = grasp.jaw_axis;
    r.col(1) = grasp.approach.cross(grasp.jaw_axis);
    r.col(2) = grasp.approach;
    const Pose hand(r, grasp.center);
    const double l = g.finger.x(), w = g.finger.y(), t = g.finger.z();
    const Vec3 s = Vec3::Constant(shrink);
    std::vector<Mesh> out;
    for (double side : {1.0, -1.0}) {
        const double x = side * (grasp.width / 2 + t / 2);
        const Vec3 c(x, 0, w / 2 - l / 2), h(t / 2, w / 2, l / 2);
        out.push_back(make_box(c - h + s, c + h - s).transformed(hand));
    }
    const Vec3 c(0, 0, w / 2 - g.standoff - g.palm.z() / 2), h = g.palm / 2;
    out.push_back(make_box(c - h + s, c + h - s).transformed(hand));
    return out;
}

bool oracle_collides(const GripperModel& g, const Grasp& grasp, const std::vector<const Mesh*>& obstacles,
                     bool with_table, double tol) {
    for (const auto& box : hand_boxes(g, grasp, 0.0)) {
        for (const auto& v : box.vertices()) {
            if (with_table && v.z() < -tol) return true;
        }
    }
    for (const auto& box : hand_boxes(g, grasp, tol)) {
        const CollisionModel hb(box);
        for (const auto* o : obstacles) {
            if (meshes_intersect_brute_force(hb, CollisionModel(*o), 0.0)) return true;
        }
    }
    return false;
}

Mesh right_prism(double leg, double height) {
    std::vector<Vec3> v{{0, 0, 0}, {leg, 0, 0}, {0, leg, 0}, {0, 0, height}, {leg, 0, height}, {0, leg, height}};
    std::vector<Triangle> t{{0, 2, 1}, {3, 4, 5}, {0, 1, 4}, {0, 4, 3}, {1, 2, 5}, {1, 5, 4}, {2, 0, 3}, {2, 3, 5}};
    return Mesh::build(std::move(v), std::move(t));
}

GripperModel default_gripper() { return GripperModel{}; }

}  // namespace

TEST_CASE("force closure cone boundaries") {
    const Vec3 p(0, 0, 0), n_p(-1, 0, 0);
    const Vec3 q(1, 1, 0), n_q(0, 1, 0);
    // the segment makes 45 degrees with both inward normals
    CHECK_FALSE(antipodal_force_closure(p, n_p, q, n_q, 0.2));
    CHECK(antipodal_force_closure(p, n_p, q, n_q, 2.0));
    CHECK(antipodal_force_closure({0, 0, 0}, {-1, 0, 0}, {5, 0, 0}, {1, 0, 0}, 0.01));
    CHECK_FALSE(antipodal_force_closure({0, 0, 0}, {1, 0, 0}, {5, 0, 0}, {-1, 0, 0}, 10.0));
    CHECK(std::atan(0.2) * 180 / std::numbers::pi < 45.0);
    CHECK(std::atan(2.0) * 180 / std::numbers::pi > 45.0);
}

TEST_CASE("cube grasps pass an independent re-check") {
    GripperModel g = default_gripper();
    g.max_width = 50;
    const Mesh cube = make_box({-15, -15, 0}, {15, 15, 30});
    const auto grasps = sample_force_closure_grasps(cube, g, 60, 4, 3, 0.1);
    REQUIRE_FALSE(grasps.empty());
    for (const auto& gr : grasps) {
        CHECK(std::abs(gr.jaw_axis.norm() - 1) < 1e-9);
        CHECK(std::abs(gr.approach.norm() - 1) < 1e-9);
        CHECK(std::abs(gr.jaw_axis.dot(gr.approach)) < 1e-9);
        CHECK(gr.width <= g.max_width);
        const Vec3 p = gr.center - gr.jaw_axis * gr.width / 2, q = gr.center + gr.jaw_axis * gr.width / 2;
        const auto n_p = normal_at(cube, p), n_q = normal_at(cube, q);
        REQUIRE(n_p);
        REQUIRE(n_q);
        const double cone = std::atan(g.mu) * 180 / std::numbers::pi;
        CHECK(degrees(q - p, -*n_p) <= cone + 1e-9);
        CHECK(degrees(p - q, -*n_q) <= cone + 1e-9);
        CHECK_FALSE(oracle_collides(g, gr, {&cube}, false, 0.1));
    }
}

TEST_CASE("jaw narrower than the part yields nothing") {
    GripperModel g = default_gripper();
    g.max_width = 20;
    CHECK(sample_force_closure_grasps(make_box({0, 0, 0}, {30, 30, 30}), g, 200, 8, 1, 0.1).empty());
}

TEST_CASE("perpendicular faces need a wide friction cone") {
    const Mesh prism = right_prism(30, 200);
    GripperModel g = default_gripper();
    g.mu = 0.2;
    CHECK(sample_force_closure_grasps(prism, g, 300, 8, 1, 0.1).empty());
    g.mu = 2.0;
    const auto wide = sample_force_closure_grasps(prism, g, 300, 8, 1, 0.1);
    REQUIRE_FALSE(wide.empty());
    for (const auto& gr : wide) {
        const Vec3 p = gr.center - gr.jaw_axis * gr.width / 2, q = gr.center + gr.jaw_axis * gr.width / 2;
        const auto n_p = normal_at(prism, p), n_q = normal_at(prism, q);
        REQUIRE(n_p);
        REQUIRE(n_q);
        const double at_p = degrees(q - p, -*n_p), at_q = degrees(p - q, -*n_q);
        CHECK(std::min(at_p, at_q) < 1e-6);
        CHECK(std::max(at_p, at_q) == doctest::Approx(45.0));
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    const Mesh part = voxel_mesh({{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}}, 20});
    const auto g = default_gripper();
    const auto a = sample_force_closure_grasps(part, g, 200, 8, 42, 0.1);
    const auto b = sample_force_closure_grasps(part, g, 200, 8, 42, 0.1);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(Grasp)) == 0);
    CHECK(a == b);
    CHECK(a != sample_force_closure_grasps(part, g, 200, 8, 43, 0.1));
}

TEST_CASE("table removes grasps from below") {
    const auto g = default_gripper();
    const Mesh cube = make_box({-15, -15, 0}, {15, 15, 30});
    const auto grasps = sample_force_closure_grasps(cube, g, 200, 8, 1, 0.1);
    REQUIRE_FALSE(grasps.empty());
    const auto keep = accessible_grasps(grasps, Pose::identity(), g, {}, true, 0.1);
    const std::set<std::size_t> kept(keep.begin(), keep.end());
    CHECK(kept.size() < grasps.size());
    CHECK_FALSE(kept.empty());
    bool lateral = false, top = false;
    for (std::size_t i = 0; i < grasps.size(); ++i) {
        CHECK(oracle_collides(g, grasps[i], {}, true, 0.1) == !kept.contains(i));
        if (grasps[i].approach.z() > 0.9) CHECK_FALSE(kept.contains(i));
        if (kept.contains(i) && std::abs(grasps[i].approach.z()) < 1e-9) lateral = true;
        if (kept.contains(i) && grasps[i].approach.z() < -0.9) top = true;
    }
    CHECK(lateral);
    CHECK(top);
}

TEST_CASE("no obstacles and no table keeps every grasp") {
    const auto g = default_gripper();
    const auto grasps = sample_force_closure_grasps(make_box({0, 0, 0}, {30, 30, 30}), g, 100, 8, 1, 0.1);
    std::vector<Grasp> world;
    const auto keep = accessible_grasps(grasps, Pose::identity(), g, {}, false, 0.1, &world);
    CHECK(keep.size() == grasps.size());
    CHECK(world == grasps);
}

TEST_CASE("deep pocket removes lateral grasps") {
    const double c = 30;
    std::vector<Cell> cells;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                if (!(i == 1 && j == 1 && k >= 1)) cells.push_back({i, j, k});
    const Mesh pocket = voxel_mesh({cells, c});
    const CollisionModel pocket_model(pocket);
    const Mesh cube = make_box({c, c, c}, {2 * c, 2 * c, 2 * c});
    const auto g = default_gripper();
    const auto grasps = sample_force_closure_grasps(cube, g, 200, 8, 1, 0.1);
    const auto free = accessible_grasps(grasps, Pose::identity(), g, {}, true, 0.1);
    const std::vector<const CollisionModel*> obstacles{&pocket_model};
    const auto walled = accessible_grasps(grasps, Pose::identity(), g, obstacles, true, 0.1);
    CHECK(walled.size() < free.size());
    for (auto i : walled) CHECK(grasps[i].approach.z() < -0.9);
}

TEST_CASE("three touching walls block every grasp") {
    const Mesh cube = make_box({0, 0, 0}, {30, 30, 30});
    const std::vector<Mesh> walls{make_box({-10, -10, 0}, {0, 40, 60}), make_box({30, -10, 0}, {40, 40, 60}),
                                  make_box({0, 30, 0}, {30, 40, 60})};
    std::vector<CollisionModel> models;
    for (const auto& w : walls) models.emplace_back(w);
    std::vector<const CollisionModel*> obstacles;
    for (const auto& m : models) obstacles.push_back(&m);
    const auto g = default_gripper();
    const auto grasps = sample_force_closure_grasps(cube, g, 200, 8, 1, 0.1);
    REQUIRE_FALSE(grasps.empty());
    CHECK(accessible_grasps(grasps, Pose::identity(), g, obstacles, true, 0.1).empty());
    std::vector<const Mesh*> meshes;
    for (const auto& w : walls) meshes.push_back(&w);
    for (std::size_t i = 0; i < grasps.size(); i += 7) CHECK(oracle_collides(g, grasps[i], meshes, true, 0.1));
}

TEST_CASE("adding obstacles never adds grasps") {
    const auto g = default_gripper();
    const Mesh cube = make_box({0, 0, 0}, {30, 30, 30});
    const auto grasps = sample_force_closure_grasps(cube, g, 150, 8, 5, 0.1);
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<CollisionModel> models;
        std::vector<std::size_t> last;
        for (std::size_t i = 0; i < grasps.size(); ++i) last.push_back(i);
        for (int k = 0; k < 5; ++k) {
            const Vec3 lo = rng.vec(-80, 80);
            const Vec3 size = rng.vec(5, 40);
            // keep clear of the part so every configuration is valid
            if ((lo.array() < 30.5).all() && ((lo + size).array() > -0.5).all()) continue;
            models.emplace_back(make_box(lo, lo + size));
            std::vector<const CollisionModel*> obstacles;
            for (const auto& m : models) obstacles.push_back(&m);
            const auto keep = accessible_grasps(grasps, Pose::identity(), g, obstacles, true, 0.1);
            CHECK(std::includes(last.begin(), last.end(), keep.begin(), keep.end()));
            last = keep;
        }
    }
}

TEST_CASE("rotating object and obstacles together keeps the count") {
    const auto g = default_gripper();
    const Mesh cube = make_box({0, 0, 0}, {30, 30, 30});
    const Mesh wall = make_box({30, -20, -20}, {45, 50, 50});
    const auto grasps = sample_force_closure_grasps(cube, g, 120, 8, 9, 0.1);
    const CollisionModel wm(wall);
    const std::vector<const CollisionModel*> obs{&wm};
    std::vector<Grasp> ref_world;
    const auto ref = accessible_grasps(grasps, Pose::identity(), g, obs, false, 0.1, &ref_world);
    CHECK(ref.size() < grasps.size());
    Rng rng(21);
    for (int trial = 0; trial < 4; ++trial) {
        const Pose p = rng.pose(200);
        const CollisionModel moved(wall, p);
        const std::vector<const CollisionModel*> obs2{&moved};
        std::vector<Grasp> world;
        const auto keep = accessible_grasps(grasps, p, g, obs2, false, 0.1, &world);
        CHECK(keep == ref);
        for (std::size_t k = 0; k < world.size(); ++k) {
            CHECK((world[k].center - p.apply(ref_world[k].center)).norm() < 1e-9);
            CHECK((world[k].approach - p.apply_direction(ref_world[k].approach)).norm() < 1e-9);
        }
    }
}

TEST_CASE("first object is only checked against the table") {
    const auto problem = make_scene("stack3");
    const Workspace ws(problem);
    for (std::size_t i = 0; i < problem.size(); ++i) {
        const auto expected = accessible_grasps(ws.grasps(i), ws.pose(i), problem.gripper, {}, true, 0.1);
        CHECK(graspability(problem.parts[i].id, {}, problem) == expected.size());
    }
    // fewer placed parts never means fewer grasps
    CHECK(graspability("middle", {"base"}, problem) <= graspability("middle", {}, problem));
    CHECK(graspability("middle", {"base", "top"}, problem) <= graspability("middle", {"base"}, problem));
}
