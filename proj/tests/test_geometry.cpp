#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "asmplan/errors.hpp"
#include "asmplan/geometry/collision.hpp"
#include "asmplan/geometry/hull.hpp"
#include "asmplan/geometry/mesh_io.hpp"
#include "asmplan/geometry/path.hpp"
#include "support.hpp"

using namespace asmplan;
using testing::Rng;

namespace {

const char* kCubeObj = R"(# unit cube
v 0 0 0
v 1 0 0
v 0 1 0
v 1 1 0
v 0 0 1
v 1 0 1
v 0 1 1
v 1 1 1
f 1 3 2
f 2 3 4
f 5 6 7
f 6 8 7
f 1 2 5
f 2 6 5
f 3 7 4
f 4 7 8
f 1 5 3
f 3 5 7
f 2 4 6
f 4 8 6
)";

double oracle_volume(const Mesh& m) {
    // Divergence theorem with x-component flux, independent of the tetra fan.
    double v = 0.0;
    for (std::size_t t = 0; t < m.triangle_count(); ++t) {
        const Vec3 c = (m.corner(t, 0) + m.corner(t, 1) + m.corner(t, 2)) / 3.0;
        v += c.x() * m.face_normal(t).x() * m.face_area(t);
    }
    return v;
}

}  // namespace

TEST_CASE("OBJ unit cube loads with analytic volume and centre of mass") {
    std::istringstream in(kCubeObj);
    const Mesh m = parse_obj(in);
    CHECK(m.vertex_count() == 8);
    CHECK(m.triangle_count() == 12);
    CHECK(m.volume() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((m.com() - Vec3(0.5, 0.5, 0.5)).norm() < 1e-12);
    CHECK(oracle_volume(m) == doctest::Approx(m.volume()).epsilon(1e-12));
}

TEST_CASE("binary STL round trip matches the OBJ cube") {
    const auto dir = testing::scratch_dir("stl");
    std::istringstream in(kCubeObj);
    const Mesh obj = parse_obj(in);
    write_stl_binary(dir / "cube.stl", obj);
    const Mesh stl = load_mesh(dir / "cube.stl");
    CHECK(stl.vertex_count() == 8);
    CHECK(std::abs(stl.volume() - obj.volume()) < 1e-9);
    CHECK((stl.com() - obj.com()).norm() < 1e-9);

    write_obj(dir / "cube.obj", obj);
    const Mesh back = load_mesh(dir / "cube.obj");
    CHECK(back.vertices() == obj.vertices());
}

TEST_CASE("open or inconsistent surfaces are rejected") {
    std::string text(kCubeObj);
    const auto cut = text.rfind("f 4 8 6");
    const std::string open = text.substr(0, cut);
    std::istringstream a(open);
    CHECK_THROWS_AS(parse_obj(a), NonManifold);

    std::string flipped = text;
    flipped.replace(flipped.find("f 1 3 2"), 7, "f 1 2 3");
    std::istringstream b(flipped);
    CHECK_THROWS_AS(parse_obj(b), NonManifold);

    std::istringstream c("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1 2 3 4\n");
    CHECK_THROWS_AS(parse_obj(c), ParseError);
    std::istringstream d("v 0 0 0\nf 1 2 9\n");
    CHECK_THROWS_AS(parse_obj(d), ParseError);

    std::vector<Vec3> v = testing::unit_cube().vertices();
    std::vector<Triangle> t = testing::unit_cube().triangles();
    for (auto& tri : t) std::swap(tri[1], tri[2]);
    CHECK_THROWS_AS(Mesh::build(v, t), NonManifold);
}

TEST_CASE("truncated STL is a parse error") {
    std::istringstream in(std::string(90, '\0'));
    CHECK_THROWS_AS(parse_stl_binary(in), ParseError);
}

TEST_CASE("transform examples") {
    const Mesh cube = testing::unit_cube();
    CHECK(cube.transformed(Pose::identity()).vertices() == cube.vertices());

    const Mesh shifted = transform_mesh(cube, Pose::from_translation({10, 0, 0}));
    CHECK((shifted.com() - (cube.com() + Vec3(10, 0, 0))).norm() < 1e-12);

    const Pose rz = Pose::from_axis_angle(Vec3::UnitZ(), M_PI / 2);
    CHECK((rz.apply(Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK(is_rotation(rz.rotation()));
    CHECK_FALSE(is_rotation(2.0 * Mat3::Identity()));
}

TEST_CASE("transform round trip and mass property equivariance") {
    Rng rng(11);
    const Mesh m = merge_meshes({make_box({0, 0, 0}, {3, 1, 1}), make_box({0, 2, 0}, {1, 4, 2})});
    for (int i = 0; i < 25; ++i) {
        const Pose p = rng.pose(50.0);
        const Mesh moved = m.transformed(p);
        const Mesh back = moved.transformed(p.inverse());
        for (std::size_t k = 0; k < m.vertex_count(); ++k) {
            CHECK((back.vertices()[k] - m.vertices()[k]).norm() < 1e-6);
        }
        const Mesh rebuilt = Mesh::build(moved.vertices(), moved.triangles());
        CHECK(rebuilt.volume() == doctest::Approx(m.volume()).epsilon(1e-9));
        CHECK((rebuilt.com() - p.apply(m.com())).norm() < 1e-6);
    }
}

TEST_CASE("hull of a simplex and of a coplanar square") {
    std::vector<Vec3> tet = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const Hull3D h = convex_hull(std::span<const Vec3>(tet));
    CHECK(h.rank == 3);
    CHECK(h.faces.size() == 4);
    const Vec3 c = h.centroid();
    for (std::size_t f = 0; f < h.faces.size(); ++f) {
        CHECK(h.normals[f].dot(h.vertices[h.faces[f][0]] - c) > 0.0);
    }

    std::vector<Vec3> square = {{0, 0, 2}, {1, 0, 2}, {1, 1, 2}, {0, 1, 2}, {0.5, 0.5, 2}};
    const Hull3D s = convex_hull(std::span<const Vec3>(square));
    CHECK(s.rank == 2);
    CHECK(s.vertices.size() == 4);

    std::vector<Vec3> line = {{0, 0, 0}, {2, 2, 2}, {1, 1, 1}};
    CHECK(convex_hull(std::span<const Vec3>(line)).rank == 1);
    std::vector<Vec3> dot = {{3, 3, 3}, {3, 3, 3}};
    CHECK(convex_hull(std::span<const Vec3>(dot)).rank == 0);
}

TEST_CASE("random points in a cube: hull is exactly the corners and contains every input") {
    Rng rng(7);
    std::vector<Vec3> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(rng.vec(0.01, 0.99));
    for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    const Hull3D h = convex_hull(std::span<const Vec3>(pts));
    REQUIRE(h.rank == 3);
    std::set<std::size_t> src(h.source_index.begin(), h.source_index.end());
    CHECK(src == std::set<std::size_t>{100, 101, 102, 103, 104, 105, 106, 107});

    // Oracle: every face plane rebuilt from its corner coordinates bounds all inputs.
    for (const auto& f : h.faces) {
        const Vec3 a = h.vertices[f[0]], b = h.vertices[f[1]], c = h.vertices[f[2]];
        const Vec3 n = (b - a).cross(c - a).normalized();
        for (const auto& p : pts) CHECK(n.dot(p - a) <= 1e-7);
    }
    for (const auto& p : pts) CHECK(point_vs_hull(h, p, 1e-7) != HullSide::outside);
}

TEST_CASE("hull idempotence on random clouds") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec3> pts;
        const int n = rng.integer(4, 60);
        for (int i = 0; i < n; ++i) pts.push_back(rng.vec(-10, 10));
        const Hull3D h = convex_hull(std::span<const Vec3>(pts));
        const Hull3D again = convex_hull(std::span<const Vec3>(h.vertices));
        auto key = [](const std::vector<Vec3>& v) {
            std::set<std::array<double, 3>> s;
            for (const auto& p : v) s.insert({p.x(), p.y(), p.z()});
            return s;
        };
        CHECK(key(h.vertices) == key(again.vertices));
        for (const auto& p : pts) CHECK(point_vs_hull(h, p, 1e-7) != HullSide::outside);
    }
}

TEST_CASE("2D hull ordering and degenerate ranks") {
    std::vector<Vec2> sq = {{-0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}, {0.5, -0.5}, {0, 0}, {0.5, 0}};
    const Hull2D h = convex_hull(std::span<const Vec2>(sq));
    REQUIRE(h.rank == 2);
    REQUIRE(h.vertices.size() == 4);
    CHECK(h.vertices[0] == Vec2(0.5, -0.5));
    CHECK(h.vertices[1] == Vec2(0.5, 0.5));
    CHECK(h.vertices[2] == Vec2(-0.5, 0.5));
    CHECK(h.source_index[0] == 3);
    std::vector<Vec2> seg = {{0, 0}, {1, 1}, {3, 3}};
    CHECK(convex_hull(std::span<const Vec2>(seg)).rank == 1);
    std::vector<Vec2> pt = {{1, 0}};
    CHECK(convex_hull(std::span<const Vec2>(pt)).rank == 0);
}

TEST_CASE("point_vs_hull examples") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 8; ++i) pts.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
    const Hull3D h = convex_hull(std::span<const Vec3>(pts));
    CHECK(point_vs_hull(h, h.centroid(), 1e-7) == HullSide::inside);
    CHECK(point_vs_hull(h, h.vertices[0], 1e-7) == HullSide::boundary);
    CHECK(point_vs_hull(h, h.centroid() + Vec3(10 * std::sqrt(3.0), 0, 0), 1e-7) == HullSide::outside);

    std::vector<Vec2> tri = {{0, 0}, {4, 0}, {0, 4}};
    const Hull2D t = convex_hull(std::span<const Vec2>(tri));
    CHECK(point_vs_hull(t, {1, 1}, 1e-7) == HullSide::inside);
    CHECK(point_vs_hull(t, {2, 0}, 1e-7) == HullSide::boundary);
    CHECK(point_vs_hull(t, {3, 3}, 1e-7) == HullSide::outside);
    CHECK(signed_distance(t, {1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("meshes_intersect examples") {
    const Mesh cube = testing::unit_cube();
    CHECK_FALSE(meshes_intersect(cube, Pose::identity(), cube, Pose::from_translation({5, 0, 0}), 0.1));
    CHECK(meshes_intersect(cube, Pose::identity(), cube, Pose::from_translation({0.8, 0, 0}), 0.0));

    const Pose touch = Pose::from_translation({1, 0, 0});
    CHECK(meshes_intersect(cube, Pose::identity(), cube, touch, 0.05));
    const CollisionModel other(cube, touch);
    const CollisionModel shrunk = CollisionModel::shrunk(cube, 0.1);
    CHECK_FALSE(meshes_intersect(shrunk, other, 0.0));
    CHECK(meshes_intersect_brute_force(CollisionModel(cube), other, 0.05));
    CHECK_FALSE(meshes_intersect_brute_force(shrunk, other, 0.0));
    CHECK_FALSE(collides(cube, Pose::identity(), other, 0.1));
    CHECK(collides(cube, Pose::from_translation({0.5, 0, 0}), other, 0.1));
}

TEST_CASE("containment without surface contact counts as intersecting") {
    const Mesh big = make_box({-5, -5, -5}, {5, 5, 5});
    const Mesh small = testing::unit_cube();
    CHECK(meshes_intersect(big, Pose::identity(), small, Pose::identity(), 0.0));
    CHECK(meshes_intersect(small, Pose::identity(), big, Pose::identity(), 0.0));
    const CollisionModel a(big), b(small);
    CHECK(meshes_intersect_brute_force(a, b, 0.0));
}

TEST_CASE("BVH query equals the all-pairs reference on random posed pairs") {
    Rng rng(2024);
    const Mesh l_shape = merge_meshes({make_box({0, 0, 0}, {3, 1, 1}), make_box({0, 1.5, 0}, {1, 3, 1})});
    int hits = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const Mesh a = trial % 2 ? l_shape : make_box(Vec3::Zero(), rng.vec(0.5, 3.0));
        const Mesh b = make_box(Vec3::Zero(), rng.vec(0.5, 3.0));
        const CollisionModel ma(a, rng.pose(2.5));
        const CollisionModel mb(b, rng.pose(2.5));
        const double clearance = trial % 3 == 0 ? 0.0 : rng.uniform(0.0, 0.5);
        const bool fast = meshes_intersect(ma, mb, clearance);
        CHECK(fast == meshes_intersect_brute_force(ma, mb, clearance));
        hits += fast;
    }
    // Both outcomes must be exercised for the comparison to mean anything.
    CHECK(hits > 5);
    CHECK(hits < 45);
}

TEST_CASE("triangle distance primitives") {
    const std::array<Vec3, 3> t{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
    CHECK(point_triangle_distance({0.25, 0.25, 2}, t) == doctest::Approx(2.0));
    CHECK(point_triangle_distance({2, 0, 0}, t) == doctest::Approx(1.0));
    CHECK(segment_segment_distance({0, 0, 0}, {1, 0, 0}, {0.5, -1, 1}, {0.5, 1, 1}) == doctest::Approx(1.0));
    CHECK(segment_intersects_triangle({0.2, 0.2, -1}, {0.2, 0.2, 1}, t));
    CHECK_FALSE(segment_intersects_triangle({2, 2, -1}, {2, 2, 1}, t));
    const std::array<Vec3, 3> u{Vec3(0.2, 0.2, -1), Vec3(0.3, 0.2, 1), Vec3(0.2, 0.3, 1)};
    CHECK(triangle_distance(t, u) == 0.0);
}

TEST_CASE("raycast finds the nearest face") {
    const CollisionModel cube(testing::unit_cube());
    std::uint32_t tri = 0;
    const double t = raycast(cube, {0.5, 0.5, 5}, {0, 0, -1}, 0.0, &tri);
    CHECK(t == doctest::Approx(4.0));
    CHECK(raycast(cube, {0.5, 0.5, 5}, {0, 0, 1}, 0.0) < 0.0);
}

TEST_CASE("penetration depth estimate for overlapping cubes") {
    const Mesh cube = testing::unit_cube();
    const double d = estimate_penetration_depth(cube, Pose::identity(), cube, Pose::from_translation({0.7, 0, 0}), 0.1);
    CHECK(d == doctest::Approx(0.3).epsilon(1e-3));
    CHECK(estimate_penetration_depth(cube, Pose::identity(), cube, Pose::from_translation({3, 0, 0}), 0.1) == 0.0);
}

TEST_CASE("sweep_poses arithmetic") {
    const Pose goal = Pose::from_translation({1, 2, 3});
    const auto poses = sweep_poses(goal, {1, 0, 0}, 100, 20);
    REQUIRE(poses.size() == 21);
    for (std::size_t k = 1; k < poses.size(); ++k) {
        CHECK((poses[k].translation() - poses[k - 1].translation()).norm() == doctest::Approx(5.0));
    }
    CHECK(poses.back() == goal);
    const auto two = sweep_poses(goal, {0, 1, 0}, 10, 1);
    REQUIRE(two.size() == 2);
    CHECK((two[0].translation() - Vec3(1, -8, 3)).norm() < 1e-12);
    const auto drop = sweep_poses(goal, {0, 0, -1}, 50, 4);
    CHECK((drop.front().translation() - Vec3(1, 2, 53)).norm() < 1e-12);
}

TEST_CASE("nearest_on_polyline") {
    std::vector<Vec3> sq = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const auto a = nearest_on_polyline(sq, {0.5, 0.5, 1});
    CHECK(a.distance == doctest::Approx(std::sqrt(1.25)));
    CHECK(a.segment == 0);
    CHECK((a.point - Vec3(0.5, 0, 0)).norm() < 1e-12);
    const auto b = nearest_on_polyline(sq, {1, 1, 0});
    CHECK(b.distance == 0.0);
    CHECK((b.point - Vec3(1, 1, 0)).norm() < 1e-12);
    const auto c = nearest_on_polyline(sq, {1.5, 0.3, 0});
    CHECK(c.distance == doctest::Approx(0.5));
    CHECK((c.point - Vec3(1, 0.3, 0)).norm() < 1e-12);
}
