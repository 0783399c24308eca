#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asmplan/geometry/collision.hpp"
#include "asmplan/geometry/mesh.hpp"

namespace asmplan {

/// Shape of the hull of {0} and the contact normals, and where the origin sits on it.
enum class CaseLabel {
    A_single_vector,
    B_line_through_origin,
    C_polygon_origin_vertex,
    D_polygon_origin_edge,
    E_polygon_origin_inside,
    F_polyhedron_origin_vertex,
    G_polyhedron_origin_edge,
    H_polyhedron_origin_face,
    I_polyhedron_origin_inside,
};

inline constexpr double kInfQuality = 100.0;

const char* to_string(CaseLabel c);
char case_letter(CaseLabel c);
std::optional<CaseLabel> case_from_string(const std::string& s);

/// Quality table: A 100, B 10, C 100, D 3, E 2, F 100, G 3, H 1, I 0.
double case_quality(CaseLabel c);

/// Greedy clustering: a normal joins the first cluster whose representative is
/// within `eps_n` degrees; representatives are the normalized cluster means.
std::vector<Vec3> cluster_normals(std::span<const Vec3> normals, double eps_n = 0.5);

/// Throws EmptyNormals when `normals` is empty.
CaseLabel classify(std::span<const Vec3> normals, double eps_n = 0.5, double eps_class = 1e-6);

struct AssemblyDirection {
    Vec3 n_o = Vec3::Zero();        // motion direction into the goal pose
    double quality = 0.0;
    CaseLabel label = CaseLabel::I_polyhedron_origin_inside;
    std::vector<Vec3> candidates;   // tried in order by swept_reset
    bool swept_blocked = false;     // quality zeroed by the sweep test
};

/// t . n_i >= -eps for every normal.
bool in_feasible_cone(const Vec3& t, std::span<const Vec3> normals, double eps = 1e-6);

/// Unit direction maximising min_i t . n_i over the subspace orthogonal to
/// `lineality` (may be empty). Nullopt when that maximum is not positive.
std::optional<Vec3> max_clearance_direction(std::span<const Vec3> normals, std::span<const Vec3> lineality = {});

/// Direction and quality from the case analysis, before the sweep test.
AssemblyDirection optimal_direction(CaseLabel label, std::span<const Vec3> normals, double eps_n = 0.5);

struct SweepParams {
    double delta_c = 0.1;
    double offset = 150.0;
    int steps = 32;
    bool with_table = true;
};

/// True when some pose on the straight approach along `dir` leaves the
/// object (shrunk by delta_c) overlapping an obstacle or below the table.
bool sweep_blocked(const Mesh& object, const Pose& goal, const Vec3& dir,
                   std::span<const CollisionModel* const> finished, const SweepParams& params);

/// Keeps the first candidate whose approach is free; zeroes the quality when none is.
AssemblyDirection swept_reset(AssemblyDirection dir, const Mesh& object, const Pose& goal,
                              std::span<const CollisionModel* const> finished, const SweepParams& params);

}  // namespace asmplan
