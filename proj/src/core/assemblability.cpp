#include "asmplan/assemblability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "asmplan/errors.hpp"
#include "asmplan/geometry/hull.hpp"
#include "asmplan/geometry/path.hpp"

namespace asmplan {
namespace {

constexpr const char* kNames[] = {
    "A_single_vector",         "B_line_through_origin",      "C_polygon_origin_vertex",
    "D_polygon_origin_edge",   "E_polygon_origin_inside",    "F_polyhedron_origin_vertex",
    "G_polyhedron_origin_edge", "H_polyhedron_origin_face",  "I_polyhedron_origin_inside",
};

double cos_deg(double d) { return std::cos(d * std::numbers::pi / 180.0); }

/// Orthonormal basis of span(vs), dropping near-dependent vectors.
std::vector<Vec3> orthonormal_basis(std::span<const Vec3> vs) {
    std::vector<Vec3> q;
    for (const auto& v : vs) {
        Vec3 r = v;
        for (const auto& b : q) r -= r.dot(b) * b;
        if (r.norm() > 1e-9) q.push_back(r.normalized());
    }
    return q;
}

Vec3 project_out(Vec3 v, std::span<const Vec3> basis) {
    for (const auto& b : basis) v -= v.dot(b) * b;
    return v;
}

/// Pairs of clustered normals that point in opposite directions.
std::vector<std::pair<std::size_t, std::size_t>> opposite_pairs(const std::vector<Vec3>& u, double eps_n) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const double c = cos_deg(eps_n);
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            if (u[i].dot(u[j]) <= -c) out.emplace_back(i, j);
        }
    }
    return out;
}

/// Outward normal of the hull face of {normals, 0} that contains the origin.
std::optional<Vec3> origin_face_normal(const std::vector<Vec3>& u, double eps_class) {
    std::vector<Vec3> pts = u;
    pts.push_back(Vec3::Zero());
    const Hull3D h = convex_hull(std::span<const Vec3>(pts), eps_class);
    if (h.rank != 3) return std::nullopt;
    for (std::size_t f = 0; f < h.faces.size(); ++f) {
        if (std::abs(h.normals[f].dot(h.vertices[h.faces[f][0]])) <= eps_class) return h.normals[f];
    }
    return std::nullopt;
}

}  // namespace

const char* to_string(CaseLabel c) { return kNames[static_cast<int>(c)]; }

char case_letter(CaseLabel c) { return static_cast<char>('A' + static_cast<int>(c)); }

std::optional<CaseLabel> case_from_string(const std::string& s) {
    for (int i = 0; i < 9; ++i) {
        if (s == kNames[i] || (s.size() == 1 && s[0] == 'A' + i)) return static_cast<CaseLabel>(i);
    }
    return std::nullopt;
}

double case_quality(CaseLabel c) {
    switch (c) {
        case CaseLabel::A_single_vector: return kInfQuality;
        case CaseLabel::B_line_through_origin: return 10.0;
        case CaseLabel::C_polygon_origin_vertex: return kInfQuality;
        case CaseLabel::D_polygon_origin_edge: return 3.0;
        case CaseLabel::E_polygon_origin_inside: return 2.0;
        case CaseLabel::F_polyhedron_origin_vertex: return kInfQuality;
        case CaseLabel::G_polyhedron_origin_edge: return 3.0;
        case CaseLabel::H_polyhedron_origin_face: return 1.0;
        case CaseLabel::I_polyhedron_origin_inside: return 0.0;
    }
    return 0.0;
}

std::vector<Vec3> cluster_normals(std::span<const Vec3> normals, double eps_n) {
    const double c = cos_deg(eps_n);
    std::vector<Vec3> sums, reps;
    for (const auto& n : normals) {
        const Vec3 u = n.normalized();
        std::size_t k = 0;
        while (k < reps.size() && reps[k].dot(u) < c) ++k;
        if (k == reps.size()) {
            sums.push_back(u);
            reps.push_back(u);
        } else {
            sums[k] += u;
            reps[k] = sums[k].normalized();
        }
    }
    return reps;
}

CaseLabel classify(std::span<const Vec3> normals, double eps_n, double eps_class) {
    if (normals.empty()) throw EmptyNormals("no contact normals: the object touches nothing");
    const auto u = cluster_normals(normals, eps_n);
    if (u.size() == 1) return CaseLabel::A_single_vector;

    // The origin goes last so ties in the hull seeding never pick it.
    std::vector<Vec3> pts = u;
    pts.push_back(Vec3::Zero());
    const std::size_t origin = pts.size() - 1;
    const Hull3D h = convex_hull(std::span<const Vec3>(pts), eps_class);
    const bool origin_vertex =
        std::find(h.source_index.begin(), h.source_index.end(), origin) != h.source_index.end();

    if (h.rank <= 1) return CaseLabel::B_line_through_origin;
    if (h.rank == 2) {
        const auto [bu, bv] = plane_basis(h.plane_normal);
        std::vector<Vec2> flat;
        for (const auto& p : pts) flat.emplace_back(p.dot(bu), p.dot(bv));
        const Hull2D h2 = convex_hull(std::span<const Vec2>(flat), eps_class);
        if (std::find(h2.source_index.begin(), h2.source_index.end(), origin) != h2.source_index.end()) {
            return CaseLabel::C_polygon_origin_vertex;
        }
        return point_vs_hull(h2, Vec2::Zero(), eps_class) == HullSide::boundary ? CaseLabel::D_polygon_origin_edge
                                                                                 : CaseLabel::E_polygon_origin_inside;
    }
    if (origin_vertex) return CaseLabel::F_polyhedron_origin_vertex;
    if (signed_distance(h, Vec3::Zero()) > eps_class) return CaseLabel::I_polyhedron_origin_inside;
    std::vector<Vec3> planes;
    for (std::size_t f = 0; f < h.faces.size(); ++f) {
        if (std::abs(h.normals[f].dot(h.vertices[h.faces[f][0]])) > eps_class) continue;
        const bool seen = std::any_of(planes.begin(), planes.end(),
                                      [&](const Vec3& m) { return m.dot(h.normals[f]) > 1.0 - 1e-9; });
        if (!seen) planes.push_back(h.normals[f]);
    }
    return planes.size() >= 2 ? CaseLabel::G_polyhedron_origin_edge : CaseLabel::H_polyhedron_origin_face;
}

bool in_feasible_cone(const Vec3& t, std::span<const Vec3> normals, double eps) {
    return std::all_of(normals.begin(), normals.end(), [&](const Vec3& n) { return t.dot(n) >= -eps; });
}

std::optional<Vec3> max_clearance_direction(std::span<const Vec3> normals, std::span<const Vec3> lineality) {
    const auto basis = orthonormal_basis(lineality);
    std::vector<Vec3> p;
    for (const auto& n : normals) {
        const Vec3 r = project_out(n, basis);
        if (r.norm() > 1e-9) p.push_back(r);
    }
    if (p.empty()) return std::nullopt;

    // Minimum-norm point of conv(p): it lies in the hull of at most three points.
    Vec3 best = p[0];
    auto consider = [&](const Vec3& c) {
        if (c.squaredNorm() < best.squaredNorm()) best = c;
    };
    for (std::size_t i = 0; i < p.size(); ++i) {
        consider(p[i]);
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            const Vec3 d = p[j] - p[i];
            const double t = std::clamp(-p[i].dot(d) / d.squaredNorm(), 0.0, 1.0);
            consider(p[i] + t * d);
            for (std::size_t k = j + 1; k < p.size(); ++k) {
                const Vec3 e1 = p[j] - p[i], e2 = p[k] - p[i];
                if (e1.cross(e2).norm() <= 1e-12) continue;
                Vec3 c;
                point_triangle_distance(Vec3::Zero(), {p[i], p[j], p[k]}, &c);
                consider(c);
            }
        }
    }
    if (best.norm() <= 1e-9) return std::nullopt;
    const Vec3 t = best.normalized();
    for (const auto& q : p) {
        if (t.dot(q) <= 1e-9) return std::nullopt;
    }
    return t;
}

AssemblyDirection optimal_direction(CaseLabel label, std::span<const Vec3> normals, double eps_n) {
    const auto u = cluster_normals(normals, eps_n);
    AssemblyDirection out;
    out.label = label;
    out.quality = case_quality(label);
    std::vector<Vec3> lineality;

    switch (label) {
        case CaseLabel::A_single_vector:
            out.candidates = {u.front()};
            break;
        case CaseLabel::B_line_through_origin: {
            const Vec3 n1 = u.front();
            lineality = {n1};
            const Vec3 down(0, 0, -1);
            if (std::abs(n1.z()) > 1.0 - 1e-9) {
                out.candidates = {Vec3::UnitX()};
            } else {
                out.candidates = {(down - down.dot(n1) * n1).normalized()};
            }
            break;
        }
        case CaseLabel::C_polygon_origin_vertex:
        case CaseLabel::F_polyhedron_origin_vertex: {
            Vec3 s = Vec3::Zero();
            for (const auto& n : u) s += n;
            out.candidates = {s.norm() > 1e-12 ? Vec3(s.normalized()) : Vec3::Zero()};
            break;
        }
        case CaseLabel::D_polygon_origin_edge:
        case CaseLabel::G_polyhedron_origin_edge: {
            const auto pairs = opposite_pairs(u, eps_n);
            std::vector<bool> paired(u.size(), false);
            for (const auto& [i, j] : pairs) {
                paired[i] = paired[j] = true;
                lineality.push_back(u[i]);
            }
            Vec3 s = Vec3::Zero();
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (!paired[i]) s += u[i];
            }
            const Vec3 proj = project_out(s, orthonormal_basis(lineality));
            out.candidates = {proj.norm() > 1e-12 ? Vec3(proj.normalized()) : Vec3::Zero()};
            break;
        }
        case CaseLabel::E_polygon_origin_inside: {
            const double sin_n = std::sin(eps_n * std::numbers::pi / 180.0);
            for (std::size_t j = 0; j < u.size() && out.candidates.empty(); ++j) {
                for (std::size_t k = j + 1; k < u.size(); ++k) {
                    const Vec3 c = u[j].cross(u[k]);
                    if (c.norm() > sin_n) {
                        out.candidates = {c.normalized(), -c.normalized()};
                        break;
                    }
                }
            }
            break;
        }
        case CaseLabel::H_polyhedron_origin_face: {
            const auto m = origin_face_normal(u, 1e-6);
            if (m) {
                out.candidates = {in_feasible_cone(-*m, u) ? Vec3(-*m) : Vec3(*m)};
            }
            break;
        }
        case CaseLabel::I_polyhedron_origin_inside:
            break;
    }

    if (out.quality > 0.0) {
        // Formula directions are checked against the cone; failures fall back
        // to the largest-clearance direction.
        std::vector<Vec3> verified;
        for (const auto& c : out.candidates) {
            if (c.norm() > 0.5 && in_feasible_cone(c, u)) {
                verified.push_back(c);
            } else if (auto f = max_clearance_direction(u, lineality)) {
                verified.push_back(*f);
            }
        }
        out.candidates = verified;
        if (out.candidates.empty()) out.quality = 0.0;
    }
    if (!out.candidates.empty()) out.n_o = out.candidates.front();
    return out;
}

bool sweep_blocked(const Mesh& object, const Pose& goal, const Vec3& dir,
                   std::span<const CollisionModel* const> finished, const SweepParams& params) {
    const CollisionModel at_goal = CollisionModel::shrunk(object, params.delta_c, goal);
    double min_z = std::numeric_limits<double>::infinity();
    for (const auto& v : object.vertices()) min_z = std::min(min_z, goal.apply(v).z());
    for (const auto& pose : sweep_poses(goal, dir, params.offset, params.steps)) {
        const Vec3 shift = pose.translation() - goal.translation();
        if (params.with_table && min_z + shift.z() < -params.delta_c) return true;
        if (finished.empty()) continue;
        const CollisionModel moved = at_goal.translated(shift);
        for (const auto* obs : finished) {
            if (meshes_intersect(moved, *obs, 0.0)) return true;
        }
    }
    return false;
}

AssemblyDirection swept_reset(AssemblyDirection dir, const Mesh& object, const Pose& goal,
                              std::span<const CollisionModel* const> finished, const SweepParams& params) {
    if (dir.quality <= 0.0) return dir;
    for (const auto& c : dir.candidates) {
        if (!sweep_blocked(object, goal, c, finished, params)) {
            dir.n_o = c;
            return dir;
        }
    }
    dir.quality = 0.0;
    dir.swept_blocked = true;
    return dir;
}

}  // namespace asmplan
