#include "asmplan/contacts.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "asmplan/errors.hpp"
#include "asmplan/geometry/hull.hpp"

namespace asmplan {
namespace {

struct Piece {
    std::size_t counterpart;  // index into bases; bases.size() means the table
    Vec3 normal;
    std::vector<Vec3> polygon;
    double area;
};

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

Vec3 triangle_normal(const std::array<Vec3, 3>& t) { return (t[1] - t[0]).cross(t[2] - t[0]).normalized(); }

}  // namespace

std::vector<Vec3> Contact::patch_vertices() const {
    std::vector<Vec3> out;
    for (const auto& p : pieces) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::vector<Vec3> ContactSet::normals() const {
    std::vector<Vec3> out;
    out.reserve(contacts.size());
    for (const auto& c : contacts) out.push_back(c.normal);
    return out;
}

double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

std::vector<Vec2> clip_polygon(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip) {
    std::vector<Vec2> out = subject;
    for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
        const Vec2 a = clip[e];
        const Vec2 b = clip[(e + 1) % clip.size()];
        auto side = [&](const Vec2& p) { return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x()); };
        std::vector<Vec2> in = std::move(out);
        out.clear();
        for (std::size_t i = 0; i < in.size(); ++i) {
            const Vec2& p = in[i];
            const Vec2& q = in[(i + 1) % in.size()];
            const double sp = side(p), sq = side(q);
            if (sp >= 0.0) out.push_back(p);
            if ((sp >= 0.0) != (sq >= 0.0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
        }
    }
    return out;
}

ContactSet detect_contacts(const std::string& object_id, const Mesh& object, std::span<const BaseEntity> bases,
                           bool with_table, const ContactParams& params) {
    const double cos_n = std::cos(deg2rad(params.eps_n));
    const double tol = params.delta_c;

    const CollisionModel shrunk = CollisionModel::shrunk(object, tol);
    for (const auto& base : bases) {
        if (meshes_intersect(shrunk, *base.model, 0.0)) {
            const double depth = estimate_penetration_depth(object, Pose::identity(), *base.mesh, Pose::identity(), tol);
            std::ostringstream msg;
            msg << "'" << object_id << "' penetrates '" << base.id << "' by about " << depth << " mm";
            throw PenetrationError(msg.str(), depth);
        }
    }
    if (with_table) {
        double min_z = std::numeric_limits<double>::infinity();
        for (const auto& v : object.vertices()) min_z = std::min(min_z, v.z());
        if (min_z < -tol) {
            std::ostringstream msg;
            msg << "'" << object_id << "' sinks " << -min_z << " mm below the table";
            throw PenetrationError(msg.str(), -min_z);
        }
    }

    std::vector<Piece> pieces;
    const CollisionModel obj_model(object);
    for (std::size_t b = 0; b < bases.size(); ++b) {
        const CollisionModel& other = *bases[b].model;
        for_each_near_pair(obj_model, other, tol, [&](std::uint32_t i, std::uint32_t j) {
            const auto ti = obj_model.triangle(i);
            const auto tj = other.triangle(j);
            const Vec3 ni = triangle_normal(ti);
            if (ni.dot(triangle_normal(tj)) > -cos_n) return true;
            for (const auto& v : tj) {
                if (std::abs(ni.dot(v - ti[0])) > tol) return true;
            }
            const auto [u, w] = plane_basis(ni);
            auto flat = [&](const Vec3& p) { return Vec2((p - ti[0]).dot(u), (p - ti[0]).dot(w)); };
            const std::vector<Vec2> clip{flat(ti[0]), flat(ti[1]), flat(ti[2])};
            const std::vector<Vec2> subject{flat(tj[0]), flat(tj[2]), flat(tj[1])};
            const auto poly = clip_polygon(subject, clip);
            if (poly.size() < 3) return true;
            const double area = std::abs(polygon_area(poly));
            if (area <= 1e-12) return true;
            Piece piece{b, ni, {}, area};
            for (const auto& q : poly) piece.polygon.push_back(ti[0] + q.x() * u + q.y() * w);
            pieces.push_back(std::move(piece));
            return true;
        });
    }
    if (with_table) {
        for (std::size_t t = 0; t < object.triangle_count(); ++t) {
            const Vec3 n = object.face_normal(t);
            if (-n.z() < cos_n) continue;
            bool on_table = true;
            for (int k = 0; k < 3; ++k) on_table = on_table && std::abs(object.corner(t, k).z()) <= tol;
            if (!on_table) continue;
            pieces.push_back({bases.size(), n, {object.corner(t, 0), object.corner(t, 1), object.corner(t, 2)},
                              object.face_area(t)});
        }
    }

    struct Group {
        std::size_t counterpart;
        Vec3 seed;
        Vec3 weighted = Vec3::Zero();
        Contact contact;
    };
    std::vector<Group> groups;
    for (auto& p : pieces) {
        Group* g = nullptr;
        for (auto& cand : groups) {
            if (cand.counterpart == p.counterpart && cand.seed.dot(p.normal) >= cos_n) {
                g = &cand;
                break;
            }
        }
        if (!g) {
            groups.push_back({p.counterpart, p.normal, Vec3::Zero(), {}});
            g = &groups.back();
            g->contact.counterpart = p.counterpart < bases.size() ? bases[p.counterpart].id : kTableId;
        }
        g->weighted += p.area * p.normal;
        g->contact.area += p.area;
        g->contact.pieces.push_back(std::move(p.polygon));
    }

    ContactSet cs;
    cs.object_id = object_id;
    for (auto& g : groups) {
        if (g.contact.area < params.a_min) continue;
        g.contact.normal = g.weighted.normalized();
        cs.contacts.push_back(std::move(g.contact));
    }
    return cs;
}

ContactSet support_contacts(const ContactSet& cs, double alpha_sup) {
    const double cos_a = std::cos(deg2rad(alpha_sup));
    ContactSet out;
    out.object_id = cs.object_id;
    for (const auto& c : cs.contacts) {
        if (c.counterpart == kTableId || -c.normal.z() >= cos_a - 1e-12) out.contacts.push_back(c);
    }
    return out;
}

}  // namespace asmplan
