#pragma once

#include <span>
#include <string>
#include <vector>

#include "asmplan/geometry/collision.hpp"
#include "asmplan/geometry/mesh.hpp"

namespace asmplan {

inline const std::string kTableId = "table";

/// Planar touching region between the manipulated object and one counterpart.
///
/// `normal` is the manipulated object's outward face normal. A contact groups
/// every touching piece with the same counterpart and normal direction; each
/// piece is a convex polygon lying in the object's face plane.
struct Contact {
    Vec3 normal = Vec3::Zero();
    std::vector<std::vector<Vec3>> pieces;
    std::string counterpart;
    double area = 0.0;

    std::vector<Vec3> patch_vertices() const;
};

struct ContactSet {
    std::string object_id;
    std::vector<Contact> contacts;

    bool empty() const { return contacts.empty(); }
    std::vector<Vec3> normals() const;
};

struct ContactParams {
    double delta_c = 0.1;
    double eps_n = 0.5;   // degrees
    double a_min = 1.0;   // mm^2
};

/// A posed solid the object may rest against. `model` must be built from
/// `mesh` (world frame).
struct BaseEntity {
    std::string id;
    const Mesh* mesh = nullptr;
    const CollisionModel* model = nullptr;
};

/// Contacts of `object` (world frame) against `bases` and, when `with_table`,
/// the table plane z = 0. Throws PenetrationError if the object overlaps any
/// base by more than delta_c or sinks below the table.
ContactSet detect_contacts(const std::string& object_id, const Mesh& object, std::span<const BaseEntity> bases,
                           bool with_table, const ContactParams& params = {});

/// Contacts whose normal is within `alpha_sup` degrees of -Z, plus table contacts.
ContactSet support_contacts(const ContactSet& cs, double alpha_sup);

/// Convex polygon clipping (Sutherland-Hodgman); `clip` must be CCW.
std::vector<Vec2> clip_polygon(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip);
double polygon_area(const std::vector<Vec2>& poly);

}  // namespace asmplan
