#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace asmplan {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform x -> R x + t. Units are millimeters; the world frame is Z-up
/// with the table plane at z = 0.
class Pose {
public:
    Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
    Pose(const Mat3& rotation, const Vec3& translation);

    static Pose identity() { return {}; }
    static Pose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }
    /// Rotation about a unit axis through the origin, angle in radians.
    static Pose from_axis_angle(const Vec3& axis, double angle, const Vec3& t = Vec3::Zero());

    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }

    Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
    Vec3 apply_direction(const Vec3& d) const { return rotation_ * d; }

    Pose inverse() const;
    /// (this * other)(x) == this(other(x))
    Pose operator*(const Pose& other) const;

    bool operator==(const Pose& other) const {
        return rotation_ == other.rotation_ && translation_ == other.translation_;
    }

private:
    Mat3 rotation_;
    Vec3 translation_;
};

/// True when R is orthonormal with determinant +1 within `tol`.
bool is_rotation(const Mat3& r, double tol = 1e-9);

}  // namespace asmplan
