#include "asmplan/geometry/pose.hpp"

#include <cmath>

namespace asmplan {

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {}

Pose Pose::from_axis_angle(const Vec3& axis, double angle, const Vec3& t) {
    return {Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(), t};
}

Pose Pose::inverse() const {
    const Mat3 rt = rotation_.transpose();
    return {rt, -(rt * translation_)};
}

Pose Pose::operator*(const Pose& other) const {
    return {rotation_ * other.rotation_, rotation_ * other.translation_ + translation_};
}

bool is_rotation(const Mat3& r, double tol) {
    if (!r.allFinite()) return false;
    const Mat3 err = r.transpose() * r - Mat3::Identity();
    return err.cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

}  // namespace asmplan
