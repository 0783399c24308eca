#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "asmplan/geometry/mesh.hpp"
#include "asmplan/geometry/pose.hpp"

namespace testing {

using asmplan::Mat3;
using asmplan::Pose;
using asmplan::Vec3;

/// Small seeded generator shared by the property tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    Vec3 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
    Vec3 unit() {
        for (;;) {
            const Vec3 v = vec(-1.0, 1.0);
            const double n = v.norm();
            if (n > 1e-3 && n <= 1.0) return v / n;
        }
    }
    Mat3 rotation() {
        return Eigen::AngleAxisd(uniform(0.0, 2.0 * M_PI), unit()).toRotationMatrix();
    }
    Pose pose(double spread) { return {rotation(), vec(-spread, spread)}; }

private:
    std::mt19937_64 gen_;
};

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("asmplan_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline asmplan::Mesh unit_cube(const Vec3& lo = Vec3::Zero()) {
    return asmplan::make_box(lo, lo + Vec3::Ones());
}

}  // namespace testing
