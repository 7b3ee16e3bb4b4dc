#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>

namespace dic {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat3 = Eigen::Matrix3d;

// Foot ordering used throughout: LF, RF, LR, RR.
enum Leg : int { kLF = 0, kRF = 1, kLR = 2, kRR = 3 };
inline constexpr int kNumLegs = 4;

// Left legs carry the abduction offset on +y, right legs on -y.
inline double legSideSign(int leg) { return (leg == kLF || leg == kLR) ? 1.0 : -1.0; }

inline constexpr double kGravity = 9.81;  // m/s^2

}  // namespace dic
