#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gravipose {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

}  // namespace gravipose
