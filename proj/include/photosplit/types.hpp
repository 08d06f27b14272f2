#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Core>

namespace photosplit {

using Index = Eigen::Index;

template <typename Scalar, int Rows, int Cols = Rows>
using Mat = Eigen::Matrix<Scalar, Rows, Cols>;

template <typename Scalar, int Rows>
using Vec = Eigen::Matrix<Scalar, Rows, 1>;

using Vec4 = Vec<double, 4>;
using Mat4 = Mat<double, 4>;
using VecX = Vec<double, Eigen::Dynamic>;
using MatX = Mat<double, Eigen::Dynamic>;

using Complex = std::complex<double>;
using Mat2c = Mat<Complex, 2>;
using Mat4c = Mat<Complex, 4>;
using Vec4c = Vec<Complex, 4>;

inline constexpr double kPi = std::numbers::pi;

// All rates are in units of the emitter rate gamma and all times in units of
// 1/gamma, so gamma itself never appears as a parameter.
inline constexpr double kEmitterRate = 1.0;

}  // namespace photosplit
