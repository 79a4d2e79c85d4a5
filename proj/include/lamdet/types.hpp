#pragma once

#include <Eigen/Dense>
#include <complex>

namespace lamdet {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Directional cosine u = sin(theta) of an angle off boresight.
inline double u_from_deg(double theta_deg) { return std::sin(deg_to_rad(theta_deg)); }
inline double deg_from_u(double u) { return rad_to_deg(std::asin(u)); }

} // namespace lamdet
