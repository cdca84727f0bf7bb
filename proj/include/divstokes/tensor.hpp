#ifndef DIVSTOKES_TENSOR_HPP
#define DIVSTOKES_TENSOR_HPP

#include <Eigen/Dense>

namespace divstokes {

/// Skew matrix with 2 kappa(v) w = v x w.
inline Eigen::Matrix3d kappa(const Eigen::Vector3d& v) {
  Eigen::Matrix3d k;
  k << 0.0, -v[2], v[1],
       v[2], 0.0, -v[0],
       -v[1], v[0], 0.0;
  return 0.5 * k;
}

inline Eigen::Matrix3d dev(const Eigen::Matrix3d& t) {
  return t - (t.trace() / 3.0) * Eigen::Matrix3d::Identity();
}

inline Eigen::Matrix3d sym(const Eigen::Matrix3d& t) { return 0.5 * (t + t.transpose()); }

/// curl of an affine field x -> c + G x, where G is its constant gradient.
inline Eigen::Vector3d curl_of_gradient(const Eigen::Matrix3d& g) {
  return {g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1)};
}

/// Tangential part v - (v.n) n.
inline Eigen::Vector3d tangential(const Eigen::Vector3d& v, const Eigen::Vector3d& n) { return v - v.dot(n) * n; }

}  // namespace divstokes

#endif
