#include "trl/shell_element.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "trl/errors.hpp"

namespace trl::fea {

namespace {

// Local indices of the 6-node quadratic rotation field: corners 0..2 then
// mid-edges on (1,2), (2,0), (0,1).
constexpr int kEdge[3][2] = {{1, 2}, {2, 0}, {0, 1}};

using Row9 = Eigen::Matrix<double, 1, 9>;
using Rot9 = Eigen::Matrix<double, 2, 9>;

void quadratic_derivatives(double xi, double eta, double dxi[6], double deta[6]) {
  const double l1 = 1.0 - xi - eta;
  dxi[0] = -(4.0 * l1 - 1.0);
  deta[0] = -(4.0 * l1 - 1.0);
  dxi[1] = 4.0 * xi - 1.0;
  deta[1] = 0.0;
  dxi[2] = 0.0;
  deta[2] = 4.0 * eta - 1.0;
  dxi[3] = 4.0 * eta;
  deta[3] = 4.0 * xi;
  dxi[4] = -4.0 * eta;
  deta[4] = 4.0 * (l1 - eta);
  dxi[5] = 4.0 * (l1 - xi);
  deta[5] = -4.0 * xi;
}

// beta = (beta_x, beta_y) = (ry, -rx) at corner c.
Rot9 corner_rotation(int c) {
  Rot9 r = Rot9::Zero();
  r(0, 3 * c + 2) = 1.0;
  r(1, 3 * c + 1) = -1.0;
  return r;
}

// Kirchhoff constraint at the mid-edge: tangential rotation from the cubic
// edge deflection, normal rotation averaged linearly.
Rot9 midside_rotation(const ElementFrame& f, int i, int j) {
  const Eigen::Vector2d edge = f.xy[j] - f.xy[i];
  const double len = edge.norm();
  const Eigen::Vector2d s = edge / len;
  const Eigen::Vector2d n(s.y(), -s.x());
  Row9 dw = Row9::Zero();
  dw(3 * j) = 1.0;
  dw(3 * i) = -1.0;
  const Rot9 sum = corner_rotation(i) + corner_rotation(j);
  const Eigen::Matrix2d ss = s * s.transpose();
  const Eigen::Matrix2d nn = n * n.transpose();
  return s * (-1.5 / len) * dw - 0.25 * ss * sum + 0.5 * nn * sum;
}

}  // namespace

ElementFrame element_frame(const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  const Vec3 a = p1 - p0;
  const Vec3 b = p2 - p0;
  const Vec3 n = a.cross(b);
  const double twice_area = n.norm();
  const double scale = std::max({a.squaredNorm(), b.squaredNorm(), (p2 - p1).squaredNorm()});
  if (!(twice_area > 1e-12 * scale)) throw SolverError("degenerate element geometry");
  ElementFrame f;
  const Vec3 e1 = a.normalized();
  const Vec3 e3 = n / twice_area;
  const Vec3 e2 = e3.cross(e1);
  f.rotation.row(0) = e1.transpose();
  f.rotation.row(1) = e2.transpose();
  f.rotation.row(2) = e3.transpose();
  f.xy[0] = Eigen::Vector2d::Zero();
  f.xy[1] = Eigen::Vector2d(a.dot(e1), a.dot(e2));
  f.xy[2] = Eigen::Vector2d(b.dot(e1), b.dot(e2));
  f.area = 0.5 * twice_area;
  return f;
}

Eigen::Matrix3d plane_stress_matrix(double youngs, double poisson) {
  const double c = youngs / (1.0 - poisson * poisson);
  Eigen::Matrix3d q;
  q << c, c * poisson, 0.0,
       c * poisson, c, 0.0,
       0.0, 0.0, c * 0.5 * (1.0 - poisson);
  return q;
}

Eigen::Matrix<double, 3, 6> cst_strain_matrix(const ElementFrame& f) {
  Eigen::Matrix<double, 3, 6> b = Eigen::Matrix<double, 3, 6>::Zero();
  const double inv2a = 1.0 / (2.0 * f.area);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double bi = f.xy[j].y() - f.xy[k].y();
    const double ci = f.xy[k].x() - f.xy[j].x();
    b(0, 2 * i) = bi * inv2a;
    b(1, 2 * i + 1) = ci * inv2a;
    b(2, 2 * i) = ci * inv2a;
    b(2, 2 * i + 1) = bi * inv2a;
  }
  return b;
}

Eigen::Matrix<double, 3, 9> dkt_curvature_matrix(const ElementFrame& f, double xi, double eta) {
  Rot9 nodal[6];
  for (int c = 0; c < 3; ++c) nodal[c] = corner_rotation(c);
  for (int m = 0; m < 3; ++m) nodal[3 + m] = midside_rotation(f, kEdge[m][0], kEdge[m][1]);

  Eigen::Matrix2d jac;
  jac << f.xy[1].x() - f.xy[0].x(), f.xy[1].y() - f.xy[0].y(),
         f.xy[2].x() - f.xy[0].x(), f.xy[2].y() - f.xy[0].y();
  const Eigen::Matrix2d jinv = jac.inverse();

  double dxi[6], deta[6];
  quadratic_derivatives(xi, eta, dxi, deta);
  Eigen::Matrix<double, 3, 9> b = Eigen::Matrix<double, 3, 9>::Zero();
  for (int k = 0; k < 6; ++k) {
    const double dx = jinv(0, 0) * dxi[k] + jinv(0, 1) * deta[k];
    const double dy = jinv(1, 0) * dxi[k] + jinv(1, 1) * deta[k];
    b.row(0) += dx * nodal[k].row(0);
    b.row(1) += dy * nodal[k].row(1);
    b.row(2) += dy * nodal[k].row(0) + dx * nodal[k].row(1);
  }
  return b;
}

Eigen::Matrix<double, 6, 6> membrane_stiffness(const ElementFrame& f, double youngs, double poisson,
                                               double thickness) {
  const auto b = cst_strain_matrix(f);
  return thickness * f.area * b.transpose() * plane_stress_matrix(youngs, poisson) * b;
}

Eigen::Matrix<double, 9, 9> plate_stiffness(const ElementFrame& f, double youngs, double poisson,
                                            double thickness) {
  const Eigen::Matrix3d d =
      plane_stress_matrix(youngs, poisson) * (thickness * thickness * thickness / 12.0);
  static constexpr double kGauss[3][2] = {{1.0 / 6.0, 1.0 / 6.0}, {2.0 / 3.0, 1.0 / 6.0},
                                          {1.0 / 6.0, 2.0 / 3.0}};
  Eigen::Matrix<double, 9, 9> k = Eigen::Matrix<double, 9, 9>::Zero();
  for (const auto& gp : kGauss) {
    const auto b = dkt_curvature_matrix(f, gp[0], gp[1]);
    k += (f.area / 3.0) * b.transpose() * d * b;
  }
  return k;
}

Matrix18 local_stiffness(const ElementFrame& f, double youngs, double poisson, double thickness,
                         double drilling_factor) {
  Matrix18 k = Matrix18::Zero();
  const auto km = membrane_stiffness(f, youngs, poisson, thickness);
  const auto kb = plate_stiffness(f, youngs, poisson, thickness);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k(6 * a + i, 6 * b + j) = km(2 * a + i, 2 * b + j);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k(6 * a + 2 + i, 6 * b + 2 + j) = kb(3 * a + i, 3 * b + j);
    }
  }
  // Drilling penalty on rz minus the element's in-plane rotation
  // 0.5 (dv/dx - du/dy), so only the six rigid motions remain free.
  const double two_a = 2.0 * f.area;
  Eigen::Matrix<double, 1, 18> omega = Eigen::Matrix<double, 1, 18>::Zero();
  for (int a = 0; a < 3; ++a) {
    const auto& pb = f.xy[(a + 1) % 3];
    const auto& pc = f.xy[(a + 2) % 3];
    omega(6 * a) = -0.5 * (pc.x() - pb.x()) / two_a;  // -0.5 du/dy
    omega(6 * a + 1) = 0.5 * (pb.y() - pc.y()) / two_a;  // 0.5 dv/dx
  }
  const double kd = drilling_factor * youngs * thickness * f.area;
  for (int a = 0; a < 3; ++a) {
    Eigen::Matrix<double, 1, 18> row = -omega;
    row(6 * a + 5) += 1.0;
    k.noalias() += (kd / 3.0) * row.transpose() * row;
  }
  return k;
}

Matrix18 frame_transform(const ElementFrame& f) {
  Matrix18 t = Matrix18::Zero();
  for (int blk = 0; blk < 6; ++blk) t.block<3, 3>(3 * blk, 3 * blk) = f.rotation;
  return t;
}

Matrix18 element_stiffness(const Vec3& p0, const Vec3& p1, const Vec3& p2, double youngs,
                           double poisson, double thickness, double drilling_factor) {
  const ElementFrame f = element_frame(p0, p1, p2);
  const Matrix18 t = frame_transform(f);
  Matrix18 k = t.transpose() * local_stiffness(f, youngs, poisson, thickness, drilling_factor) * t;
  // Exact symmetry regardless of rounding in the triple product.
  return 0.5 * (k + k.transpose());
}

double von_mises_plane(const Eigen::Vector3d& s) {
  return std::sqrt(std::max(0.0, s[0] * s[0] - s[0] * s[1] + s[1] * s[1] + 3.0 * s[2] * s[2]));
}

ElementStress element_stress(const Vec3& p0, const Vec3& p1, const Vec3& p2, double youngs,
                             double poisson, double thickness, const Vector18& u_global) {
  const ElementFrame f = element_frame(p0, p1, p2);
  const Vector18 ul = frame_transform(f) * u_global;
  Eigen::Matrix<double, 6, 1> um;
  Eigen::Matrix<double, 9, 1> ub;
  for (int a = 0; a < 3; ++a) {
    um(2 * a) = ul(6 * a);
    um(2 * a + 1) = ul(6 * a + 1);
    for (int i = 0; i < 3; ++i) ub(3 * a + i) = ul(6 * a + 2 + i);
  }
  const Eigen::Matrix3d q = plane_stress_matrix(youngs, poisson);
  const Eigen::Vector3d membrane_strain = cst_strain_matrix(f) * um;
  const Eigen::Vector3d curvature = dkt_curvature_matrix(f, 1.0 / 3.0, 1.0 / 3.0) * ub;
  ElementStress s;
  s.membrane = q * membrane_strain;
  const Eigen::Vector3d bending = q * curvature * (0.5 * thickness);
  s.top = s.membrane + bending;
  s.bottom = s.membrane - bending;
  s.von_mises = std::max(von_mises_plane(s.top), von_mises_plane(s.bottom));
  return s;
}

}  // namespace trl::fea
