#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace trl::fea {

using Vec3 = Eigen::Vector3d;
using Matrix18 = Eigen::Matrix<double, 18, 18>;
using Vector18 = Eigen::Matrix<double, 18, 1>;

/// Flat facet shell triangle: constant-strain membrane, discrete-Kirchhoff
/// (DKT) plate bending and a penalised drilling rotation. Six dof per node
/// (u, v, w, rx, ry, rz), SI units throughout.
struct ElementFrame {
  Eigen::Matrix3d rotation;  // rows: local e1, e2, e3 in global coordinates
  Eigen::Vector2d xy[3];     // local in-plane node coordinates, node 0 at origin
  double area = 0.0;
};

/// Throws SolverError for a degenerate (zero-area) triangle.
ElementFrame element_frame(const Vec3& p0, const Vec3& p1, const Vec3& p2);

Eigen::Matrix3d plane_stress_matrix(double youngs, double poisson);

/// CST strain-displacement matrix over local (u0, v0, u1, v1, u2, v2).
Eigen::Matrix<double, 3, 6> cst_strain_matrix(const ElementFrame& f);

/// DKT curvature-displacement matrix at natural point (xi, eta) over local
/// (w0, rx0, ry0, w1, ...). Curvatures are (kxx, kyy, 2kxy) of the normal
/// rotation field beta = -grad(w).
Eigen::Matrix<double, 3, 9> dkt_curvature_matrix(const ElementFrame& f, double xi, double eta);

Eigen::Matrix<double, 6, 6> membrane_stiffness(const ElementFrame& f, double youngs, double poisson,
                                               double thickness);
Eigen::Matrix<double, 9, 9> plate_stiffness(const ElementFrame& f, double youngs, double poisson,
                                            double thickness);

/// Local 18x18 matrix (membrane + bending + drilling) before rotation.
Matrix18 local_stiffness(const ElementFrame& f, double youngs, double poisson, double thickness,
                         double drilling_factor);

/// Block-diagonal rotation taking global element dofs to local ones.
Matrix18 frame_transform(const ElementFrame& f);

/// Global-frame element stiffness.
Matrix18 element_stiffness(const Vec3& p0, const Vec3& p1, const Vec3& p2, double youngs,
                           double poisson, double thickness, double drilling_factor);

struct ElementStress {
  Eigen::Vector3d membrane;  // sx, sy, txy at mid-surface, Pa
  Eigen::Vector3d top;       // total stress at +t/2, Pa
  Eigen::Vector3d bottom;    // total stress at -t/2, Pa
  double von_mises = 0.0;    // max over the two faces, Pa
};

double von_mises_plane(const Eigen::Vector3d& s);

/// Stress at the element centroid from global nodal displacements.
ElementStress element_stress(const Vec3& p0, const Vec3& p1, const Vec3& p2, double youngs,
                             double poisson, double thickness, const Vector18& u_global);

}  // namespace trl::fea
