#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "linelab/errors.hpp"

namespace linelab {

using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;

/// Default tolerances of the line-space model. All overridable per call
/// where a function takes an explicit tolerance argument.
namespace tol {
inline constexpr double kUnitDir = 1e-9;      // |u| = 1 precondition
inline constexpr double kInvariant = 1e-12;   // construction invariants
inline constexpr double kPolarCap = 1e-3;     // chart exclusion angle (rad)
inline constexpr double kChartRoundTrip = 1e-10;
} // namespace tol

/// An oriented line in R^3, stored as a point of TS^2: unit direction u and
/// perpendicular moment v (the foot of the line's perpendicular from the
/// origin), with v.u = 0.
class OrientedLine {
  public:
    OrientedLine(const Vec3 &u, const Vec3 &v);

    const Vec3 &direction() const { return u_; }
    const Vec3 &moment() const { return v_; }

    /// Point v + t u on the line.
    Vec3 point_at(double t) const { return v_ + t * u_; }

    bool same_line(const OrientedLine &o, double tol = 1e-10) const;

  private:
    Vec3 u_, v_;
};

/// Line through p with unit direction u. Throws InvalidInputError if u is
/// not unit length within tol::kUnitDir.
OrientedLine line_from_point_dir(const Vec3 &p, const Vec3 &u);

Vec3 point_on_line(const OrientedLine &line, double t);

/// Tangent vector to TS^2 at a line, split by the round-sphere connection:
/// h is the velocity of the direction, w the covariant velocity of the
/// moment. Both are tangent to S^2 at u.
struct LineTangent {
    OrientedLine base;
    Vec3 h;
    Vec3 w;
};

/// Split the ambient velocity (udot, vdot) of a curve through TS^2 into
/// horizontal and vertical parts: h = udot, w = tangential part of vdot.
/// The curve constraints udot.u = 0 and vdot.u + v.udot = 0 are enforced
/// within tol (relative to the magnitudes involved).
LineTangent decompose_tangent(const OrientedLine &line, const Vec3 &udot,
                              const Vec3 &vdot, double tol = 1e-9);

/// The complex structure: 90-degree rotation u x (.) on both parts.
LineTangent apply_J(const LineTangent &X);

/// Canonical symplectic form: Omega(X, Y) = <h_X, w_Y> - <h_Y, w_X>.
double omega(const LineTangent &X, const LineTangent &Y);

/// Neutral metric G(X, Y) = Omega(JX, Y) = <u x h_X, w_Y> + <u x h_Y, w_X>.
double metric_G(const LineTangent &X, const LineTangent &Y);

/// a * X + b * Y for tangents sharing a base line.
LineTangent lin_comb(double a, const LineTangent &X, double b,
                     const LineTangent &Y);

/// Orthonormal basis (e1, e2) of the plane perpendicular to u, with
/// e2 = u x e1.
std::pair<Vec3, Vec3> tangent_frame(const Vec3 &u);

/// Gram matrix of G on the frame basis (e1,0), (e2,0), (0,e1), (0,e2).
/// Has signature (2,2) at every line.
Eigen::Matrix4d gram_matrix_G(const OrientedLine &line);

/// Chart coordinates: xi = stereographic image of the direction (projection
/// from the south pole), eta = fiber coordinate in the pushed-forward
/// coordinate frame E1 = d(inv stereo)/da, E2 = u x E1. In these
/// coordinates J acts as multiplication by i on increments; the invariant
/// tests verify this rather than assume it.
struct LineChart {
    Complex xi;
    Complex eta;
};

/// Tangent vector in chart coordinates.
struct ChartTangent {
    Complex dxi;
    Complex deta;
};

/// Valid away from a polar cap of angular radius tol::kPolarCap around the
/// south pole; throws ChartDomainError inside the cap.
LineChart to_chart(const OrientedLine &line);
OrientedLine from_chart(const LineChart &c);

/// Inverse stereographic map S^2 <- C and its coordinate frame at xi.
Vec3 dir_from_xi(const Complex &xi);
void chart_frame(const Complex &xi, Vec3 &E1, Vec3 &E2);

/// Differential of to_chart / from_chart on tangent vectors.
ChartTangent push_to_chart(const LineTangent &X);
LineTangent pull_from_chart(const LineChart &c, const ChartTangent &t);

/// Matrix of G on the chart coordinate frame (d Re xi, d Im xi, d Re eta,
/// d Im eta) at c; the bilinear form G of any two chart velocities is
/// x^T M y on their 4-vector images.
Eigen::Matrix4d metric_matrix_chart(const LineChart &c);

/// Auxiliary Euclidean norm of a tangent: Euclidean length of its chart
/// image with eta scaled by 1/eta_scale (eta carries length units; the
/// scale is typically the bounding radius of the generating surface).
double aux_norm(const LineTangent &X, double eta_scale = 1.0);

} // namespace linelab
