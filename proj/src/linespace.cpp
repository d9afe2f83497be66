#include "linelab/linespace.hpp"

#include <cmath>

namespace linelab {

namespace {

// Inverse stereographic map from the south pole: xi = a + ib goes to the
// unit vector (2a, 2b, 1 - a^2 - b^2) / (1 + a^2 + b^2). Templated so the
// chart Jacobian can be taken by complex-step differentiation.
template <class T>
void psi_impl(const T &a, const T &b, T out[3]) {
    const T s = T(1) + a * a + b * b;
    out[0] = T(2) * a / s;
    out[1] = T(2) * b / s;
    out[2] = T(2) / s - T(1);
}

// Coordinate frame E1 = dPsi/da, E2 = dPsi/db. Conformal: |E1| = |E2| =
// 2/(1+|xi|^2), E1 . E2 = 0, and E2 = u x E1.
template <class T>
void frame_impl(const T &a, const T &b, T E1[3], T E2[3]) {
    const T s = T(1) + a * a + b * b;
    const T s2 = s * s;
    E1[0] = (T(2) * s - T(4) * a * a) / s2;
    E1[1] = T(-4) * a * b / s2;
    E1[2] = T(-4) * a / s2;
    E2[0] = T(-4) * a * b / s2;
    E2[1] = (T(2) * s - T(4) * b * b) / s2;
    E2[2] = T(-4) * b / s2;
}

// d/dx of the frame fields by complex step (machine-precision; psi is
// rational so the step introduces no branch issues).
void frame_derivs(double a, double b, Vec3 &dE1_da, Vec3 &dE1_db,
                  Vec3 &dE2_da, Vec3 &dE2_db) {
    const double h = 1e-100;
    using C = std::complex<double>;
    C e1[3], e2[3];
    frame_impl(C(a, h), C(b, 0), e1, e2);
    for (int k = 0; k < 3; ++k) {
        dE1_da[k] = e1[k].imag() / h;
        dE2_da[k] = e2[k].imag() / h;
    }
    frame_impl(C(a, 0), C(b, h), e1, e2);
    for (int k = 0; k < 3; ++k) {
        dE1_db[k] = e1[k].imag() / h;
        dE2_db[k] = e2[k].imag() / h;
    }
}

void require_same_base(const LineTangent &X, const LineTangent &Y,
                       const char *what) {
    if (!X.base.same_line(Y.base))
        throw InvalidInputError(std::string(what) +
                                ": tangents have different base lines");
}

// 6x4 Jacobian of (a,b,p,q) -> (u, v) at the given chart point.
Eigen::Matrix<double, 6, 4> chart_jacobian(double a, double b, double p,
                                           double q) {
    Vec3 E1, E2, dE1_da, dE1_db, dE2_da, dE2_db;
    {
        double e1[3], e2[3];
        frame_impl(a, b, e1, e2);
        E1 = Vec3(e1[0], e1[1], e1[2]);
        E2 = Vec3(e2[0], e2[1], e2[2]);
    }
    frame_derivs(a, b, dE1_da, dE1_db, dE2_da, dE2_db);

    Eigen::Matrix<double, 6, 4> J;
    J.block<3, 1>(0, 0) = E1; // du/da
    J.block<3, 1>(0, 1) = E2; // du/db
    J.block<3, 1>(0, 2).setZero();
    J.block<3, 1>(0, 3).setZero();
    J.block<3, 1>(3, 0) = p * dE1_da + q * dE2_da;
    J.block<3, 1>(3, 1) = p * dE1_db + q * dE2_db;
    J.block<3, 1>(3, 2) = E1;
    J.block<3, 1>(3, 3) = E2;
    return J;
}

} // namespace

OrientedLine::OrientedLine(const Vec3 &u, const Vec3 &v) : u_(u), v_(v) {
    const double un = u_.norm();
    if (std::abs(un - 1.0) > tol::kInvariant * (1.0 + un))
        throw InvalidInputError("OrientedLine: direction is not unit length");
    u_ /= un;
    const double perp = v_.dot(u_);
    if (std::abs(perp) > tol::kInvariant * (1.0 + v_.norm()))
        throw InvalidInputError(
            "OrientedLine: moment not perpendicular to direction");
    v_ -= perp * u_;
}

bool OrientedLine::same_line(const OrientedLine &o, double tol) const {
    return (u_ - o.u_).norm() <= tol &&
           (v_ - o.v_).norm() <= tol * (1.0 + v_.norm());
}

OrientedLine line_from_point_dir(const Vec3 &p, const Vec3 &u) {
    const double un = u.norm();
    if (std::abs(un - 1.0) > tol::kUnitDir)
        throw InvalidInputError("line_from_point_dir: non-unit direction");
    const Vec3 uu = u / un;
    return OrientedLine(uu, p - p.dot(uu) * uu);
}

Vec3 point_on_line(const OrientedLine &line, double t) {
    return line.point_at(t);
}

LineTangent decompose_tangent(const OrientedLine &line, const Vec3 &udot,
                              const Vec3 &vdot, double tol) {
    const Vec3 &u = line.direction();
    const double c1 = udot.dot(u);
    if (std::abs(c1) > tol * (1.0 + udot.norm()))
        throw InvalidTangentError(
            "decompose_tangent: udot not tangent to S^2 at u");
    // Components of vdot along u are base-point reparameterization along the
    // line and carry no tangent information; the projection kills them.
    const Vec3 h = udot - c1 * u;
    const Vec3 w = vdot - vdot.dot(u) * u;
    return LineTangent{line, h, w};
}

LineTangent apply_J(const LineTangent &X) {
    const Vec3 &u = X.base.direction();
    return LineTangent{X.base, u.cross(X.h), u.cross(X.w)};
}

double omega(const LineTangent &X, const LineTangent &Y) {
    require_same_base(X, Y, "omega");
    return X.h.dot(Y.w) - Y.h.dot(X.w);
}

double metric_G(const LineTangent &X, const LineTangent &Y) {
    require_same_base(X, Y, "metric_G");
    const Vec3 &u = X.base.direction();
    return u.cross(X.h).dot(Y.w) + u.cross(Y.h).dot(X.w);
}

LineTangent lin_comb(double a, const LineTangent &X, double b,
                     const LineTangent &Y) {
    require_same_base(X, Y, "lin_comb");
    return LineTangent{X.base, a * X.h + b * Y.h, a * X.w + b * Y.w};
}

std::pair<Vec3, Vec3> tangent_frame(const Vec3 &u) {
    Vec3 m = Vec3::UnitX();
    double best = std::abs(u.x());
    if (std::abs(u.y()) < best) {
        m = Vec3::UnitY();
        best = std::abs(u.y());
    }
    if (std::abs(u.z()) < best)
        m = Vec3::UnitZ();
    Vec3 e1 = (m - m.dot(u) * u).normalized();
    return {e1, u.cross(e1)};
}

Eigen::Matrix4d gram_matrix_G(const OrientedLine &line) {
    auto [e1, e2] = tangent_frame(line.direction());
    const LineTangent basis[4] = {
        {line, e1, Vec3::Zero()},
        {line, e2, Vec3::Zero()},
        {line, Vec3::Zero(), e1},
        {line, Vec3::Zero(), e2},
    };
    Eigen::Matrix4d g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            g(i, j) = metric_G(basis[i], basis[j]);
    return g;
}

Vec3 dir_from_xi(const Complex &xi) {
    double out[3];
    psi_impl(xi.real(), xi.imag(), out);
    return Vec3(out[0], out[1], out[2]);
}

void chart_frame(const Complex &xi, Vec3 &E1, Vec3 &E2) {
    double e1[3], e2[3];
    frame_impl(xi.real(), xi.imag(), e1, e2);
    E1 = Vec3(e1[0], e1[1], e1[2]);
    E2 = Vec3(e2[0], e2[1], e2[2]);
}

LineChart to_chart(const OrientedLine &line) {
    const Vec3 &u = line.direction();
    if (u.z() < -std::cos(tol::kPolarCap))
        throw ChartDomainError("to_chart: direction inside the south polar cap");
    const Complex xi(u.x() / (1.0 + u.z()), u.y() / (1.0 + u.z()));
    Vec3 E1, E2;
    chart_frame(xi, E1, E2);
    const double lam2 = E1.squaredNorm();
    const Vec3 &v = line.moment();
    return LineChart{xi, Complex(v.dot(E1) / lam2, v.dot(E2) / lam2)};
}

OrientedLine from_chart(const LineChart &c) {
    const Vec3 u = dir_from_xi(c.xi);
    Vec3 E1, E2;
    chart_frame(c.xi, E1, E2);
    Vec3 v = c.eta.real() * E1 + c.eta.imag() * E2;
    v -= v.dot(u) * u; // scrub roundoff; E1, E2 are tangent analytically
    return OrientedLine(u.normalized(), v);
}

ChartTangent push_to_chart(const LineTangent &X) {
    const LineChart c = to_chart(X.base);
    const auto J = chart_jacobian(c.xi.real(), c.xi.imag(), c.eta.real(),
                                  c.eta.imag());
    // Ambient velocity of the curve represented by (h, w): udot = h and
    // vdot = w + (vdot.u) u with vdot.u = -v.h from the TS^2 constraint.
    const Vec3 &u = X.base.direction();
    const Vec3 &v = X.base.moment();
    Eigen::Matrix<double, 6, 1> rhs;
    rhs.head<3>() = X.h;
    rhs.tail<3>() = X.w - v.dot(X.h) * u;
    const Eigen::Vector4d x = J.colPivHouseholderQr().solve(rhs);
    return ChartTangent{Complex(x[0], x[1]), Complex(x[2], x[3])};
}

LineTangent pull_from_chart(const LineChart &c, const ChartTangent &t) {
    const auto J = chart_jacobian(c.xi.real(), c.xi.imag(), c.eta.real(),
                                  c.eta.imag());
    Eigen::Vector4d x(t.dxi.real(), t.dxi.imag(), t.deta.real(),
                      t.deta.imag());
    const Eigen::Matrix<double, 6, 1> uv = J * x;
    const OrientedLine base = from_chart(c);
    const Vec3 &u = base.direction();
    const Vec3 udot = uv.head<3>();
    const Vec3 vdot = uv.tail<3>();
    return LineTangent{base, udot - udot.dot(u) * u,
                       vdot - vdot.dot(u) * u};
}

Eigen::Matrix4d metric_matrix_chart(const LineChart &c) {
    const auto J = chart_jacobian(c.xi.real(), c.xi.imag(), c.eta.real(),
                                  c.eta.imag());
    const OrientedLine base = from_chart(c);
    const Vec3 &u = base.direction();
    Vec3 h[4], w[4];
    for (int k = 0; k < 4; ++k) {
        const Vec3 udot = J.block<3, 1>(0, k);
        const Vec3 vdot = J.block<3, 1>(3, k);
        h[k] = udot - udot.dot(u) * u;
        w[k] = vdot - vdot.dot(u) * u;
    }
    Eigen::Matrix4d m;
    for (int k = 0; k < 4; ++k)
        for (int l = k; l < 4; ++l) {
            m(k, l) = u.cross(h[k]).dot(w[l]) + u.cross(h[l]).dot(w[k]);
            m(l, k) = m(k, l);
        }
    return m;
}

double aux_norm(const LineTangent &X, double eta_scale) {
    const ChartTangent t = push_to_chart(X);
    const double de = std::abs(t.deta) / eta_scale;
    return std::sqrt(std::norm(t.dxi) + de * de);
}

} // namespace linelab
