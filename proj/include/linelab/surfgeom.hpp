#pragma once

#include <memory>
#include <string>
#include <vector>

#include "linelab/linespace.hpp"

namespace linelab {

/// Parameter-plane domain: a rectangle, a disc, or an annulus (both centered
/// at the origin). Annuli are used for truncated patches.
struct Domain {
    enum class Kind { rect, disc, annulus };
    Kind kind = Kind::rect;
    double s_min = -1, s_max = 1, t_min = -1, t_max = 1; // rect
    double r_inner = 0, r_outer = 1;                     // disc / annulus

    static Domain rect(double s0, double s1, double t0, double t1);
    static Domain disc(double radius);
    static Domain annulus(double r_inner, double r_outer);

    bool contains(double s, double t) const;
    /// Bounding rectangle (used for grid generation).
    void bounds(double &s0, double &s1, double &t0, double &t1) const;
    /// Characteristic length of the domain.
    double scale() const;
};

/// Third-order jet of a parametric surface at a point.
struct Jet3 {
    Vec3 p;
    Vec3 ps, pt;
    Vec3 pss, pst, ptt;
    Vec3 psss, psst, pstt, pttt;
};

/// A twice/thrice differentiable parametric surface in R^3. Builtin families
/// supply exact jets; expression surfaces differentiate numerically.
class ParamSurface {
  public:
    virtual ~ParamSurface() = default;

    virtual Jet3 jet(double s, double t) const = 0;
    virtual const Domain &domain() const = 0;

    /// Unit-normal sign: +1 keeps ds x dt, -1 flips it.
    double orientation() const { return orient_; }
    void set_orientation(double o) { orient_ = o < 0 ? -1.0 : 1.0; }

    Vec3 position(double s, double t) const { return jet(s, t).p; }

  protected:
    double orient_ = 1.0;
};

/// Surface with position given by numeric expressions of (s, t); jets by
/// central finite differences with one Richardson pass.
std::shared_ptr<ParamSurface>
make_expression_surface(const std::string &expr_x, const std::string &expr_y,
                        const std::string &expr_z, const Domain &domain,
                        double fd_step_rel = 1e-4);

struct FundamentalForms {
    Eigen::Matrix2d I;
    Eigen::Matrix2d II;
    Vec3 normal;
};

FundamentalForms fundamental_forms(const ParamSurface &S, double s, double t);

struct CurvatureData {
    double kappa1 = 0, kappa2 = 0; // kappa1 >= kappa2
    Vec3 dir1, dir2;               // unit principal directions in R^3
    double gap = 0;                // |kappa1 - kappa2|
    double product = 0;            // kappa1 * kappa2
};

CurvatureData principal_curvatures(const ParamSurface &S, double s, double t);

/// Deviator of the shape operator in an I-orthonormal frame, packed as a
/// complex number a + ib with a = (S11 - S22)/2, b = S12. Zero exactly at
/// umbilic points; gap = 2 |deviator|. Its winding around a grid cell
/// localizes umbilics with an integer certificate.
Complex shape_deviator(const ParamSurface &S, double s, double t);

/// A point of the normal congruence with its tangent plane.
struct CongruencePoint {
    OrientedLine line;
    LineTangent dX1, dX2; // pushforwards of d/ds and d/dt
};

CongruencePoint normal_congruence(const ParamSurface &S, double s, double t);

struct GaussImageReport {
    double min_dot = 1.0;
    std::vector<std::pair<double, double>> boundary_samples;
    bool contained(double tol = 1e-8) const { return min_dot >= -tol; }
};

/// Sweeps an ns x nt grid over the domain and reports min n.e plus the
/// samples where |n.e| < tol (Gauss image touching the equator).
GaussImageReport gauss_image_check(const ParamSurface &S, int ns, int nt,
                                   const Vec3 &pole, double tol = 1e-8);

/// Parameter ray: start point, direction, and a parameter extent. The ray is
/// truncated at the domain boundary if it exits earlier.
struct Ray {
    double s0, t0;
    double ds, dt;
    double tau_max;
};

struct RayReport {
    double length = 0;          // induced length up to the truncation point
    bool hit_domain_edge = false;
    double tail_ratio = 0;      // ratio of successive dyadic tail increments
    bool diverging = false;     // tail increments not decaying and no edge hit
    double extrapolated_limit = 0; // geometric extrapolation when bounded
};

/// Heuristic completeness witness: integrates the induced length element
/// along parameter rays and classifies tail growth. Evidence only, not a
/// decision procedure.
std::vector<RayReport> completeness_probe(const ParamSurface &S,
                                          const std::vector<Ray> &rays,
                                          int panels = 4096);

} // namespace linelab
