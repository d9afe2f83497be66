#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "linelab/surfgeom.hpp"

namespace linelab {

/// Builtin surface families with exact jets:
///   "plane"                      params: extent
///   "sphere"       radius R      params: radius, (rect chart away from poles)
///   "cylinder"     radius R      params: radius
///   "paraboloid"   z = r^2/(2c)  params: c, extent
///   "cigar"        rotational cap asymptotic to the cylinder r = r0 and to
///                  the profile r = r0 tanh(a z); graph form
///                  z = (r / (a r0)) artanh(r / r0), smooth through the tip.
///                  params: r0, a, r_inner (annulus truncation), r_outer
///   "convex_graph" z = s^2/2 + cosh(t) - 1   params: extent
/// Throws InvalidInputError for unknown names or out-of-range parameters.
std::shared_ptr<ParamSurface>
make_builtin(const std::string &name,
             const std::map<std::string, double> &params = {});

/// Surface from an arbitrary position callable; jets by central differences
/// with one Richardson pass (same machinery as expression surfaces).
std::shared_ptr<ParamSurface>
make_callable_surface(std::function<Vec3(double, double)> position,
                      const Domain &domain, double fd_step_rel = 1e-4);

/// Cylindrical-graph profile r(z, phi) with its limiting radius r0(phi).
class ToponogovProfile {
  public:
    virtual ~ToponogovProfile() = default;
    virtual double r(double z, double phi) const = 0;
    virtual double r_z(double z, double phi) const = 0;
    virtual double r_zz(double z, double phi) const = 0;
    /// Limit of r as z -> infinity; +inf when unbounded.
    virtual double r0(double phi) const = 0;
};

/// r = r0 tanh(a z); the model convex-plane profile.
std::shared_ptr<ToponogovProfile> make_tanh_profile(double r0, double a);
/// r = r0 (1 + z); unbounded (negative control).
std::shared_ptr<ToponogovProfile> make_linear_profile(double r0);
/// r = r0 sin(z); non-monotone (negative control).
std::shared_ptr<ToponogovProfile> make_sine_profile(double r0);

struct ProfileCheckReport {
    bool monotone_ok = false; // r_z >= 0
    bool concave_ok = false;  // r_zz <= 0
    bool bounded_ok = false;  // r <= r0 + tol and r0 finite
    bool limits_ok = false;   // r(zmax) near r0 and r_z(zmax) near 0
    double worst_rz = 0, worst_rz_z = 0, worst_rz_phi = 0;
    double worst_rzz = 0, worst_rzz_z = 0, worst_rzz_phi = 0;
    double max_r_minus_r0 = 0;
    double approach_gap = 0; // max over phi of |r(zmax) - r0|
    double rz_at_zmax = 0;   // max over phi of |r_z(zmax)|
    bool all_ok() const {
        return monotone_ok && concave_ok && bounded_ok && limits_ok;
    }
};

/// Verifies the four profile conditions on an (nz x nphi) grid over
/// (0, z_max] x [0, 2 pi). Report-only; never throws on failed conditions.
ProfileCheckReport profile_check(const ToponogovProfile &p, int nz, int nphi,
                                 double z_max, double slack = 1e-9,
                                 double limit_tol = 1e-3);

/// Embeds the cylindrical graph (r cos phi, r sin phi, z) over
/// [z0, z1] x [0, 2 pi] as a ParamSurface (finite-difference jets).
std::shared_ptr<ParamSurface>
surface_from_profile(std::shared_ptr<const ToponogovProfile> p, double z0,
                     double z1);

struct GapSweepResult {
    std::vector<double> radii;
    std::vector<double> min_gap; // non-increasing by construction
    double loglog_slope = 0;     // fit of log min_gap vs log R
    std::string trend;           // "decreasing", "flat" or "zero-attained"
    int grid_n = 0;              // samples per axis at the accepted level
};

/// Min of |kappa1 - kappa2| over parameter discs of the given radii
/// (centered at the origin, intersected with the domain), refined until
/// each region's min is stable to rel_tol or max_refine is hit. The same
/// nested grid serves every region, so min_gap is non-increasing exactly.
GapSweepResult gap_sweep(const ParamSurface &S,
                         const std::vector<double> &scales,
                         double rel_tol = 1e-3, int base_n = 65,
                         int max_refine = 3, int threads = 1);

} // namespace linelab
