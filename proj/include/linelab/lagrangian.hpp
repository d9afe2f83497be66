#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "linelab/surfgeom.hpp"

namespace linelab {

/// Normalized symplectic-area defect of the congruence tangent plane:
/// |Omega(dX1, dX2)| / (aux norms). Zero iff the plane is Lagrangian.
double lagrangian_residual(const CongruencePoint &cp, double eta_scale = 1.0);

enum class PlaneSignature { lorentz, degenerate, definite };

/// Classification of a congruence tangent plane.
///  - defect: geometric J-invariance defect (projection of J dXi onto the
///    aux-orthogonal complement of the plane); 0 exactly at complex points.
///  - rho: complex 2x2 determinant of the chart images of (dX1, dX2); its
///    zeros are the complex points and its winding drives the Maslov index.
///  - signature: sign class of det of the induced G-Gram (normalized);
///    lorentz (negative), degenerate (~0, at complex points), definite.
struct TangentPlaneClass {
    double defect = 0;
    PlaneSignature signature = PlaneSignature::degenerate;
    Complex rho;
};

TangentPlaneClass complex_point_defect(const CongruencePoint &cp,
                                       double eta_scale = 1.0,
                                       double sig_tol = 1e-10);

/// The normal congruence of a surface as a section of L over a rectangular
/// parameter region, with analytic tangent planes.
class LagrangianSection {
  public:
    /// Region defaults to the bounding rectangle of the surface domain.
    LagrangianSection(std::shared_ptr<const ParamSurface> S, int ns, int nt);
    LagrangianSection(std::shared_ptr<const ParamSurface> S, double s0,
                      double s1, double t0, double t1, int ns, int nt);

    const ParamSurface &surface() const { return *surf_; }
    std::shared_ptr<const ParamSurface> surface_ptr() const { return surf_; }

    int ns() const { return ns_; }
    int nt() const { return nt_; }
    double s_node(int i) const { return s0_ + hs_ * i; }
    double t_node(int j) const { return t0_ + ht_ * j; }
    double hs() const { return hs_; }
    double ht() const { return ht_; }
    bool node_valid(int i, int j) const {
        return surf_->domain().contains(s_node(i), t_node(j));
    }

    CongruencePoint at(double s, double t) const {
        return normal_congruence(*surf_, s, t);
    }
    Complex rho_at(double s, double t) const {
        return complex_point_defect(at(s, t), eta_scale_).rho;
    }

    /// Bounding radius of the surface over the grid; the eta normalization
    /// of all auxiliary norms on this section.
    double length_scale() const { return eta_scale_; }

    /// Newton inversion of the Gauss direction: parameters whose oriented
    /// normal has chart coordinate xi. seed is updated for warm starts.
    std::pair<double, double>
    params_of_xi(const Complex &xi, std::pair<double, double> &seed) const;
    Complex eta_of_xi(const Complex &xi,
                      std::pair<double, double> &seed) const;

  private:
    std::shared_ptr<const ParamSurface> surf_;
    double s0_, t0_, hs_, ht_;
    int ns_, nt_;
    double eta_scale_ = 1.0;
};

/// Closed loop in parameter space (polyline; vertices implicitly closed).
struct Loop {
    std::vector<Eigen::Vector2d> vertices;

    static Loop circle(double cs, double ct, double radius, int n = 64);
    static Loop polygon(std::vector<Eigen::Vector2d> verts);
    Loop reversed() const;
    /// Concatenation through a shared base point: this, then other.
    Loop then(const Loop &other) const;
};

struct IndexReport {
    int winding = 0;        // winding of rho along the loop
    int maslov = 0;         // 2 * winding
    int analytic_index = 0; // maslov + 2
    int unparam_dim = 0;    // analytic_index - 3
};

IndexReport make_index_report(int winding);

/// Winding of a complex field along a closed polyline, with adaptive edge
/// subdivision until successive phase jumps stay below pi/2.
/// min_abs_rel rejects samples below that fraction of the largest |f| seen
/// (throws ComplexPointOnLoopError); refinement exhaustion throws
/// ResolutionError.
int winding_number(const std::function<Complex(double, double)> &f,
                   const std::vector<Eigen::Vector2d> &samples,
                   double min_abs_rel = 1e-7, int max_refine = 12);

/// Keller-Maslov bookkeeping of a loop on the section: winding of rho,
/// maslov = 2 winding, I = maslov + 2, unparameterized dimension I - 3.
IndexReport maslov_index(const LagrangianSection &sec, const Loop &loop,
                         double min_abs_rel = 1e-7, int max_refine = 12);

/// Hamiltonian perturbation data: potential phi on the parameter domain and
/// step size epsilon.
struct PerturbationPotential {
    std::function<double(double, double)> phi;
    double epsilon = 0;
};

/// A discrete section of L: grid of chart values with tangent planes
/// re-estimated by grid differences. Produced by sampling an analytic
/// section or by perturbing one.
class SectionGrid {
  public:
    SectionGrid(int ns, int nt, double s0, double t0, double hs, double ht,
                double eta_scale);
    static SectionGrid from_section(const LagrangianSection &sec);

    int ns() const { return ns_; }
    int nt() const { return nt_; }
    double eta_scale() const { return eta_scale_; }
    const LineChart &value(int i, int j) const { return v_[i * nt_ + j]; }
    LineChart &value(int i, int j) { return v_[i * nt_ + j]; }

    /// Congruence point with grid-difference tangents (interior nodes only).
    CongruencePoint point(int i, int j) const;
    double residual(int i, int j) const;
    double max_interior_residual() const;

  private:
    int ns_, nt_;
    double s0_, t0_, hs_, ht_;
    double eta_scale_;
    std::vector<LineChart> v_;
};

/// One explicit Euler step of the Hamiltonian field J(grad_G phi) applied to
/// the section; grad from grid differences of phi and the inverse induced
/// G-Gram. Requires the section to be totally real (lorentz) at every node;
/// throws CannotInvertGError otherwise.
SectionGrid perturb_lagrangian(const LagrangianSection &sec,
                               const PerturbationPotential &pot);

/// Frozen complex-point detector thresholds, calibrated once on the
/// sphere/paraboloid pair (see test_lagrangian).
struct DetectorThresholds {
    double gap = 1e-4;    // node umbilic flag: |kappa1 - kappa2| below this
    double defect = 1e-6; // node complex flag (with rho below as well)
    double rho = 1e-6;
};

/// Per-node fields and zero-set cells of the umbilic/complex detectors over
/// the section grid. Cells are certified by the winding of the matching
/// discriminant (shape deviator / rho) around the cell boundary, with an
/// all-corners threshold fallback for identically-degenerate fields (e.g.
/// the sphere, where every point is complex).
struct GridClassification {
    int ns = 0, nt = 0;
    std::vector<double> gap, product, kappa1, kappa2;
    std::vector<double> residual, defect, abs_rho;
    std::vector<PlaneSignature> signature;
    std::vector<uint8_t> valid;
    std::vector<std::pair<int, int>> umbilic_cells, complex_cells;
    bool cells_coincide = false;
    double min_gap = 0, max_residual = 0;
};

GridClassification classify_grid(const LagrangianSection &sec,
                                 const DetectorThresholds &thr = {},
                                 int threads = 1);

/// Winding of f around the rectangle boundary, or nullopt when the field is
/// below `floor` somewhere on the boundary or the phase cannot be resolved.
std::optional<int>
cell_winding(const std::function<Complex(double, double)> &f, double s0,
             double s1, double t0, double t1, double floor,
             int max_refine = 8);

} // namespace linelab
